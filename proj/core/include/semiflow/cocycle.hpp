#pragma once

#include "semiflow/analytic.hpp"
#include "semiflow/conformal.hpp"
#include "semiflow/flow.hpp"
#include "semiflow/norms.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace semiflow {

namespace weightspec {
struct Weight {
    AnalyticFn g;
    AnalyticFn dg;
};
/// m_t(z) = alpha(phi_t(z)) / alpha(z)
struct Coboundary {
    AnalyticFn alpha;
    AnalyticFn dalpha;
    std::optional<cplx> fixed_point;  // the one point where alpha may vanish
};
}  // namespace weightspec

class WeightSpec {
public:
    using Spec = std::variant<weightspec::Weight, weightspec::Coboundary>;

    static WeightSpec weight(AnalyticFn g);
    static WeightSpec coboundary(AnalyticFn alpha, std::optional<cplx> fixed_point = std::nullopt);
    /// g = 0, the unweighted composition semigroup.
    static WeightSpec none() { return weight(AnalyticFn::constant(0.0)); }

    const Spec& spec() const { return spec_; }
    bool is_coboundary() const { return std::holds_alternative<weightspec::Coboundary>(spec_); }

private:
    explicit WeightSpec(Spec s) : spec_(std::move(s)) {}
    Spec spec_;
};

struct QuadratureOptions {
    int order = 16;          // Gauss-Legendre points per panel
    double tol = 1e-10;      // accepted |fine - coarse| relative to max(1, |integral|)
    int max_rounds = 10;     // panel-splitting rounds before QuadratureError
};

/// A flow together with a cocycle, inducing W_t f = m_t (f o phi_t).
struct WeightedSemigroup {
    FlowModel flow;
    WeightSpec weight;
    QuadratureOptions quadrature{};
};

/// The analytic function g = d m_t / dt at t = 0; for a coboundary this is G alpha' / alpha.
AnalyticFn weight_generator(const WeightedSemigroup& wsg);

/// int_0^t g(phi_s(z)) ds and int_0^t g'(phi_s(z)) d_z phi_s(z) ds.
struct OrbitIntegral {
    cplx value{0.0};
    cplx dz{0.0};
};

/// Composite Gauss-Legendre quadrature along the orbit of z. Panels follow
/// the integrator's accepted steps (uniform panels for closed-form flows);
/// each panel is compared against its two halves and split until the
/// difference falls below the tolerance.
OrbitIntegral integrate_along_orbit(const FlowModel& flow, const AnalyticFn& g, const AnalyticFn& dg, cplx z,
                                    double t, const QuadratureOptions& opt, bool with_derivative);

/// m_t(z) and its z-derivative.
struct CocycleValue {
    cplx m{1.0};
    cplx dm{0.0};
};

/// m_t(z): exp of the orbit integral for a weight, the quotient for a coboundary.
cplx cocycle_eval(const WeightedSemigroup& wsg, cplx z, double t);
CocycleValue cocycle_with_derivative(const WeightedSemigroup& wsg, cplx z, double t);

/// alpha(phi_t(z)) / alpha(z)
cplx coboundary_eval(const AnalyticFn& alpha, const FlowModel& flow, cplx z, double t);

/// |m_{s+t}(z) - m_s(z) m_t(phi_s(z))|
double check_cocycle_identity(const WeightedSemigroup& wsg, cplx z, double s, double t);

/// Extrapolated (m_h(z) - 1) / h as h -> 0+.
cplx weight_generator_fd(const WeightedSemigroup& wsg, cplx z, std::span<const double> h_ladder);

/// W_t f(z) = m_t(z) f(phi_t(z))
cplx apply_weighted(const WeightedSemigroup& wsg, const AnalyticFn& f, cplx z, double t);

/// d/dz [m_t (f o phi_t)](z) = m_t' f(phi_t) + m_t f'(phi_t) phi_t'
cplx weighted_z_derivative(const WeightedSemigroup& wsg, const AnalyticFn& f, cplx z, double t);

/// Same, with f' supplied to avoid rebuilding the derivative tree.
cplx weighted_z_derivative(const WeightedSemigroup& wsg, const AnalyticFn& f, const AnalyticFn& df, cplx z,
                           double t);

/// Af = G f' + g f
AnalyticFn apply_generator(const AnalyticFn& G, const AnalyticFn& g, const AnalyticFn& f);

struct H2Norm {
    int N = 64;
    double r = 0.9;
};
struct BlochGridNorm {
    GridSpec grid;
};
using ResidualNorm = std::variant<H2Norm, BlochGridNorm>;

struct ConsistencyRow {
    double t;
    double residual;
    double ratio;        // residual / previous residual; NaN on the first row
    double noise_floor;  // residual attainable from evaluation error alone
};

/// Norm of (W_t f - f) / t - A f along a decreasing ladder of times.
std::vector<ConsistencyRow> generator_consistency(const WeightedSemigroup& wsg, const AnalyticFn& f,
                                                  const ResidualNorm& norm, std::span<const double> t_ladder);

/// 0.1 * 2^{-k}, k = 0..count-1
std::vector<double> default_time_ladder(int count = 7, double t0 = 0.1);

/// True when every consecutive ratio lies in [lo, hi], or every residual is
/// at most max(zero_tol, noise_floor) (the identically-zero case).
bool first_order_decay(std::span<const ConsistencyRow> rows, double lo = 0.3, double hi = 0.7,
                       double zero_tol = 1e-12);

/// |coboundary_eval(alpha, flow, z, t) f(phi_t z) - (1/alpha(z)) (alpha f)(phi_t z)|
double coboundary_similarity_check(const AnalyticFn& alpha, const FlowModel& flow, const AnalyticFn& f, cplx z,
                                   double t);

struct TransferredGenerator {
    AnalyticFn G;  // (1/h') G o h
    AnalyticFn g;  // g o h
};

TransferredGenerator transfer_generator(const ConformalMap& h, const AnalyticFn& G, const AnalyticFn& g);

/// Residual between W_t f(z) on the disc and the value obtained by pushing
/// the semigroup to h(disc) (psi_t = h o phi_t o h^{-1}, mu_t = m_t o h^{-1})
/// and pulling it back at h(z).
double transfer_conjugation_check(const ConformalMap& h, const WeightedSemigroup& wsg, const AnalyticFn& f, cplx z,
                                  double t);

}  // namespace semiflow
