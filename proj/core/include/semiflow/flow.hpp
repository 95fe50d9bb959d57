#pragma once

#include "semiflow/analytic.hpp"
#include "semiflow/conformal.hpp"

#include <array>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace semiflow {

enum class KoenigsMode { Spiral, Translate };
enum class AutomorphismKind { Elliptic, Hyperbolic, Parabolic };

const char* to_string(KoenigsMode m);
const char* to_string(AutomorphismKind k);

/// Parameters of a one-parameter group of disc automorphisms.
///   elliptic:   rotation by omega t about center
///   hyperbolic: boundary fixed points attracting / repelling, multiplier e^{-rate t}
///   parabolic:  boundary fixed point, translation by i speed t in the
///               half-plane coordinate (p + z) / (p - z)
struct AutomorphismParams {
    AutomorphismKind kind = AutomorphismKind::Elliptic;
    cplx center{0.0};
    double omega = 1.0;
    cplx attracting{1.0};
    cplx repelling{-1.0};
    double rate = 1.0;
    cplx fixed_point{1.0};
    double speed = 1.0;
};

class FlowModel;

namespace flowspec {
struct Ode {
    AnalyticFn G;
    AnalyticFn dG;
    double tol;
};
/// phi_t = h^{-1}(e^{-ct} h) (spiral) or h^{-1}(h + ct) (translate)
struct Koenigs {
    ConformalMap h;
    cplx c;
    KoenigsMode mode;
};
struct Automorphism {
    AutomorphismParams params;
    ConformalMap h;  // Mobius linearizing coordinate
    cplx c;
    KoenigsMode mode;
};
/// conj(gamma) phi_t(gamma z)
struct Rotated {
    std::shared_ptr<const FlowModel> base;
    cplx gamma;
};
}  // namespace flowspec

/// A holomorphic semiflow on the disc. Immutable.
class FlowModel {
public:
    using Spec = std::variant<flowspec::Ode, flowspec::Koenigs, flowspec::Automorphism, flowspec::Rotated>;

    static FlowModel ode(AnalyticFn G, double tol = 1e-10);
    static FlowModel automorphism(const AutomorphismParams& params);
    static FlowModel elliptic(cplx center, double omega);
    static FlowModel hyperbolic(cplx attracting, cplx repelling, double rate);
    static FlowModel parabolic(cplx fixed_point, double speed);

    const Spec& spec() const { return spec_; }
    /// Infinitesimal generator G, as an expression tree for every variant.
    const AnalyticFn& generator() const { return generator_; }
    /// Tolerance of numerical integration; closed-form variants report their base's.
    double tol() const;
    bool is_automorphism() const;
    /// Time may be negative (automorphism groups only).
    bool allows_negative_time() const { return is_automorphism(); }

    FlowModel with_tol(double tol) const;
    /// Conjugation by the rotation z -> gamma z: conj(gamma) phi_t(gamma z).
    FlowModel rotated(cplx gamma) const;

private:
    friend FlowModel koenigs_flow(const ConformalMap& h, cplx c, KoenigsMode mode);
    FlowModel(Spec spec, AnalyticFn generator) : spec_(std::move(spec)), generator_(std::move(generator)) {}

    Spec spec_;
    AnalyticFn generator_;
};

/// Koenigs-model semiflow. Spiral mode requires h(0) = 0 and Re c >= 0.
FlowModel koenigs_flow(const ConformalMap& h, cplx c, KoenigsMode mode);

struct FlowPoint {
    cplx value;
    cplx dz;  // d phi_t / dz
};

/// phi_t(z).
cplx advance(const FlowModel& flow, cplx z, double t);
/// d phi_t / dz via the variational equation (ODE) or the chain rule (closed forms).
cplx flow_z_derivative(const FlowModel& flow, cplx z, double t);
FlowPoint advance_with_derivative(const FlowModel& flow, cplx z, double t);

/// Orbit values at nondecreasing times starting at or after 0, computed in
/// one sequential sweep.
std::vector<FlowPoint> sample_orbit(const FlowModel& flow, cplx z, std::span<const double> times,
                                    bool with_derivative);

/// Panel edges 0 = s_0 < ... < s_k = t: the accepted integrator steps for
/// ODE flows, uniform pieces of width <= max_width otherwise.
std::vector<double> step_breakpoints(const FlowModel& flow, cplx z, double t, double max_width = 0.25);

struct TrajectorySample {
    double t;
    cplx value;
    cplx dz;
};
using Trajectory = std::vector<TrajectorySample>;

/// Trajectory at strictly increasing times beginning with 0.
Trajectory trace(const FlowModel& flow, cplx z, std::span<const double> times);

/// |phi_{s+t}(z) - phi_t(phi_s(z))|
double check_semigroup(const FlowModel& flow, cplx z, double s, double t);

/// Value at h = 0 of the polynomial through the difference quotients
/// (values(h_i) - base) / h_i.
cplx richardson_to_zero(std::span<const double> ladder, std::span<const cplx> quotients);

/// Extrapolated (phi_h(z) - z) / h as h -> 0+.
cplx generator_fd(const FlowModel& flow, cplx z, std::span<const double> h_ladder);

struct AutomorphismClass {
    AutomorphismKind kind;
    std::vector<cplx> fixed_points;  // finite fixed points of phi_1
    std::array<cplx, 4> mobius;      // (a, b, c, d) of phi_1, normalized ad - bc = 1
    cplx discriminant;               // (a + d)^2 - 4
};

/// Classification from the fixed points of a Mobius fit of phi_1.
/// Throws ModelError if phi_1 is not Mobius (or is the identity).
AutomorphismClass classify_automorphism(const FlowModel& flow, double tol = 1e-9);

struct BoundaryOrbit {
    cplx limit;
    bool converged;
    bool inside;  // |limit| < 1 - 1e-6
    double last_increment;
    std::vector<cplx> values;
};

/// Ladder 1 - 2^{-j}, j = first..last.
std::vector<double> dyadic_ladder(int first = 1, int last = 30);

/// Radial limit of phi_t(r gamma0) along an increasing ladder of radii,
/// linearly extrapolated in 1 - r. Throws NoConvergence when the final
/// increment exceeds 1e-6.
BoundaryOrbit boundary_orbit(const FlowModel& flow, cplx gamma0, double t, std::span<const double> r_ladder);

}  // namespace semiflow
