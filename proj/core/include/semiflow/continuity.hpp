#pragma once

#include "semiflow/analytic.hpp"
#include "semiflow/blaschke.hpp"
#include "semiflow/cocycle.hpp"
#include "semiflow/flow.hpp"
#include "semiflow/norms.hpp"

#include <optional>
#include <span>
#include <vector>

namespace semiflow {

struct GapPair {
    int n;
    double r;  // r_n
    double t;  // t_n
    cplx w;    // phi_{t_n}(r_n)
};

/// Sequences (r_n, t_n, w_n) for the Bloch-gap witness. The flow is stored
/// normalized by the rotation taking gamma0 to 1, so every r_n is real.
struct GapConstruction {
    FlowModel flow;
    cplx gamma0{1.0};
    std::vector<GapPair> pairs;

    /// B~ with zeros {r_n}.
    BlaschkeProduct tilde() const;
    /// B^ with zeros {w_n}.
    BlaschkeProduct hat() const;
};

struct Case1Options {
    double margin = 1e-2;  // relative slack demanded of each (geom-prop) inequality
    int max_halvings = 200;
};

/// Inductive Case (1) construction at gamma0. Throws CaseMismatch for
/// automorphism families or when the radial limit at gamma0 is not inside
/// the disc, DepthExceeded for N > 24 or when 1 - r_n underflows.
GapConstruction construct_case1(const FlowModel& flow, cplx gamma0, int N, double t_start,
                                const Case1Options& opt = {});

struct GeomPropRow {
    int n;
    double lower_margin;  // relative margin of 1 - r_n < (1 - |w_n|) / 2
    double upper_margin;  // relative margin of (1 - |w_n|) / 2 < (1 - r_{n-1}) / 4; NaN for n = 1
    bool interleaved;     // r_{n-1} < |w_n| < r_n
    bool t_halved;        // t_n < t_{n-1} / 2
};

std::vector<GeomPropRow> geom_prop_rows(const GapConstruction& gc);
/// Smallest margin over all rows (upper margins from n >= 2 only).
double geom_prop_min_margin(std::span<const GeomPropRow> rows);

/// f = B~ * B^^2. Throws InterpolationError when the combined zero set has
/// vanishing interpolation constant.
AnalyticFn build_test_function(const GapConstruction& gc);

struct GapRow {
    int n;
    double t;
    double r;
    cplx w;
    double lower_bound;            // |f'(r_n)| (1 - r_n)
    double grid_gap;               // grid Bloch norm of W_{t_n} f - f
    double cancellation_residual;  // |d/dz W_{t_n} f (r_n)|
    double cancellation_scale;     // max(1, |m| |phi'|, |m'|) at r_n
};

struct GapReport {
    std::vector<GapRow> rows;
    double delta_hat = 0.0;  // min_n lower_bound
    bool gap_dominates = false;
    bool cancellation_ok = false;
};

/// Evaluates the Bloch gap of W_{t_n} f - f for the semigroup with the
/// given weight over gc.flow. The grid is extended by every r_n.
GapReport bloch_gap(const GapConstruction& gc, const WeightSpec& weight, const GridSpec& grid,
                    const QuadratureOptions& quadrature = {});

struct Case2Row {
    int n;
    double r;
    double t;
    cplx w;
    double angle_residual;  // |arg(w_n - 1) - target|
    double ratio;           // (1 - Re w_n) / 2^{-n}
};

struct Case2Result {
    GapConstruction construction;
    int n0 = 0;
    double target_angle = 0.0;  // +3 pi / 4 or -3 pi / 4
    std::vector<Case2Row> rows;
    double min_separation = 0.0;  // min pairwise rho over {r_n} and {w_n}
};

/// Case (2) construction for automorphism families: r_n = 1 - 2^{-n} and
/// t_n solving arg(phi_t(r_n) - 1) = +-3 pi / 4, for n = N0..N.
Case2Result construct_case2(const FlowModel& flow, int N);

struct SeparabilityReport {
    std::vector<double> rotations;
    std::vector<std::vector<double>> gaps;  // grid Bloch norm of B_{t_i} - B_{t_j}
    std::optional<double> epsilon_hat;      // min off-diagonal entry; empty for one rotation
    bool success = false;
};

/// B_t(z) = B(e^{-it} z). The grid is extended by the zeros of every B_t.
SeparabilityReport separability_witness(const BlaschkeProduct& B, std::span<const double> rotations,
                                        const GridSpec& grid);

struct ContrastRow {
    double t;
    double h2_gap;  // ||W_t f - f||_{H^2}
    double per_t;   // h2_gap / t
};

/// H^2 distance of W_t f from f along the given times.
std::vector<ContrastRow> h2_contrast(const WeightedSemigroup& wsg, const AnalyticFn& f,
                                     std::span<const double> times, const H2Norm& norm = {});

}  // namespace semiflow
