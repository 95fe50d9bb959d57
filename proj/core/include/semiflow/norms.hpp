#pragma once

#include "semiflow/analytic.hpp"

#include <functional>
#include <span>
#include <vector>

namespace semiflow {

/// Deterministic sampling of the open disc: uniform angular samples on a
/// list of circles plus explicitly requested points.
struct GridSpec {
    std::vector<double> radii;  // strictly increasing, in [0, 1)
    std::vector<int> angular;   // samples per circle, one entry per radius
    std::vector<cplx> points;   // extra points inside the disc

    /// Throws InvalidArgument on malformed grids.
    void validate() const;

    /// Circle samples in radius order (angle 0 first), then the extra points.
    /// A zero radius contributes the single point 0.
    std::vector<cplx> samples() const;

    GridSpec with_points(std::span<const cplx> extra) const;

    /// Superset grid: doubles every angular count and inserts mid-radii.
    GridSpec refined() const;

    static GridSpec polar(std::vector<double> radii, int angular);
};

struct TaylorSeries {
    std::vector<cplx> coeffs;  // a_0 .. a_N

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    cplx operator()(cplx z) const;
};

/// Coefficients a_0..a_N from max(4N, 128) uniform samples on |z| = r.
TaylorSeries taylor(const AnalyticFn& f, int N, double r);
TaylorSeries taylor(const std::function<cplx(cplx)>& f, int N, double r);

/// sqrt(sum |a_k|^2)
double h2_norm(const TaylorSeries& s);

/// ((1/M) sum_j |f(r e^{2 pi i j / M})|^p)^{1/p}
double hp_norm_boundary(const AnalyticFn& f, double p, double r, int M);

/// |f(0)| + max over the grid of |f'(z)| (1 - |z|^2). A lower bound for the Bloch norm.
double bloch_norm_grid(const AnalyticFn& f, const GridSpec& grid);

/// Same quantity from a value at the origin and a derivative oracle.
double bloch_norm_grid(cplx value_at_zero, const std::function<cplx(cplx)>& derivative,
                       const GridSpec& grid);

/// max over the grid of |f'(z)| (1 - |z|^2), the seminorm part alone.
double bloch_seminorm_grid(const std::function<cplx(cplx)>& derivative, const GridSpec& grid);

}  // namespace semiflow
