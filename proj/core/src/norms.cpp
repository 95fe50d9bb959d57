#include "semiflow/norms.hpp"

#include "semiflow/errors.hpp"
#include "semiflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace semiflow {

void GridSpec::validate() const {
    if (radii.size() != angular.size()) throw InvalidArgument("grid: radii and angular counts differ in length");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= 0.0 && radii[i] < 1.0)) throw InvalidArgument("grid: radius outside [0, 1)");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw InvalidArgument("grid: radii must be strictly increasing");
        if (angular[i] <= 0) throw InvalidArgument("grid: angular counts must be positive");
    }
    for (auto z : points)
        if (!(std::abs(z) < 1.0)) throw InvalidArgument("grid: include point outside the open disc");
}

std::vector<cplx> GridSpec::samples() const {
    validate();
    std::vector<cplx> out;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] == 0.0) {
            out.emplace_back(0.0);
            continue;
        }
        for (int j = 0; j < angular[i]; ++j)
            out.push_back(std::polar(radii[i], 2.0 * std::numbers::pi * j / angular[i]));
    }
    out.insert(out.end(), points.begin(), points.end());
    return out;
}

GridSpec GridSpec::with_points(std::span<const cplx> extra) const {
    GridSpec g = *this;
    for (auto z : extra)
        if (std::find(g.points.begin(), g.points.end(), z) == g.points.end()) g.points.push_back(z);
    return g;
}

GridSpec GridSpec::refined() const {
    validate();
    GridSpec g;
    g.points = points;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (i > 0) {
            g.radii.push_back(0.5 * (radii[i - 1] + radii[i]));
            g.angular.push_back(2 * std::max(angular[i - 1], angular[i]));
        }
        g.radii.push_back(radii[i]);
        g.angular.push_back(2 * angular[i]);
    }
    return g;
}

GridSpec GridSpec::polar(std::vector<double> radii, int angular) {
    GridSpec g;
    g.angular.assign(radii.size(), angular);
    g.radii = std::move(radii);
    g.validate();
    return g;
}

cplx TaylorSeries::operator()(cplx z) const {
    cplx acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

TaylorSeries taylor(const AnalyticFn& f, int N, double r) {
    return taylor(std::function<cplx(cplx)>([&f](cplx z) { return f(z); }), N, r);
}

TaylorSeries taylor(const std::function<cplx(cplx)>& f, int N, double r) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("taylor: sampling radius must lie in (0, 1)");
    if (N < 0) throw InvalidArgument("taylor: negative order");
    const int M = std::max(4 * N, 128);
    std::vector<cplx> roots(M);
    for (int m = 0; m < M; ++m) roots[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / M);
    std::vector<cplx> values(M);
    for (int j = 0; j < M; ++j) values[j] = f(r * roots[j]);

    TaylorSeries s;
    s.coeffs.resize(N + 1);
    double rk = 1.0;
    for (int k = 0; k <= N; ++k) {
        cplx acc = 0.0;
        for (int j = 0; j < M; ++j) acc += values[j] * std::conj(roots[(static_cast<long>(j) * k) % M]);
        s.coeffs[k] = acc / (static_cast<double>(M) * rk);
        rk *= r;
    }
    return s;
}

double h2_norm(const TaylorSeries& s) {
    double acc = 0.0;
    for (auto a : s.coeffs) acc += std::norm(a);
    return std::sqrt(acc);
}

double hp_norm_boundary(const AnalyticFn& f, double p, double r, int M) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("hp_norm_boundary: radius must lie in (0, 1)");
    if (!(p >= 1.0)) throw InvalidArgument("hp_norm_boundary: p must be >= 1");
    if (M < 64) throw InvalidArgument("hp_norm_boundary: need at least 64 samples");
    double acc = 0.0;
    for (int j = 0; j < M; ++j) acc += std::pow(std::abs(f(std::polar(r, 2.0 * std::numbers::pi * j / M))), p);
    return std::pow(acc / M, 1.0 / p);
}

double bloch_seminorm_grid(const std::function<cplx(cplx)>& derivative, const GridSpec& grid) {
    const auto pts = grid.samples();
    std::vector<double> vals(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        vals[i] = std::abs(derivative(pts[i])) * (1.0 - std::norm(pts[i]));
    });
    double best = 0.0;
    for (double v : vals) best = std::max(best, v);
    return best;
}

double bloch_norm_grid(cplx value_at_zero, const std::function<cplx(cplx)>& derivative, const GridSpec& grid) {
    return std::abs(value_at_zero) + bloch_seminorm_grid(derivative, grid);
}

double bloch_norm_grid(const AnalyticFn& f, const GridSpec& grid) {
    const AnalyticFn df = f.derivative();
    return bloch_norm_grid(f(0.0), [&df](cplx z) { return df(z); }, grid);
}

}  // namespace semiflow
