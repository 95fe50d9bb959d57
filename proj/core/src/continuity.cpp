#include "semiflow/continuity.hpp"

#include "semiflow/errors.hpp"
#include "semiflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace semiflow {

namespace {

constexpr int kMaxDepth = 24;
// 1 - r below this cannot be resolved against r in double precision
constexpr double kMinGap = 64.0 * std::numeric_limits<double>::epsilon();

double rel_margin(double lhs, double rhs) { return (rhs - lhs) / rhs; }

cplx image(const FlowModel& flow, double r, double t) {
    // same evaluation path as weighted_z_derivative, so f(w_n) = f'(w_n) = 0 hold exactly there
    return advance_with_derivative(flow, r, t).value;
}

bool radial_limit_inside(const FlowModel& flow, double t) {
    try {
        return boundary_orbit(flow, 1.0, t, dyadic_ladder()).inside;
    } catch (const EscapeError&) {
        return false;
    } catch (const NoConvergence&) {
        return false;
    }
}

/// 1 - |phi_t(1)| from radii 1 - gap 2^{-j} approaching the boundary on the scale of gap.
std::optional<double> boundary_defect(const FlowModel& flow, double t, double gap) {
    std::vector<double> ladder;
    for (int j = 1; j <= 20; ++j) {
        const double e = std::ldexp(gap, -j);
        if (e < kMinGap) break;
        ladder.push_back(1.0 - e);
    }
    if (ladder.size() < 2) return std::nullopt;
    try {
        const auto bo = boundary_orbit(flow, 1.0, t, ladder);
        return 1.0 - std::abs(bo.limit);
    } catch (const NoConvergence&) {
        return std::nullopt;
    } catch (const EscapeError&) {
        return std::nullopt;
    }
}

/// Radius on the ladder 1 - gap 2^{-j}, refined in log scale between the
/// last failing and first passing rung. Returns nullopt if the ladder
/// reaches the precision floor first.
template <class Pred>
std::optional<double> ladder_search(double gap, Pred&& ok) {
    for (int j = 1;; ++j) {
        const double e = std::ldexp(gap, -j);
        if (e < kMinGap) return std::nullopt;
        if (!ok(1.0 - e)) continue;
        double pass = j, fail = j - 1;
        for (int it = 0; it < 40 && pass - fail > 1e-3; ++it) {
            const double mid = 0.5 * (pass + fail);
            const double r = 1.0 - gap * std::exp2(-mid);
            if (r <= 0.0 || !ok(r))
                fail = mid;
            else
                pass = mid;
        }
        return 1.0 - gap * std::exp2(-pass);
    }
}

AnalyticFn test_function(const GapConstruction& gc) {
    const auto Bt = gc.tilde(), Bh = gc.hat();
    return AnalyticFn::product({Bt.to_analytic(), AnalyticFn::power(Bh.to_analytic(), 2)});
}

}  // namespace

BlaschkeProduct GapConstruction::tilde() const {
    BlaschkeProduct B;
    for (const auto& p : pairs) B.zeros.push_back(p.r);
    return B;
}

BlaschkeProduct GapConstruction::hat() const {
    BlaschkeProduct B;
    for (const auto& p : pairs) B.zeros.push_back(p.w);
    return B;
}

GapConstruction construct_case1(const FlowModel& flow, cplx gamma0, int N, double t_start,
                                const Case1Options& opt) {
    if (N < 1) throw InvalidArgument("construct_case1 needs N >= 1");
    if (N > kMaxDepth) {
        std::ostringstream os;
        os << "depth " << N << " exceeds the double-precision cap " << kMaxDepth;
        throw DepthExceeded(os.str());
    }
    if (!(t_start > 0.0)) throw InvalidArgument("construct_case1 needs t_start > 0");
    if (!(opt.margin > 0.0 && opt.margin < 1.0)) throw InvalidArgument("margin must lie in (0, 1)");
    if (flow.is_automorphism()) throw CaseMismatch("automorphism families belong to Case (2)");

    GapConstruction gc{std::abs(gamma0 - 1.0) == 0.0 ? flow : flow.rotated(gamma0), gamma0, {}};
    if (!radial_limit_inside(gc.flow, t_start))
        throw CaseMismatch("radial limit of phi_t at gamma0 is not inside the disc");

    const double keep = 1.0 - opt.margin;
    double t = t_start;
    for (int n = 1; n <= N; ++n) {
        const double prev_gap = n == 1 ? 1.0 : 1.0 - gc.pairs.back().r;
        std::optional<double> r;
        for (int attempt = 0; attempt < opt.max_halvings && !r; ++attempt) {
            if (n > 1) {
                // t_n = t_{n-1} 2^{-k}, k >= 2, until the boundary image is deep enough
                t = attempt == 0 ? gc.pairs.back().t / 4.0 : t / 2.0;
                const auto defect = boundary_defect(gc.flow, t, prev_gap);
                if (!defect || !(*defect <= 0.25 * prev_gap)) continue;
            }
            r = ladder_search(prev_gap, [&](double rr) {
                const double dw = 1.0 - std::abs(image(gc.flow, rr, t));
                if (!(1.0 - rr < keep * 0.5 * dw)) return false;
                return n == 1 || 0.5 * dw < keep * 0.25 * prev_gap;
            });
            if (!r && n == 1) break;
        }
        if (!r) {
            std::ostringstream os;
            os << "level " << n << " cannot be separated from the previous one in double precision";
            throw DepthExceeded(os.str());
        }
        gc.pairs.push_back({n, *r, t, image(gc.flow, *r, t)});
    }
    return gc;
}

std::vector<GeomPropRow> geom_prop_rows(const GapConstruction& gc) {
    std::vector<GeomPropRow> rows;
    for (std::size_t i = 0; i < gc.pairs.size(); ++i) {
        const auto& p = gc.pairs[i];
        const double dw = 1.0 - std::abs(p.w);
        GeomPropRow row{p.n, rel_margin(1.0 - p.r, 0.5 * dw), std::numeric_limits<double>::quiet_NaN(),
                        std::abs(p.w) < p.r, true};
        if (i > 0) {
            const auto& q = gc.pairs[i - 1];
            row.upper_margin = rel_margin(0.5 * dw, 0.25 * (1.0 - q.r));
            row.interleaved = row.interleaved && q.r < std::abs(p.w);
            row.t_halved = p.t < 0.5 * q.t;
        }
        rows.push_back(row);
    }
    return rows;
}

double geom_prop_min_margin(std::span<const GeomPropRow> rows) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        m = std::min(m, r.lower_margin);
        if (!std::isnan(r.upper_margin)) m = std::min(m, r.upper_margin);
    }
    return m;
}

AnalyticFn build_test_function(const GapConstruction& gc) {
    if (gc.pairs.empty()) throw InvalidArgument("empty construction");
    std::vector<cplx> combined;
    for (const auto& p : gc.pairs) combined.push_back(p.r);
    for (const auto& p : gc.pairs) combined.push_back(p.w);
    InterpolationReport rep;
    try {
        rep = interpolation_delta(combined);
    } catch (const MultiplicityError& e) {
        throw InterpolationError(std::string("combined zero set is not simple: ") + e.what());
    }
    if (!(rep.delta > 0.0)) throw InterpolationError("combined zero set is not interpolating (delta = 0)");
    return test_function(gc);
}

GapReport bloch_gap(const GapConstruction& gc, const WeightSpec& weight, const GridSpec& grid,
                    const QuadratureOptions& quadrature) {
    const AnalyticFn f = build_test_function(gc);
    const AnalyticFn df = f.derivative();
    const WeightedSemigroup wsg{gc.flow, weight, quadrature};
    const auto Bt = gc.tilde(), Bh = gc.hat();

    std::vector<cplx> targets;
    for (const auto& p : gc.pairs) targets.push_back(p.r);
    const GridSpec g = grid.with_points(targets);
    const auto pts = g.samples();

    GapReport rep;
    rep.delta_hat = std::numeric_limits<double>::infinity();
    rep.gap_dominates = true;
    rep.cancellation_ok = true;
    for (const auto& p : gc.pairs) {
        GapRow row{p.n, p.t, p.r, p.w, 0.0, 0.0, 0.0, 1.0};
        // f'(r_n) = B~'(r_n) B^(r_n)^2 since B~(r_n) = 0
        const cplx bh = blaschke_eval(Bh, p.r);
        row.lower_bound = std::abs(blaschke_derivative(Bt, p.r) * bh * bh) * (1.0 - p.r);

        std::vector<double> vals(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            const cplx z = pts[i];
            const cplx d = weighted_z_derivative(wsg, f, df, z, p.t) - df(z);
            vals[i] = std::abs(d) * (1.0 - std::norm(z));
        });
        const cplx at_zero = apply_weighted(wsg, f, 0.0, p.t) - f(0.0);
        row.grid_gap = std::abs(at_zero) + *std::max_element(vals.begin(), vals.end());

        const auto m = cocycle_with_derivative(wsg, p.r, p.t);
        const auto fp = advance_with_derivative(gc.flow, p.r, p.t);
        row.cancellation_residual = std::abs(weighted_z_derivative(wsg, f, df, p.r, p.t));
        row.cancellation_scale = std::max({1.0, std::abs(m.m) * std::abs(fp.dz), std::abs(m.dm)});

        rep.delta_hat = std::min(rep.delta_hat, row.lower_bound);
        const double slack = row.cancellation_residual * (1.0 - p.r * p.r) + 1e-12 * std::max(1.0, row.lower_bound);
        if (!(row.grid_gap >= row.lower_bound - slack)) rep.gap_dominates = false;
        if (!(row.cancellation_residual <= 1e-8 * row.cancellation_scale)) rep.cancellation_ok = false;
        rep.rows.push_back(row);
    }
    return rep;
}

Case2Result construct_case2(const FlowModel& flow, int N) {
    if (N < 1) throw InvalidArgument("construct_case2 needs N >= 1");
    if (N > kMaxDepth) throw DepthExceeded("depth exceeds the double-precision cap");
    if (!flow.is_automorphism()) throw CaseMismatch("Case (2) needs an automorphism family");
    AutomorphismClass cls;
    try {
        cls = classify_automorphism(flow);
    } catch (const ModelError& e) {
        throw CaseMismatch(std::string("not an automorphism family: ") + e.what());
    }
    for (cplx p : cls.fixed_points)
        if (std::abs(p - 1.0) < 1e-6) throw CaseMismatch("1 is a boundary fixed point of the flow");

    Case2Result out{GapConstruction{flow, 1.0, {}}, 0, 0.0, {}, 0.0};
    const double t_small = 1e-3;
    const double probe = advance(flow, 1.0 - std::ldexp(1.0, -8), t_small).imag();
    if (probe == 0.0) throw BisectionError("the boundary curve does not leave the real axis");
    const double sign = probe > 0.0 ? 1.0 : -1.0;
    out.target_angle = sign * 0.75 * std::numbers::pi;

    // F(t) = arg(w - 1) - 3 pi / 4 on the half-plane the curve enters; F(0+) = pi / 4
    auto F = [&](double r, double t) {
        cplx d = advance(flow, r, t) - 1.0;
        if (sign < 0.0) d = std::conj(d);
        double a = std::arg(d);
        if (a < 0.0) a += 2.0 * std::numbers::pi;
        return a - 0.75 * std::numbers::pi;
    };

    double cap = 1.0;
    for (int n = 1; n <= N; ++n) {
        const double r = 1.0 - std::ldexp(1.0, -n);
        const double hi0 = out.construction.pairs.empty() ? cap : 0.5 * out.construction.pairs.back().t;
        // first sign change of F on the geometric scan hi0 2^{-k}, k = 60..0
        double lo = 0.0, hi = -1.0;
        for (int k = 60; k >= 0; --k) {
            const double tk = std::ldexp(hi0, -k);
            if (F(r, tk) < 0.0) {
                hi = tk;
                break;
            }
            lo = tk;
        }
        if (hi < 0.0) {
            if (out.construction.pairs.empty()) continue;  // below N0
            std::ostringstream os;
            os << "angle equation has no root in (0, " << hi0 << "] at n = " << n;
            throw BisectionError(os.str());
        }
        double t = hi;
        for (int it = 0; it < 200; ++it) {
            t = 0.5 * (lo + hi);
            const double Ft = F(r, t);
            if (std::abs(Ft) <= 1e-13 || hi - lo <= 1e-17) break;
            (Ft > 0.0 ? lo : hi) = t;
        }
        if (!(t < hi0)) throw BisectionError("angle root sits on the bracket edge");
        if (out.construction.pairs.empty()) out.n0 = n;
        const cplx w = image(flow, r, t);
        out.construction.pairs.push_back({n, r, t, w});
        double res = std::abs(std::arg(w - 1.0) - out.target_angle);
        res = std::min(res, 2.0 * std::numbers::pi - res);
        out.rows.push_back({n, r, t, w, res, (1.0 - w.real()) / std::ldexp(1.0, -n)});
    }
    if (out.construction.pairs.empty()) {
        std::ostringstream os;
        os << "angle equation has no root in (0, " << cap << "] for n <= " << N;
        throw BisectionError(os.str());
    }

    std::vector<cplx> all;
    for (const auto& p : out.construction.pairs) all.push_back(p.r);
    for (const auto& p : out.construction.pairs) all.push_back(p.w);
    out.min_separation = 1.0;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            out.min_separation = std::min(out.min_separation, pseudo_distance(all[i], all[j]));
    return out;
}

SeparabilityReport separability_witness(const BlaschkeProduct& B, std::span<const double> rotations,
                                        const GridSpec& grid) {
    B.validate();
    for (std::size_t i = 0; i < rotations.size(); ++i) {
        if (!(rotations[i] >= 0.0 && rotations[i] < 2.0 * std::numbers::pi))
            throw InvalidArgument("rotations must lie in [0, 2 pi)");
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(rotations[i] - rotations[j]) <= 1e-12) throw InvalidArgument("rotations must be distinct");
    }
    std::vector<cplx> zs;
    try {
        if (!(interpolation_delta(B).delta > 0.0)) throw InterpolationError("B is not interpolating");
    } catch (const MultiplicityError& e) {
        throw InterpolationError(std::string("B has repeated zeros: ") + e.what());
    }

    std::vector<BlaschkeProduct> rotated;
    for (double t : rotations) {
        rotated.push_back(B.rotated(t));
        zs.insert(zs.end(), rotated.back().zeros.begin(), rotated.back().zeros.end());
    }
    const auto pts = grid.with_points(zs).samples();
    const std::size_t k = rotations.size();

    std::vector<cplx> at_zero(k);
    std::vector<std::vector<cplx>> deriv(k, std::vector<cplx>(pts.size()));
    parallel_for(k * pts.size(), [&](std::size_t idx) {
        const std::size_t i = idx / pts.size(), p = idx % pts.size();
        deriv[i][p] = blaschke_derivative(rotated[i], pts[p]);
    });
    for (std::size_t i = 0; i < k; ++i) at_zero[i] = blaschke_eval(rotated[i], 0.0);

    SeparabilityReport rep;
    rep.rotations.assign(rotations.begin(), rotations.end());
    rep.gaps.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double sup = 0.0;
            for (std::size_t p = 0; p < pts.size(); ++p)
                sup = std::max(sup, std::abs(deriv[i][p] - deriv[j][p]) * (1.0 - std::norm(pts[p])));
            const double gap = std::abs(at_zero[i] - at_zero[j]) + sup;
            rep.gaps[i][j] = rep.gaps[j][i] = gap;
            rep.epsilon_hat = rep.epsilon_hat ? std::min(*rep.epsilon_hat, gap) : gap;
        }
    }
    rep.success = !rep.epsilon_hat || *rep.epsilon_hat > 1e-8;
    return rep;
}

std::vector<ContrastRow> h2_contrast(const WeightedSemigroup& wsg, const AnalyticFn& f,
                                     std::span<const double> times, const H2Norm& norm) {
    std::vector<ContrastRow> rows;
    for (double t : times) {
        if (!(t > 0.0)) throw InvalidArgument("h2_contrast needs positive times");
        const auto s = taylor(
            std::function<cplx(cplx)>([&](cplx z) { return apply_weighted(wsg, f, z, t) - f(z); }), norm.N, norm.r);
        const double v = h2_norm(s);
        rows.push_back({t, v, v / t});
    }
    return rows;
}

}  // namespace semiflow
