#include "semiflow/cocycle.hpp"

#include "semiflow/errors.hpp"
#include "semiflow/parallel.hpp"
#include "semiflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

namespace semiflow {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_nonvanishing(cplx m, cplx z, double t) {
    if (!(std::abs(m) > 0.0) || !finite(m)) {
        std::ostringstream os;
        os << "cocycle vanished or overflowed at z = " << z << ", t = " << t;
        throw SingularityError(os.str());
    }
}

const cplx* constant_value(const AnalyticFn& f) {
    const auto* c = std::get_if<expr::Constant>(&f.node().v);
    return c ? &c->value : nullptr;
}

struct Panel {
    double a, b;
};

}  // namespace

WeightSpec WeightSpec::weight(AnalyticFn g) {
    auto dg = g.derivative();
    return WeightSpec(weightspec::Weight{std::move(g), std::move(dg)});
}

WeightSpec WeightSpec::coboundary(AnalyticFn alpha, std::optional<cplx> fixed_point) {
    if (alpha.is_zero()) throw InvalidArgument("coboundary function must not vanish identically");
    auto da = alpha.derivative();
    return WeightSpec(weightspec::Coboundary{std::move(alpha), std::move(da), fixed_point});
}

AnalyticFn weight_generator(const WeightedSemigroup& wsg) {
    if (const auto* w = std::get_if<weightspec::Weight>(&wsg.weight.spec())) return w->g;
    const auto& c = std::get<weightspec::Coboundary>(wsg.weight.spec());
    std::vector<Guard> guards;
    if (c.fixed_point) guards.push_back({*c.fixed_point, 0.0});
    return AnalyticFn::quotient(wsg.flow.generator() * c.dalpha, c.alpha, std::move(guards));
}

OrbitIntegral integrate_along_orbit(const FlowModel& flow, const AnalyticFn& g, const AnalyticFn& dg, cplx z,
                                    double t, const QuadratureOptions& opt, bool with_derivative) {
    if (!(t >= 0.0)) throw InvalidArgument("orbit integral needs t >= 0");
    if (t == 0.0) return {};
    if (const cplx* c = constant_value(g)) return {*c * t, 0.0};

    const auto& rule = gauss_legendre(opt.order);
    const int n = opt.order;

    std::vector<Panel> panels;
    {
        const auto edges = step_breakpoints(flow, z, t);
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            if (edges[i + 1] > edges[i]) panels.push_back({edges[i], edges[i + 1]});
    }

    for (int round = 0; round < opt.max_rounds; ++round) {
        // node layout per panel: n coarse nodes on [a, b], then n on each half
        const std::size_t per_panel = 3 * static_cast<std::size_t>(n);
        std::vector<double> times(panels.size() * per_panel);
        std::vector<double> weights(times.size());
        for (std::size_t p = 0; p < panels.size(); ++p) {
            const auto [a, b] = panels[p];
            const double m = 0.5 * (a + b);
            const Panel pieces[3] = {{a, b}, {a, m}, {m, b}};
            for (int piece = 0; piece < 3; ++piece) {
                const double lo = pieces[piece].a, hi = pieces[piece].b;
                const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
                for (int k = 0; k < n; ++k) {
                    const std::size_t slot = p * per_panel + piece * n + k;
                    times[slot] = mid + half * rule.nodes[k];
                    weights[slot] = half * rule.weights[k];
                }
            }
        }
        std::vector<std::size_t> order(times.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return times[i] < times[j]; });
        std::vector<double> sorted(times.size());
        for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = times[order[i]];
        const auto pts = sample_orbit(flow, z, sorted, with_derivative);

        std::vector<cplx> fvals(times.size()), dvals(times.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            fvals[order[i]] = g.eval_extended(pts[i].value);
            if (with_derivative) dvals[order[i]] = dg.eval_extended(pts[i].value) * pts[i].dz;
        }

        OrbitIntegral total;
        std::vector<double> panel_err(panels.size());
        for (std::size_t p = 0; p < panels.size(); ++p) {
            cplx coarse = 0.0, fine = 0.0, dcoarse = 0.0, dfine = 0.0;
            for (int piece = 0; piece < 3; ++piece) {
                for (int k = 0; k < n; ++k) {
                    const std::size_t slot = p * per_panel + piece * n + k;
                    (piece == 0 ? coarse : fine) += weights[slot] * fvals[slot];
                    if (with_derivative) (piece == 0 ? dcoarse : dfine) += weights[slot] * dvals[slot];
                }
            }
            total.value += fine;
            total.dz += dfine;
            panel_err[p] = std::abs(fine - coarse) + std::abs(dfine - dcoarse);
        }
        const double err = std::accumulate(panel_err.begin(), panel_err.end(), 0.0);
        const double target = opt.tol * std::max({1.0, std::abs(total.value), std::abs(total.dz)});
        if (err <= target) return total;

        std::vector<Panel> next;
        const double share = target / static_cast<double>(panels.size());
        for (std::size_t p = 0; p < panels.size(); ++p) {
            if (panel_err[p] > share) {
                const double m = 0.5 * (panels[p].a + panels[p].b);
                next.push_back({panels[p].a, m});
                next.push_back({m, panels[p].b});
            } else {
                next.push_back(panels[p]);
            }
        }
        panels.swap(next);
    }
    std::ostringstream os;
    os << "orbit quadrature did not reach tolerance " << opt.tol << " at z = " << z << ", t = " << t;
    throw QuadratureError(os.str());
}

cplx cocycle_eval(const WeightedSemigroup& wsg, cplx z, double t) {
    if (!(std::abs(z) < 1.0)) throw DomainError("cocycle evaluated outside the open disc");
    if (t == 0.0) return 1.0;
    if (const auto* c = std::get_if<weightspec::Coboundary>(&wsg.weight.spec()))
        return coboundary_eval(c->alpha, wsg.flow, z, t);
    const auto& w = std::get<weightspec::Weight>(wsg.weight.spec());
    if (w.g.is_zero()) {
        advance(wsg.flow, z, t);  // domain and time checks
        return 1.0;
    }
    const auto integral = integrate_along_orbit(wsg.flow, w.g, w.dg, z, t, wsg.quadrature, false);
    const cplx m = std::exp(integral.value);
    require_nonvanishing(m, z, t);
    return m;
}

CocycleValue cocycle_with_derivative(const WeightedSemigroup& wsg, cplx z, double t) {
    if (!(std::abs(z) < 1.0)) throw DomainError("cocycle evaluated outside the open disc");
    if (t == 0.0) return {1.0, 0.0};
    if (const auto* c = std::get_if<weightspec::Coboundary>(&wsg.weight.spec())) {
        if (c->fixed_point && *c->fixed_point == z) throw SingularityError("coboundary at its declared zero");
        const auto p = advance_with_derivative(wsg.flow, z, t);
        const cplx az = c->alpha(z);
        if (az == cplx(0.0)) throw SingularityError("coboundary function vanishes at the base point");
        const cplx aw = c->alpha(p.value);
        const cplx m = aw / az;
        require_nonvanishing(m, z, t);
        const cplx dm = c->dalpha(p.value) * p.dz / az - aw * c->dalpha(z) / (az * az);
        return {m, dm};
    }
    const auto& w = std::get<weightspec::Weight>(wsg.weight.spec());
    if (w.g.is_zero()) {
        advance(wsg.flow, z, t);
        return {1.0, 0.0};
    }
    const auto integral = integrate_along_orbit(wsg.flow, w.g, w.dg, z, t, wsg.quadrature, true);
    const cplx m = std::exp(integral.value);
    require_nonvanishing(m, z, t);
    return {m, m * integral.dz};
}

cplx coboundary_eval(const AnalyticFn& alpha, const FlowModel& flow, cplx z, double t) {
    const cplx az = alpha(z);
    if (az == cplx(0.0)) throw SingularityError("coboundary function vanishes at the base point");
    if (t == 0.0) return 1.0;
    const cplx m = alpha(advance(flow, z, t)) / az;
    require_nonvanishing(m, z, t);
    return m;
}

double check_cocycle_identity(const WeightedSemigroup& wsg, cplx z, double s, double t) {
    const cplx whole = cocycle_eval(wsg, z, s + t);
    const cplx first = cocycle_eval(wsg, z, s);
    const cplx second = cocycle_eval(wsg, advance(wsg.flow, z, s), t);
    return std::abs(whole - first * second);
}

cplx weight_generator_fd(const WeightedSemigroup& wsg, cplx z, std::span<const double> h_ladder) {
    for (std::size_t i = 0; i < h_ladder.size(); ++i) {
        if (!(h_ladder[i] > 0.0)) throw InvalidArgument("weight_generator_fd: ladder entries must be positive");
        if (i > 0 && !(h_ladder[i] < h_ladder[i - 1]))
            throw InvalidArgument("weight_generator_fd: ladder must decrease");
    }
    std::vector<cplx> q;
    for (double h : h_ladder) q.push_back((cocycle_eval(wsg, z, h) - 1.0) / h);
    return richardson_to_zero(h_ladder, q);
}

cplx apply_weighted(const WeightedSemigroup& wsg, const AnalyticFn& f, cplx z, double t) {
    if (t == 0.0) return f(z);
    return cocycle_eval(wsg, z, t) * f(advance(wsg.flow, z, t));
}

cplx weighted_z_derivative(const WeightedSemigroup& wsg, const AnalyticFn& f, cplx z, double t) {
    return weighted_z_derivative(wsg, f, f.derivative(), z, t);
}

cplx weighted_z_derivative(const WeightedSemigroup& wsg, const AnalyticFn& f, const AnalyticFn& df, cplx z,
                           double t) {
    if (t == 0.0) return df(z);
    const auto m = cocycle_with_derivative(wsg, z, t);
    const auto p = advance_with_derivative(wsg.flow, z, t);
    return m.dm * f(p.value) + m.m * df(p.value) * p.dz;
}

AnalyticFn apply_generator(const AnalyticFn& G, const AnalyticFn& g, const AnalyticFn& f) {
    return AnalyticFn::sum({G * f.derivative(), g * f});
}

std::vector<double> default_time_ladder(int count, double t0) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(std::ldexp(t0, -k));
    return out;
}

std::vector<ConsistencyRow> generator_consistency(const WeightedSemigroup& wsg, const AnalyticFn& f,
                                                  const ResidualNorm& norm, std::span<const double> t_ladder) {
    for (std::size_t i = 0; i < t_ladder.size(); ++i) {
        if (!(t_ladder[i] > 0.0)) throw InvalidArgument("consistency ladder entries must be positive");
        if (i > 0 && !(t_ladder[i] < t_ladder[i - 1])) throw InvalidArgument("consistency ladder must decrease");
    }
    const AnalyticFn Af = apply_generator(wsg.flow.generator(), weight_generator(wsg), f);
    const AnalyticFn df = f.derivative();
    const AnalyticFn dAf = Af.derivative();

    std::vector<ConsistencyRow> rows;
    const double eval_tol = std::max(wsg.flow.tol(), QuadratureOptions{}.tol);
    for (double t : t_ladder) {
        double residual;
        double scale = 0.0;
        if (const auto* h2 = std::get_if<H2Norm>(&norm)) {
            // sample the residual on the circle in parallel, then extract coefficients
            const int M = std::max(4 * h2->N, 128);
            std::vector<cplx> pts(M), vals(M);
            for (int j = 0; j < M; ++j) pts[j] = std::polar(h2->r, 2.0 * std::numbers::pi * j / M);
            std::vector<double> mags(M);
            parallel_for(pts.size(), [&](std::size_t j) {
                const cplx zj = pts[j];
                const cplx wf = apply_weighted(wsg, f, zj, t);
                vals[j] = (wf - f(zj)) / t - Af(zj);
                mags[j] = std::abs(wf) + std::abs(f(zj)) + std::abs(df(zj));
            });
            scale = *std::max_element(mags.begin(), mags.end());
            auto lookup = [&](cplx z) {
                for (int j = 0; j < M; ++j)
                    if (pts[j] == z) return vals[j];
                return (apply_weighted(wsg, f, z, t) - f(z)) / t - Af(z);
            };
            residual = h2_norm(taylor(std::function<cplx(cplx)>(lookup), h2->N, h2->r));
        } else {
            const auto& grid = std::get<BlochGridNorm>(norm).grid;
            const cplx at_zero = (apply_weighted(wsg, f, 0.0, t) - f(0.0)) / t - Af(0.0);
            std::mutex mu;
            residual = bloch_norm_grid(
                at_zero,
                [&](cplx z) {
                    const cplx wd = weighted_z_derivative(wsg, f, df, z, t);
                    const double mag = (std::abs(wd) + std::abs(df(z))) * (1.0 - std::norm(z));
                    {
                        std::lock_guard lock(mu);
                        scale = std::max(scale, mag);
                    }
                    return (wd - df(z)) / t - dAf(z);
                },
                grid);
        }
        const double ratio =
            rows.empty() ? std::numeric_limits<double>::quiet_NaN() : residual / rows.back().residual;
        rows.push_back({t, residual, ratio, 10.0 * eval_tol * scale / t});
    }
    return rows;
}

bool first_order_decay(std::span<const ConsistencyRow> rows, double lo, double hi, double zero_tol) {
    if (std::all_of(rows.begin(), rows.end(), [&](const ConsistencyRow& r) { return r.residual <= std::max(zero_tol, r.noise_floor); }))
        return true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double ratio = rows[i].residual / rows[i - 1].residual;
        if (!(ratio >= lo && ratio <= hi)) return false;
    }
    return true;
}

double coboundary_similarity_check(const AnalyticFn& alpha, const FlowModel& flow, const AnalyticFn& f, cplx z,
                                   double t) {
    const cplx az = alpha(z);
    if (az == cplx(0.0)) throw SingularityError("coboundary function vanishes at the base point");
    const cplx w = advance(flow, z, t);
    const cplx weighted = coboundary_eval(alpha, flow, z, t) * f(w);
    const cplx similar = (1.0 / az) * (alpha(w) * f(w));
    return std::abs(weighted - similar);
}

TransferredGenerator transfer_generator(const ConformalMap& h, const AnalyticFn& G, const AnalyticFn& g) {
    return {AnalyticFn::quotient(AnalyticFn::compose(G, h.forward()), h.forward_derivative()),
            AnalyticFn::compose(g, h.forward())};
}

double transfer_conjugation_check(const ConformalMap& h, const WeightedSemigroup& wsg, const AnalyticFn& f, cplx z,
                                  double t) {
    const cplx direct = apply_weighted(wsg, f, z, t);
    // S_t on the image domain, evaluated at u = h(z):
    //   psi_t(u) = h(phi_t(h^{-1} u)),  mu_t(u) = m_t(h^{-1} u),  (f o h^{-1})(psi_t(u))
    const cplx u = h(z);
    const cplx pre = h.inverse(u, z);
    const cplx moved = advance(wsg.flow, pre, t);
    const cplx psi = h(moved);
    const cplx mu = cocycle_eval(wsg, pre, t);
    const cplx pulled = mu * f(h.inverse(psi, moved));
    return std::abs(direct - pulled);
}

}  // namespace semiflow
