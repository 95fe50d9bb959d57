#include "runner.hpp"

#include <semiflow/blaschke.hpp>
#include <semiflow/cocycle.hpp>
#include <semiflow/continuity.hpp>
#include <semiflow/errors.hpp>
#include <semiflow/flow.hpp>
#include <semiflow/json_io.hpp>
#include <semiflow/norms.hpp>
#include <semiflow/parallel.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace semiflow::lab {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

struct Tolerances {
    std::optional<double> ode;
    double quadrature = 1e-10;
    double fd = 1e-6;
    double semigroup = 1e-8;
    double cocycle = 1e-8;
    double similarity = 1e-12;
    double transfer = 1e-9;
};

double positive(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number() || !(j[key].get<double>() > 0.0))
        throw ConfigError(std::string("'") + key + "' must be a positive number");
    return j[key].get<double>();
}

int positive_int(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer() || j[key].get<int>() <= 0)
        throw ConfigError(std::string("'") + key + "' must be a positive integer");
    return j[key].get<int>();
}

Tolerances tolerances(const json& cfg) {
    Tolerances t;
    if (!cfg.contains("tolerances")) return t;
    const auto& j = cfg["tolerances"];
    if (!j.is_object()) throw ConfigError("'tolerances' must be an object");
    if (j.contains("ode")) t.ode = positive(j, "ode", 1e-10);
    t.quadrature = positive(j, "quadrature", t.quadrature);
    t.fd = positive(j, "fd", t.fd);
    t.semigroup = positive(j, "semigroup", t.semigroup);
    t.cocycle = positive(j, "cocycle", t.cocycle);
    t.similarity = positive(j, "similarity", t.similarity);
    t.transfer = positive(j, "transfer", t.transfer);
    return t;
}

const json& require(const json& cfg, const char* key) {
    auto it = cfg.find(key);
    if (it == cfg.end()) throw ConfigError(std::string("config is missing '") + key + "'");
    return *it;
}

GridSpec default_grid() {
    std::vector<double> radii{0.0};
    for (int j = 1; j <= 10; ++j) radii.push_back(1.0 - std::ldexp(1.0, -j));
    return GridSpec::polar(radii, 64);
}

class Context {
public:
    Context(const json& cfg, std::uint64_t seed, RunReport& rep)
        : cfg(cfg), tol(tolerances(cfg)), rep(rep), rng_(seed) {}

    FlowModel flow() const {
        auto f = flow_from_json(require(cfg, "flow"));
        if (tol.ode && std::holds_alternative<flowspec::Ode>(f.spec())) f = f.with_tol(*tol.ode);
        return f;
    }
    WeightSpec weight() const {
        return cfg.contains("weight") ? weight_from_json(cfg["weight"]) : WeightSpec::none();
    }
    QuadratureOptions quadrature() const {
        QuadratureOptions q;
        q.tol = tol.quadrature;
        return q;
    }
    AnalyticFn function() const { return analytic_from_json(require(cfg, "function")); }
    GridSpec grid() const { return cfg.contains("grid") ? grid_from_json(cfg["grid"]) : default_grid(); }

    cplx random_point(double radius) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double r = radius * std::sqrt(u(rng_));
        return std::polar(r, 2.0 * std::numbers::pi * u(rng_));
    }
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }

    /// Explicit "points" or `fallback` random points of modulus <= "radius".
    std::vector<cplx> points(int fallback, double radius = 0.8) {
        if (cfg.contains("points")) {
            std::vector<cplx> out;
            for (const auto& p : cfg["points"]) out.push_back(complex_from_json(p));
            for (cplx z : out)
                if (!(std::abs(z) < 1.0)) throw ConfigError("test points must lie in the open disc");
            return out;
        }
        const int n = positive_int(cfg, "samples", fallback);
        const double rad = cfg.contains("radius") ? positive(cfg, "radius", radius) : radius;
        if (!(rad < 1.0)) throw ConfigError("'radius' must be below 1");
        std::vector<cplx> out;
        for (int i = 0; i < n; ++i) out.push_back(random_point(rad));
        return out;
    }

    void verdict(std::string name, bool pass, std::string detail) {
        rep.verdicts.push_back({std::move(name), pass, std::move(detail)});
    }
    Table& table(std::string name, std::vector<std::string> header) {
        rep.tables.push_back({std::move(name), std::move(header), {}});
        return rep.tables.back();
    }

    const json& cfg;
    Tolerances tol;
    RunReport& rep;

private:
    std::mt19937_64 rng_;
};

void verdict_max(Context& ctx, const std::string& name, double worst, double limit) {
    ctx.verdict(name, worst <= limit, "max " + sci(worst) + " <= " + sci(limit));
}

std::vector<double> ladder_from(const json& cfg, const char* key, std::vector<double> fallback) {
    if (!cfg.contains(key)) return fallback;
    std::vector<double> out;
    for (const auto& v : cfg[key]) {
        if (!v.is_number()) throw ConfigError(std::string("'") + key + "' entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

// ---------------------------------------------------------------------------

void flow_trace(Context& ctx) {
    const auto flow = ctx.flow();
    const cplx z = complex_from_json(require(ctx.cfg, "z"));
    std::vector<double> times;
    if (ctx.cfg.contains("times")) {
        times = ladder_from(ctx.cfg, "times", {});
    } else {
        const double t_end = positive(ctx.cfg, "t_end", 1.0);
        const int steps = positive_int(ctx.cfg, "steps", 100);
        for (int i = 0; i <= steps; ++i) times.push_back(t_end * i / steps);
    }
    const auto traj = trace(flow, z, times);
    auto& tab = ctx.table("trajectory", {"t", "re", "im", "dre", "dim"});
    double worst = 0.0;
    for (const auto& s : traj) {
        tab.rows.push_back({num(s.t), num(s.value.real()), num(s.value.imag()), num(s.dz.real()), num(s.dz.imag())});
        worst = std::max(worst, std::abs(s.value));
    }
    ctx.verdict("disc_invariance", worst < 1.0, "max |phi_t(z)| = " + num(worst));
    ctx.verdict("identity_at_zero", !traj.empty() && traj.front().value == z && traj.front().dz == cplx(1.0),
                "phi_0(z) = z and d phi_0 / dz = 1");
    ctx.rep.summary["samples"] = traj.size();
}

void flow_check(Context& ctx) {
    const auto flow = ctx.flow();
    const double t_max = positive(ctx.cfg, "t_max", 2.0);
    const auto zs = ctx.points(50);
    std::vector<std::pair<double, double>> st;
    for (std::size_t i = 0; i < zs.size(); ++i) st.emplace_back(ctx.uniform(0.0, t_max), ctx.uniform(0.0, t_max));

    std::vector<double> res(zs.size()), mod(zs.size());
    parallel_for(zs.size(), [&](std::size_t i) {
        res[i] = check_semigroup(flow, zs[i], st[i].first, st[i].second);
        mod[i] = std::abs(advance(flow, zs[i], st[i].first + st[i].second));
    });
    auto& sg = ctx.table("semigroup", {"z_re", "z_im", "s", "t", "residual"});
    for (std::size_t i = 0; i < zs.size(); ++i)
        sg.rows.push_back({num(zs[i].real()), num(zs[i].imag()), num(st[i].first), num(st[i].second), num(res[i])});
    verdict_max(ctx, "semigroup_residual", *std::max_element(res.begin(), res.end()), ctx.tol.semigroup);
    const double far = *std::max_element(mod.begin(), mod.end());
    ctx.verdict("disc_invariance", far < 1.0, "max |phi_t(z)| = " + num(far));

    const auto ladder = ladder_from(ctx.cfg, "h_ladder", {1e-3, 5e-4, 2.5e-4});
    const std::size_t ng = std::min<std::size_t>(zs.size(), 30);
    std::vector<cplx> fd(ng), exact(ng);
    parallel_for(ng, [&](std::size_t i) {
        fd[i] = generator_fd(flow, zs[i], ladder);
        exact[i] = flow.generator()(zs[i]);
    });
    auto& gt = ctx.table("generator", {"z_re", "z_im", "fd_re", "fd_im", "G_re", "G_im", "error"});
    double worst = 0.0;
    for (std::size_t i = 0; i < ng; ++i) {
        const double e = std::abs(fd[i] - exact[i]);
        worst = std::max(worst, e);
        gt.rows.push_back({num(zs[i].real()), num(zs[i].imag()), num(fd[i].real()), num(fd[i].imag()),
                           num(exact[i].real()), num(exact[i].imag()), num(e)});
    }
    verdict_max(ctx, "generator_round_trip", worst, ctx.tol.fd);
}

void cocycle_check(Context& ctx) {
    const WeightedSemigroup wsg{ctx.flow(), ctx.weight(), ctx.quadrature()};
    const double t_max = positive(ctx.cfg, "t_max", 1.0);
    const auto zs = ctx.points(50);
    std::vector<std::pair<double, double>> st;
    for (std::size_t i = 0; i < zs.size(); ++i) st.emplace_back(ctx.uniform(0.0, t_max), ctx.uniform(0.0, t_max));

    std::vector<double> res(zs.size());
    std::vector<cplx> m0(zs.size()), mst(zs.size());
    parallel_for(zs.size(), [&](std::size_t i) {
        res[i] = check_cocycle_identity(wsg, zs[i], st[i].first, st[i].second);
        m0[i] = cocycle_eval(wsg, zs[i], 0.0);
        mst[i] = cocycle_eval(wsg, zs[i], st[i].first + st[i].second);
    });
    auto& ct = ctx.table("cocycle", {"z_re", "z_im", "s", "t", "m_re", "m_im", "residual"});
    bool unit = true, nonzero = true;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        ct.rows.push_back({num(zs[i].real()), num(zs[i].imag()), num(st[i].first), num(st[i].second),
                           num(mst[i].real()), num(mst[i].imag()), num(res[i])});
        unit = unit && m0[i] == cplx(1.0);
        nonzero = nonzero && std::abs(mst[i]) > 0.0;
    }
    verdict_max(ctx, "cocycle_identity", *std::max_element(res.begin(), res.end()), ctx.tol.cocycle);
    ctx.verdict("unit_at_zero", unit, "m_0(z) == 1 exactly");
    ctx.verdict("nonvanishing", nonzero, "|m_t(z)| > 0");

    const auto ladder = ladder_from(ctx.cfg, "h_ladder", {1e-3, 5e-4, 2.5e-4});
    const auto g = weight_generator(wsg);
    const std::size_t ng = std::min<std::size_t>(zs.size(), 20);
    std::vector<cplx> fd(ng);
    parallel_for(ng, [&](std::size_t i) { fd[i] = weight_generator_fd(wsg, zs[i], ladder); });
    auto& gt = ctx.table("weight_generator", {"z_re", "z_im", "fd_re", "fd_im", "g_re", "g_im", "error"});
    double worst = 0.0;
    for (std::size_t i = 0; i < ng; ++i) {
        const cplx e = g(zs[i]);
        worst = std::max(worst, std::abs(fd[i] - e));
        gt.rows.push_back({num(zs[i].real()), num(zs[i].imag()), num(fd[i].real()), num(fd[i].imag()), num(e.real()),
                           num(e.imag()), num(std::abs(fd[i] - e))});
    }
    verdict_max(ctx, "weight_generator_round_trip", worst, ctx.tol.fd);
}

ResidualNorm norm_from(const Context& ctx) {
    if (!ctx.cfg.contains("norm")) return H2Norm{};
    const auto& j = ctx.cfg["norm"];
    const std::string type = j.value("type", "h2");
    if (type == "h2") {
        H2Norm n{positive_int(j, "N", 64), positive(j, "r", 0.9)};
        if (!(n.r < 1.0)) throw ConfigError("H2 radius must be below 1");
        return n;
    }
    if (type == "bloch") return BlochGridNorm{j.contains("grid") ? grid_from_json(j["grid"]) : default_grid()};
    throw ConfigError("norm type must be 'h2' or 'bloch'");
}

void generator_check(Context& ctx) {
    const WeightedSemigroup wsg{ctx.flow(), ctx.weight(), ctx.quadrature()};
    const auto f = ctx.function();
    const auto norm = norm_from(ctx);
    std::vector<double> ladder;
    if (ctx.cfg.contains("times")) {
        ladder = ladder_from(ctx.cfg, "times", {});
    } else {
        const auto& l = ctx.cfg.contains("ladder") ? ctx.cfg["ladder"] : json::object();
        ladder = default_time_ladder(positive_int(l, "count", 7), positive(l, "t0", 0.1));
    }
    const auto rows = generator_consistency(wsg, f, norm, ladder);
    auto& tab = ctx.table("consistency", {"t", "residual", "ratio"});
    for (const auto& r : rows) tab.rows.push_back({num(r.t), num(r.residual), num(r.ratio)});
    const double lo = ctx.cfg.value("ratio_lo", 0.3), hi = ctx.cfg.value("ratio_hi", 0.7);
    const bool ok = first_order_decay(rows, lo, hi);
    double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        rmin = std::min(rmin, rows[i].ratio);
        rmax = std::max(rmax, rows[i].ratio);
    }
    ctx.verdict("first_order_decay", ok,
                "ratios in [" + num(rmin) + ", " + num(rmax) + "], required [" + num(lo) + ", " + num(hi) + "]");
    ctx.rep.summary["final_residual"] = rows.empty() ? 0.0 : rows.back().residual;
}

void coboundary_check(Context& ctx) {
    const auto flow = ctx.flow();
    const auto w = ctx.weight();
    const auto* cob = std::get_if<weightspec::Coboundary>(&w.spec());
    if (!cob) throw ConfigError("coboundary-check needs a weight of type 'coboundary'");
    const auto f = ctx.function();
    const double t_max = positive(ctx.cfg, "t_max", 1.0);
    const auto zs = ctx.points(50);
    std::vector<double> ts;
    for (std::size_t i = 0; i < zs.size(); ++i) ts.push_back(ctx.uniform(0.0, t_max));
    std::vector<double> res(zs.size());
    parallel_for(zs.size(), [&](std::size_t i) { res[i] = coboundary_similarity_check(cob->alpha, flow, f, zs[i], ts[i]); });
    auto& tab = ctx.table("similarity", {"z_re", "z_im", "t", "residual"});
    for (std::size_t i = 0; i < zs.size(); ++i)
        tab.rows.push_back({num(zs[i].real()), num(zs[i].imag()), num(ts[i]), num(res[i])});
    verdict_max(ctx, "similarity_identity", *std::max_element(res.begin(), res.end()), ctx.tol.similarity);
}

void transfer_check(Context& ctx) {
    const auto h = map_from_json(require(ctx.cfg, "map"));
    const WeightedSemigroup wsg{ctx.flow(), ctx.weight(), ctx.quadrature()};
    const auto f = ctx.function();
    const double t_max = positive(ctx.cfg, "t_max", 1.0);
    const auto zs = ctx.points(20);
    std::vector<double> ts;
    for (std::size_t i = 0; i < zs.size(); ++i) ts.push_back(ctx.uniform(0.0, t_max));
    std::vector<double> res(zs.size());
    parallel_for(zs.size(), [&](std::size_t i) { res[i] = transfer_conjugation_check(h, wsg, f, zs[i], ts[i]); });
    auto& tab = ctx.table("conjugation", {"z_re", "z_im", "t", "residual"});
    for (std::size_t i = 0; i < zs.size(); ++i)
        tab.rows.push_back({num(zs[i].real()), num(zs[i].imag()), num(ts[i]), num(res[i])});
    verdict_max(ctx, "conjugation_residual", *std::max_element(res.begin(), res.end()), ctx.tol.transfer);

    if (ctx.cfg.contains("image_generator")) {
        // (G, g) on h(disc) transferred to the disc, compared with expected trees
        const auto& j = ctx.cfg["image_generator"];
        const auto G = analytic_from_json(require(j, "G"));
        const auto g = j.contains("g") ? analytic_from_json(j["g"]) : AnalyticFn::constant(0.0);
        const auto tg = transfer_generator(h, G, g);
        const auto eG = analytic_from_json(require(j, "expected_G"));
        const auto eg = j.contains("expected_g") ? analytic_from_json(j["expected_g"]) : AnalyticFn::compose(g, h.forward());
        auto& gt = ctx.table("transferred_generator", {"z_re", "z_im", "G1_re", "G1_im", "error_G", "error_g"});
        double worst = 0.0;
        for (cplx z : zs) {
            const cplx v = tg.G(z);
            const double eGz = std::abs(v - eG(z)), egz = std::abs(tg.g(z) - eg(z));
            worst = std::max({worst, eGz, egz});
            gt.rows.push_back({num(z.real()), num(z.imag()), num(v.real()), num(v.imag()), num(eGz), num(egz)});
        }
        verdict_max(ctx, "transferred_generator", worst, positive(j, "tol", 1e-10));
    }
}

void gpv(Context& ctx) {
    const auto B = blaschke_from_json(require(ctx.cfg, "blaschke"));
    const double alpha = positive(ctx.cfg, "alpha", 0.1);
    std::vector<std::size_t> marked;
    if (ctx.cfg.contains("marked")) {
        for (const auto& m : ctx.cfg["marked"]) marked.push_back(m.get<std::size_t>());
    } else {
        for (std::size_t i = 0; i < B.zeros.size(); ++i) marked.push_back(i);
    }
    const auto rep = gpv_bound_check(B, marked, alpha, positive_int(ctx.cfg, "samples_per_disc", 80));
    auto& tab = ctx.table("gpv", {"index", "zero_re", "zero_im", "deflated", "beta"});
    for (const auto& r : rep.per_zero)
        tab.rows.push_back({std::to_string(r.index), num(r.zero.real()), num(r.zero.imag()), num(r.deflated), num(r.beta)});
    ctx.rep.summary["gpv"] = gpv_report_to_json(rep);
    ctx.verdict("hypothesis_delta_positive", rep.delta > 0.0, "delta = " + num(rep.delta));
    ctx.verdict("pseudo_discs_disjoint", rep.disjoint,
                "min rho " + num(rep.min_separation) + " vs threshold " + num(rep.separation_threshold));
    ctx.verdict("beta_hat_positive", rep.beta_hat > 0.0, "beta_hat = " + num(rep.beta_hat));
}

std::vector<WeightSpec> weights(const Context& ctx) {
    std::vector<WeightSpec> out;
    if (ctx.cfg.contains("weights")) {
        for (const auto& w : ctx.cfg["weights"]) out.push_back(weight_from_json(w));
        if (out.empty()) throw ConfigError("'weights' must not be empty");
    } else {
        out.push_back(ctx.weight());
    }
    return out;
}

void gap_tables(Context& ctx, const GapConstruction& gc, const GridSpec& grid) {
    const auto ws = weights(ctx);
    std::vector<GapReport> reps;
    for (std::size_t k = 0; k < ws.size(); ++k) {
        reps.push_back(bloch_gap(gc, ws[k], grid, ctx.quadrature()));
        auto& tab = ctx.table("gap_" + std::to_string(k), {"n", "t_n", "r_n", "w_re", "w_im", "lower_bound", "grid_gap",
                                                          "cancellation_residual"});
        for (const auto& r : reps.back().rows)
            tab.rows.push_back({std::to_string(r.n), num(r.t), num(r.r), num(r.w.real()), num(r.w.imag()),
                                num(r.lower_bound), num(r.grid_gap), num(r.cancellation_residual)});
    }
    bool identical = true, dominates = true, cancels = true;
    for (const auto& rep : reps) {
        for (std::size_t i = 0; i < rep.rows.size(); ++i)
            identical = identical && rep.rows[i].lower_bound == reps.front().rows[i].lower_bound;
        dominates = dominates && rep.gap_dominates;
        cancels = cancels && rep.cancellation_ok;
    }
    const double dh = reps.front().delta_hat;
    ctx.rep.summary["delta_hat"] = dh;
    ctx.verdict("delta_hat_positive", dh > 0.0, "delta_hat = " + num(dh));
    ctx.verdict("lower_bounds_weight_independent", identical, "bit-exact across " + std::to_string(reps.size()) + " weights");
    ctx.verdict("grid_gap_dominates", dominates, "grid gap >= certified lower bound - slack");
    ctx.verdict("double_zero_cancellation", cancels, "|d/dz W_t f(r_n)| <= 1e-8 scale");
}

void bloch_gap_case1(Context& ctx) {
    const auto flow = ctx.flow();
    const int N = positive_int(ctx.cfg, "N", 6);
    const double t_start = positive(ctx.cfg, "t_start", 0.5);
    const cplx gamma0 = ctx.cfg.contains("gamma0") ? complex_from_json(ctx.cfg["gamma0"]) : cplx(1.0);
    Case1Options opt;
    opt.margin = positive(ctx.cfg, "construction_margin", opt.margin);
    const auto gc = construct_case1(flow, gamma0, N, t_start, opt);

    const auto rows = geom_prop_rows(gc);
    auto& gp = ctx.table("geom_prop", {"n", "lower_margin", "upper_margin", "interleaved", "t_halved"});
    bool inter = true, halved = true;
    for (const auto& r : rows) {
        gp.rows.push_back({std::to_string(r.n), num(r.lower_margin), num(r.upper_margin), r.interleaved ? "1" : "0",
                           r.t_halved ? "1" : "0"});
        inter = inter && r.interleaved;
        halved = halved && r.t_halved;
    }
    const double need = positive(ctx.cfg, "margin_required", 1e-3);
    const double got = geom_prop_min_margin(rows);
    ctx.verdict("geom_prop_margin", got >= need, "min relative margin " + num(got) + " >= " + num(need));
    ctx.verdict("interleaving", inter, "r_{n-1} < |w_n| < r_n");
    ctx.verdict("t_halving", halved, "t_n < t_{n-1} / 2");
    if (gc.pairs.size() >= 6) {
        const double t1 = gc.pairs.front().t, t6 = gc.pairs[5].t;
        ctx.verdict("t_vanishing", t6 <= t1 / 32.0, "t_6 / t_1 = " + num(t6 / t1));
    }
    gap_tables(ctx, gc, ctx.grid());

    // strong continuity on H^2 for comparison
    const auto& cj = ctx.cfg.contains("contrast") ? ctx.cfg["contrast"] : json::object();
    const auto f = cj.contains("function") ? analytic_from_json(cj["function"]) : AnalyticFn::identity();
    const WeightedSemigroup wsg{gc.flow, weights(ctx).front(), ctx.quadrature()};
    std::vector<double> times;
    for (const auto& p : gc.pairs) times.push_back(p.t);
    const auto crow = h2_contrast(wsg, f, times, H2Norm{positive_int(cj, "N", 64), positive(cj, "r", 0.9)});
    auto& ct = ctx.table("contrast", {"t", "h2_gap", "per_t"});
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, top = 0.0;
    for (const auto& r : crow) {
        ct.rows.push_back({num(r.t), num(r.h2_gap), num(r.per_t)});
        lo = std::min(lo, r.per_t);
        hi = std::max(hi, r.per_t);
        top = std::max(top, r.h2_gap);
    }
    const bool linear = top <= 1e-12 || (lo > 0.0 && hi / lo <= 2.0);
    ctx.verdict("h2_contrast_linear", linear, "||W_t f - f||_H2 / t in [" + num(lo) + ", " + num(hi) + "]");
}

void bloch_gap_case2(Context& ctx) {
    const auto flow = ctx.flow();
    const int N = positive_int(ctx.cfg, "N", 6);
    const auto res = construct_case2(flow, N);
    auto& tab = ctx.table("case2", {"n", "r_n", "t_n", "w_re", "w_im", "angle_residual", "ratio"});
    double worst_angle = 0.0;
    bool ratio_ok = true;
    for (const auto& r : res.rows) {
        tab.rows.push_back({std::to_string(r.n), num(r.r), num(r.t), num(r.w.real()), num(r.w.imag()),
                            num(r.angle_residual), num(r.ratio)});
        worst_angle = std::max(worst_angle, r.angle_residual);
        if (r.n >= 4) ratio_ok = ratio_ok && r.ratio >= 0.8 && r.ratio <= 1.2;
    }
    ctx.rep.summary["n0"] = res.n0;
    ctx.rep.summary["target_angle"] = res.target_angle;
    verdict_max(ctx, "angle_equation", worst_angle, 1e-9);
    ctx.verdict("stolz_ratio", ratio_ok, "(1 - Re w_n) / 2^{-n} in [0.8, 1.2] for n >= 4");
    ctx.verdict("separated", res.min_separation >= 0.1, "min pairwise rho = " + num(res.min_separation));
    gap_tables(ctx, res.construction, ctx.grid());
}

void separability(Context& ctx) {
    const auto B = ctx.cfg.contains("blaschke") ? blaschke_from_json(ctx.cfg["blaschke"]) : dyadic_radial_product(10);
    std::vector<double> rot;
    if (ctx.cfg.contains("rotations")) {
        rot = ladder_from(ctx.cfg, "rotations", {});
    } else {
        const int k = positive_int(ctx.cfg, "rotation_count", 8);
        for (int i = 0; i < k; ++i) rot.push_back(2.0 * std::numbers::pi * i / k);
    }
    const auto grid = ctx.grid();
    const auto rep = separability_witness(B, rot, grid);
    std::vector<std::string> header{"rotation"};
    for (double t : rot) header.push_back(num(t));
    auto& tab = ctx.table("separability", header);
    for (std::size_t i = 0; i < rot.size(); ++i) {
        std::vector<std::string> row{num(rot[i])};
        for (double g : rep.gaps[i]) row.push_back(num(g));
        tab.rows.push_back(row);
    }
    if (!rep.epsilon_hat) {
        ctx.verdict("epsilon_positive", true, "single rotation: no pairs");
        return;
    }
    ctx.rep.summary["epsilon_hat"] = *rep.epsilon_hat;
    ctx.verdict("epsilon_positive", rep.success, "epsilon_hat = " + num(*rep.epsilon_hat));
    if (ctx.cfg.value("refinement_check", true)) {
        const auto fine = separability_witness(B, rot, grid.refined());
        const double rel = std::abs(*fine.epsilon_hat - *rep.epsilon_hat) / *rep.epsilon_hat;
        ctx.rep.summary["epsilon_hat_refined"] = *fine.epsilon_hat;
        ctx.verdict("refinement_stable", rel <= 0.2, "relative change " + num(rel) + " <= 0.2");
    }
}

const std::map<std::string, std::function<void(Context&)>>& registry() {
    static const std::map<std::string, std::function<void(Context&)>> r{
        {"flow-trace", flow_trace},
        {"flow-check", flow_check},
        {"cocycle-check", cocycle_check},
        {"generator-check", generator_check},
        {"coboundary-check", coboundary_check},
        {"transfer-check", transfer_check},
        {"gpv", gpv},
        {"bloch-gap", bloch_gap_case1},
        {"bloch-gap-auto", bloch_gap_case2},
        {"separability", separability},
    };
    return r;
}

std::string csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

void write_atomic(const fs::path& path, const std::string& body) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << body;
        if (!out) throw ConfigError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

json report_json(const RunReport& rep) {
    json verdicts = json::array();
    for (const auto& v : rep.verdicts) verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    json tables = json::array();
    for (const auto& t : rep.tables) tables.push_back(t.name + ".csv");
    json out{{"experiment", rep.experiment},
             {"subcommand", rep.subcommand},
             {"config_digest", rep.config_digest},
             {"seed", rep.seed},
             {"passed", rep.passed()},
             {"verdicts", verdicts},
             {"tables", tables},
             {"summary", rep.summary}};
    if (!rep.error_kind.empty()) out["error"] = {{"kind", rep.error_kind}, {"message", rep.error_message}};
    return out;
}

}  // namespace

bool RunReport::passed() const {
    return error_kind.empty() && !verdicts.empty() &&
           std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

int exit_code(const RunReport& report) {
    if (!report.error_kind.empty()) return 2;
    return report.passed() ? 0 : 1;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

RunReport run_config(const std::string& subcommand, const json& config, std::uint64_t seed) {
    RunReport rep;
    rep.subcommand = subcommand;
    rep.seed = seed;
    rep.config_digest = sha256_hex(config.dump());
    const auto start = std::chrono::steady_clock::now();
    try {
        if (!config.is_object()) throw ConfigError("config must be a JSON object");
        rep.experiment = config.value("id", subcommand);
        auto it = registry().find(subcommand);
        if (it == registry().end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
        Context ctx(config, seed, rep);
        it->second(ctx);
    } catch (const Error& e) {
        rep.error_kind = e.kind();
        rep.error_message = e.what();
    } catch (const json::exception& e) {
        rep.error_kind = "ConfigError";
        rep.error_message = e.what();
    } catch (const std::exception& e) {
        rep.error_kind = "InternalError";
        rep.error_message = e.what();
    }
    rep.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

RunReport run(const std::string& subcommand, const fs::path& config, const fs::path& out_dir, std::uint64_t seed) {
    RunReport rep;
    std::string bytes;
    {
        std::ifstream in(config, std::ios::binary);
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            bytes = ss.str();
        }
    }
    json cfg;
    bool parsed = false;
    if (bytes.empty()) {
        rep.error_kind = "ConfigError";
        rep.error_message = "cannot read config " + config.string();
    } else {
        try {
            cfg = json::parse(bytes);
            parsed = true;
        } catch (const json::parse_error& e) {
            rep.error_kind = "ConfigError";
            rep.error_message = e.what();
        }
    }
    if (parsed) rep = run_config(subcommand, cfg, seed);
    rep.subcommand = subcommand;
    rep.seed = seed;
    rep.config_digest = sha256_hex(bytes);
    if (rep.experiment.empty()) rep.experiment = config.stem().string();

    fs::create_directories(out_dir);
    for (const auto& t : rep.tables) write_atomic(out_dir / (t.name + ".csv"), csv(t));
    write_atomic(out_dir / "report.json", report_json(rep).dump(2) + "\n");
    const json meta{{"wall_clock_seconds", rep.wall_clock},
                    {"workers", worker_count()},
                    {"finished_at_unix", std::chrono::duration_cast<std::chrono::seconds>(
                                             std::chrono::system_clock::now().time_since_epoch())
                                             .count()}};
    write_atomic(out_dir / "metadata.json", meta.dump(2) + "\n");
    return rep;
}

}  // namespace semiflow::lab
