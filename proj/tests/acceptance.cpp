#include "corpus.hpp"
#include "properties.hpp"

#include <semiflow/blaschke.hpp>
#include <semiflow/cocycle.hpp>
#include <semiflow/continuity.hpp>
#include <semiflow/flow.hpp>
#include <semiflow/norms.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace semiflow;
using corpus::c;
using corpus::poly;
using corpus::z;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<Outcome()> run;
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

const std::uint64_t kSeed = 20240611;

FlowModel radial() { return FlowModel::ode(c(-1.0) * z()); }

Outcome flow_oracle() {
    corpus::Sampler s(kSeed);
    const auto flow = radial();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const cplx p = s.point(0.9);
        const double t = s.uniform(0.0, 5.0);
        worst = std::max(worst, std::abs(advance(flow, p, t) - p * std::exp(-t)));
    }
    return {worst <= 1e-9, "max |advance - z e^{-t}| = " + sci(worst) + " (limit 1e-9)"};
}

Outcome semigroup() {
    corpus::Sampler s(kSeed + 1);
    double worst = 0.0;
    std::string where;
    for (const auto& [name, flow] : corpus::flows()) {
        for (int i = 0; i < 50; ++i) {
            const cplx p = s.point(0.9);
            const double a = s.uniform(0.0, 2.0), b = s.uniform(0.0, 2.0);
            const double r = check_semigroup(flow, p, a, b);
            if (r > worst) {
                worst = r;
                where = name;
            }
        }
    }
    return {worst <= 1e-8, "max residual " + sci(worst) + " at " + where + " (limit 1e-8)"};
}

Outcome cocycle() {
    corpus::Sampler s(kSeed + 2);
    const std::vector<double> ladder{1e-3, 5e-4, 2.5e-4};
    double ident = 0.0, trip = 0.0, closed = 0.0;
    for (const auto& [fname, flow] : corpus::flows()) {
        for (const auto& [wname, w] : corpus::weights()) {
            const WeightedSemigroup wsg{flow, w};
            const auto g = weight_generator(wsg);
            for (int i = 0; i < 20; ++i) {
                const cplx p = s.point(0.8);
                ident = std::max(ident, check_cocycle_identity(wsg, p, s.uniform(0.0, 1.0), s.uniform(0.0, 1.0)));
                trip = std::max(trip, std::abs(weight_generator_fd(wsg, p, ladder) - g(p)));
            }
        }
    }
    const WeightedSemigroup gz{radial(), WeightSpec::weight(z())};
    for (int i = 0; i < 50; ++i) {
        const cplx p = s.point(0.9);
        const double t = s.uniform(0.0, 5.0);
        closed = std::max(closed, std::abs(cocycle_eval(gz, p, t) - std::exp(p * (1.0 - std::exp(-t)))));
    }
    return {ident <= 1e-8 && trip <= 1e-6 && closed <= 1e-9,
            "identity " + sci(ident) + " (1e-8), round-trip " + sci(trip) + " (1e-6), closed form " + sci(closed) +
                " (1e-9)"};
}

Outcome consistency() {
    const auto ladder = default_time_ladder(7, 0.1);
    const std::vector<corpus::Named<AnalyticFn>> fs{
        {"1", c(1.0)}, {"z", z()}, {"z^2", poly({0.0, 0.0, 1.0})}, {"exp12", corpus::exp_truncation()}};
    const std::vector<corpus::Named<AnalyticFn>> gs{{"0", c(0.0)}, {"1", c(1.0)}, {"z", z()}};
    bool decay = true;
    std::string bad;
    for (const auto& [gn, g] : gs) {
        for (const auto& [fn, f] : fs) {
            const auto rows = generator_consistency({radial(), WeightSpec::weight(g)}, f, H2Norm{64, 0.9}, ladder);
            if (!first_order_decay(rows, 0.3, 0.7)) {
                decay = false;
                bad += " g=" + gn + "/f=" + fn;
            }
        }
    }
    // ||z^2||_{H2} = 1
    const auto rows = generator_consistency({radial(), WeightSpec::none()}, poly({0.0, 0.0, 1.0}), H2Norm{64, 0.9}, ladder);
    double rel = 0.0;
    for (const auto& r : rows) {
        const double want = std::abs(std::exp(-2.0 * r.t) - 1.0 + 2.0 * r.t) / r.t;
        rel = std::max(rel, std::abs(r.residual - want) / want);
    }
    return {decay && rel <= 0.05, std::string("ratios in [0.3, 0.7] ") + (decay ? "for all 12 cases" : "fail:" + bad) +
                                      ", oracle relative error " + sci(rel) + " (limit 5%)"};
}

Outcome coboundary() {
    corpus::Sampler s(kSeed + 3);
    const auto alpha = poly({1.0, -1.0});
    const auto f = AnalyticFn::exp(z());
    double worst = 0.0;
    for (const auto& [name, flow] : corpus::flows()) {
        for (int i = 0; i < 50; ++i) {
            const cplx p = s.point(0.9);
            worst = std::max(worst, coboundary_similarity_check(alpha, flow, f, p, s.uniform(0.0, 2.0)));
        }
    }
    return {worst <= 1e-12, "max residual " + sci(worst) + " (limit 1e-12)"};
}

Outcome transfer() {
    corpus::Sampler s(kSeed + 4);
    const auto h = ConformalMap::cayley();
    double conj = 0.0, gen = 0.0;
    for (const auto& [wname, w] : corpus::weights()) {
        const WeightedSemigroup wsg{radial(), w};
        for (int i = 0; i < 10; ++i) conj = std::max(conj, transfer_conjugation_check(h, wsg, z(), s.point(0.8), s.uniform(0.0, 2.0)));
    }
    const cplx cc{0.3, 1.0};
    const auto tg = transfer_generator(h, c(cc), c(0.0));
    for (int i = 0; i < 50; ++i) {
        const cplx p = s.point(0.95);
        gen = std::max(gen, std::abs(tg.G(p) - cc * (1.0 - p) * (1.0 - p) / 2.0));
    }
    return {conj <= 1e-9 && gen <= 1e-10,
            "conjugation residual " + sci(conj) + " (1e-9), G1 vs c(1-z)^2/2 " + sci(gen) + " (1e-10)"};
}

std::vector<std::size_t> indices(int n) {
    std::vector<std::size_t> out(n);
    for (int i = 0; i < n; ++i) out[i] = i;
    return out;
}

Outcome gpv() {
    const auto B = dyadic_radial_product(12);
    const auto rep = gpv_bound_check(B, indices(12), 0.1);
    double consecutive = 1.0, oracle = 0.0;
    for (int n = 1; n < 12; ++n) {
        const double a = std::ldexp(1.0, -n), b = std::ldexp(1.0, -n - 1);
        const double rho = pseudo_distance(B.zeros[n - 1], B.zeros[n]);
        consecutive = std::min(consecutive, rho);
        oracle = std::max(oracle, std::abs(rho - b / (a + b - a * b)));
    }
    double lo = INFINITY, hi = 0.0;
    for (int n = 8; n <= 14; ++n) {
        const double beta = gpv_bound_check(dyadic_radial_product(n), indices(n), 0.1).beta_hat;
        lo = std::min(lo, beta);
        hi = std::max(hi, beta);
    }
    const bool ok = rep.disjoint && consecutive >= 0.33 && oracle <= 1e-12 && rep.beta_hat > 0.0 && lo > 0.0 && hi / lo < 2.0;
    return {ok, "disjoint " + std::string(rep.disjoint ? "yes" : "no") + ", min consecutive rho " + sci(consecutive) +
                    ", oracle gap " + sci(oracle) + ", beta_hat " + sci(rep.beta_hat) + ", N=8..14 spread " + sci(hi / lo)};
}

GridSpec lab_grid() {
    std::vector<double> radii{0.0};
    for (int j = 1; j <= 10; ++j) radii.push_back(1.0 - std::ldexp(1.0, -j));
    return GridSpec::polar(radii, 64);
}

Outcome bloch_case1() {
    const auto gc = construct_case1(radial(), 1.0, 6, 0.5);
    const auto rows = geom_prop_rows(gc);
    const double margin = geom_prop_min_margin(rows);
    const std::vector<WeightSpec> weights{WeightSpec::none(), WeightSpec::weight(c(1.0)),
                                          WeightSpec::coboundary(poly({1.0, -1.0}))};
    std::vector<GapReport> reps;
    for (const auto& w : weights) reps.push_back(bloch_gap(gc, w, lab_grid()));
    bool bitexact = true, cancel = true;
    double canc = 0.0;
    for (const auto& rep : reps) {
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            bitexact = bitexact && rep.rows[i].lower_bound == reps[0].rows[i].lower_bound;
            const double q = rep.rows[i].cancellation_residual / rep.rows[i].cancellation_scale;
            canc = std::max(canc, q);
            cancel = cancel && q <= 1e-8;
        }
    }
    const double delta_hat = reps[0].delta_hat;
    const bool shrink = gc.pairs.back().t <= gc.pairs.front().t / 32;

    const std::vector<double> ts{0.1, 0.05, 0.025, 0.0125, 0.00625};
    const auto contrast = h2_contrast({radial(), WeightSpec::none()}, z(), ts);
    double plo = INFINITY, phi = 0.0;
    for (const auto& r : contrast) {
        plo = std::min(plo, r.per_t);
        phi = std::max(phi, r.per_t);
    }
    const bool linear = plo > 0.0 && phi / plo <= 2.0;
    const bool ok = margin >= 1e-3 && bitexact && delta_hat > 0.0 && shrink && cancel && linear;
    return {ok, "(a) margin " + sci(margin) + ", (b) bit-exact " + (bitexact ? "yes" : "no") + ", (c) delta_hat " +
                    sci(delta_hat) + " with t6/t1 " + sci(gc.pairs.back().t / gc.pairs.front().t) + ", (d) cancellation " +
                    sci(canc) + ", H2 gap/t in [" + sci(plo) + ", " + sci(phi) + "]"};
}

Outcome bloch_case2() {
    // Cayley-conjugated parabolic family with its boundary fixed point at -1
    const auto res = construct_case2(FlowModel::parabolic(-1.0, 1.0), 6);
    double angle = 0.0;
    bool ratios = true;
    std::ostringstream rs;
    for (const auto& r : res.rows) {
        angle = std::max(angle, std::abs(std::arg(r.w - 1.0) - res.target_angle));
        if (r.n >= 4) ratios = ratios && r.ratio >= 0.8 && r.ratio <= 1.2;
        rs << " " << r.ratio;
    }
    const bool ok = !res.rows.empty() && angle <= 1e-9 && ratios && res.min_separation >= 0.1;
    return {ok, "N0 " + std::to_string(res.n0) + ", angle residual " + sci(angle) + ", ratios" + rs.str() +
                    ", min rho " + sci(res.min_separation)};
}

Outcome separability() {
    const auto B = dyadic_radial_product(10);
    std::vector<double> rot;
    for (int k = 0; k < 8; ++k) rot.push_back(2.0 * std::numbers::pi * k / 8);
    const auto rep = separability_witness(B, rot, lab_grid());
    const auto fine = separability_witness(B, rot, lab_grid().refined());
    int pairs = 0;
    bool all_above = rep.epsilon_hat.has_value();
    for (std::size_t i = 0; i < rot.size(); ++i)
        for (std::size_t j = i + 1; j < rot.size(); ++j) {
            ++pairs;
            all_above = all_above && rep.gaps[i][j] >= *rep.epsilon_hat;
        }
    const double e = rep.epsilon_hat.value_or(0.0), ef = fine.epsilon_hat.value_or(0.0);
    const bool stable = e > 0.0 && std::abs(ef - e) <= 0.2 * e;
    return {pairs == 28 && all_above && e > 0.0 && stable,
            std::to_string(pairs) + " pairs, epsilon_hat " + sci(e) + ", refined " + sci(ef)};
}

Outcome invariants() {
    int failed = 0;
    std::string names;
    const auto results = properties::run_all(kSeed);
    for (const auto& r : results) {
        if (!r.pass) {
            ++failed;
            names += " " + r.module + "/" + r.name + " [" + r.detail + "]";
        }
    }
    return {failed == 0, std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) + " properties" +
                             (failed ? ", failing:" + names : "")};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "flow oracle agreement", 5.0, flow_oracle},
        {2, "semigroup identity", 60.0, semigroup},
        {3, "cocycle identity and weight round-trip", 60.0, cocycle},
        {4, "generator-consistency ladder", 30.0, consistency},
        {5, "coboundary similarity", 60.0, coboundary},
        {6, "conformal transfer", 60.0, transfer},
        {7, "GPV lemma", 60.0, gpv},
        {8, "Bloch gap, Case (1)", 60.0, bloch_case1},
        {9, "Bloch gap, Case (2)", 60.0, bloch_case2},
        {10, "non-separability witness", 60.0, separability},
        {11, "full invariant suite", 300.0, invariants},
    };
    int failures = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out{false, ""};
        try {
            out = cr.run();
        } catch (const std::exception& e) {
            out = {false, std::string("raised: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < cr.budget_s;
        const bool pass = out.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("%s criterion %d: %s | %s | %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", cr.id, cr.title.c_str(),
                    out.detail.c_str(), secs, cr.budget_s);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
