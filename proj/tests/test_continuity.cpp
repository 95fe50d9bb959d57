#include <doctest.h>

#include "corpus.hpp"

#include <semiflow/continuity.hpp>
#include <semiflow/errors.hpp>

#include <cmath>
#include <numbers>

using namespace semiflow;
using corpus::c;
using corpus::poly;
using corpus::z;

namespace {

FlowModel radial() { return FlowModel::ode(c(-1.0) * z()); }

const GapConstruction& radial6() {
    static const GapConstruction gc = construct_case1(radial(), 1.0, 6, 0.5);
    return gc;
}

GridSpec grid() {
    std::vector<double> radii{0.0};
    for (int j = 1; j <= 10; ++j) radii.push_back(1.0 - std::ldexp(1.0, -j));
    return GridSpec::polar(radii, 48);
}

}  // namespace

TEST_CASE("Case (1) for the radial flow satisfies every inequality by direct arithmetic") {
    const auto& gc = radial6();
    REQUIRE(gc.pairs.size() == 6);
    CHECK(gc.pairs[0].t == 0.5);
    for (std::size_t i = 0; i < gc.pairs.size(); ++i) {
        const auto& p = gc.pairs[i];
        CAPTURE(p.n);
        CHECK(std::abs(p.w - std::exp(-p.t) * p.r) < 1e-10);
        CHECK(1.0 - p.r < 0.5 * (1.0 - std::abs(p.w)));
        CHECK(std::abs(p.w) < p.r);
        if (i > 0) {
            const auto& q = gc.pairs[i - 1];
            CHECK(0.5 * (1.0 - std::abs(p.w)) < 0.25 * (1.0 - q.r));
            CHECK(p.t < 0.5 * q.t);
            CHECK(q.r < std::abs(p.w));
        }
    }
    CHECK(gc.pairs.back().t <= gc.pairs.front().t / 32);
}

TEST_CASE("geom-prop rows report the relative margins") {
    const auto rows = geom_prop_rows(radial6());
    REQUIRE(rows.size() == 6);
    CHECK(std::isnan(rows[0].upper_margin));
    CHECK(geom_prop_min_margin(rows) >= 1e-3);
    for (const auto& r : rows) CHECK(r.interleaved);
}

TEST_CASE("single level") {
    const auto gc = construct_case1(radial(), 1.0, 1, 0.5);
    REQUIRE(gc.pairs.size() == 1);
    CHECK(1.0 - gc.pairs[0].r < 0.5 * (1.0 - std::abs(gc.pairs[0].w)));
    const auto f = build_test_function(gc);
    CHECK(std::abs(f(gc.pairs[0].w)) < 1e-15);
    CHECK(std::abs(f.derivative()(gc.pairs[0].w)) < 1e-14);
    CHECK(std::abs(f.derivative()(gc.pairs[0].r)) > 0.0);
}

TEST_CASE("Case (1) rejects automorphisms and trivial flows") {
    CHECK_THROWS_AS(construct_case1(FlowModel::elliptic(0.0, 1.0), 1.0, 3, 0.5), CaseMismatch);
    CHECK_THROWS_AS(construct_case1(FlowModel::ode(c(0.0)), 1.0, 3, 0.5), CaseMismatch);
    CHECK_THROWS_AS(construct_case1(radial(), 1.0, 25, 0.5), DepthExceeded);
}

TEST_CASE("Case (1) at another boundary point") {
    const cplx g0 = std::exp(cplx(0.0, 2.0));
    const auto gc = construct_case1(radial(), g0, 4, 0.5);
    CHECK(geom_prop_min_margin(geom_prop_rows(gc)) >= 1e-3);
}

TEST_CASE("test function") {
    const auto& gc = radial6();
    const auto f = build_test_function(gc);
    double at0 = 1.0;
    for (const auto& p : gc.pairs) at0 *= p.r * std::norm(p.w);
    CHECK(std::abs(std::abs(f(0.0)) - at0) < 1e-15);
    for (const auto& p : gc.pairs) {
        CHECK(std::abs(f(p.r)) < 1e-15);
        CHECK(std::abs(f.derivative()(p.w)) < 1e-10);
    }
    std::vector<cplx> all;
    for (const auto& p : gc.pairs) {
        all.push_back(p.r);
        all.push_back(p.w);
    }
    CHECK(interpolation_delta(all).delta > 0.0);
}

TEST_CASE("Bloch gap is weight independent") {
    const auto& gc = radial6();
    const auto g = grid();
    const auto none = bloch_gap(gc, WeightSpec::none(), g);
    const auto cob = bloch_gap(gc, WeightSpec::coboundary(poly({1.0, -1.0})), g);
    const auto one = bloch_gap(gc, WeightSpec::weight(c(1.0)), g);
    CHECK(none.delta_hat > 0.0);
    REQUIRE(none.rows.size() == cob.rows.size());
    for (std::size_t i = 0; i < none.rows.size(); ++i) {
        CHECK(none.rows[i].lower_bound == cob.rows[i].lower_bound);
        CHECK(none.rows[i].lower_bound == one.rows[i].lower_bound);
        for (const auto* rep : {&none, &cob, &one}) {
            const auto& r = rep->rows[i];
            CHECK(r.grid_gap >= r.lower_bound * (1.0 - 1e-9));
            CHECK(r.cancellation_residual <= 1e-8 * r.cancellation_scale);
        }
    }
    // the certified bound from the product formula
    const auto Bt = gc.tilde(), Bh = gc.hat();
    for (const auto& r : none.rows) {
        const cplx bh = blaschke_eval(Bh, r.r);
        CHECK(r.lower_bound == doctest::Approx(std::abs(blaschke_derivative(Bt, r.r) * bh * bh) * (1.0 - r.r)).epsilon(1e-14));
    }
    CHECK(none.gap_dominates);
    CHECK(cob.cancellation_ok);
}

TEST_CASE("H2 contrast shrinks linearly") {
    const WeightedSemigroup wsg{radial(), WeightSpec::none()};
    const std::vector<double> ts{0.1, 0.05, 0.025, 0.0125};
    const auto rows = h2_contrast(wsg, z(), ts);
    for (const auto& r : rows) {
        // ||e^{-t} z - z||_{H2} = 1 - e^{-t}
        CHECK(r.h2_gap == doctest::Approx(1.0 - std::exp(-r.t)).epsilon(1e-9));
        CHECK(r.per_t == doctest::Approx(r.h2_gap / r.t));
    }
}

TEST_CASE("Case (2) for the parabolic flow") {
    const auto res = construct_case2(FlowModel::parabolic(-1.0, 1.0), 6);
    REQUIRE_FALSE(res.rows.empty());
    CHECK(std::abs(std::abs(res.target_angle) - 0.75 * std::numbers::pi) < 1e-15);
    for (const auto& r : res.rows) {
        CHECK(r.r == 1.0 - std::ldexp(1.0, -r.n));
        CHECK(std::abs(std::arg(r.w - 1.0) - res.target_angle) <= 1e-9);
        CHECK(r.ratio == doctest::Approx((1.0 - r.w.real()) / std::ldexp(1.0, -r.n)));
        if (r.n >= 4) CHECK((r.ratio >= 0.8 && r.ratio <= 1.2));
    }
    CHECK(res.min_separation >= 0.1);
}

TEST_CASE("Case (2) for rotations keeps w_n on the circle of radius r_n") {
    const auto res = construct_case2(FlowModel::elliptic(0.0, 1.0), 4);
    REQUIRE_FALSE(res.rows.empty());
    for (const auto& r : res.rows) CHECK(std::abs(std::abs(r.w) - r.r) < 1e-13);
}

TEST_CASE("Case (2) rejects flows fixing 1 and non-automorphisms") {
    CHECK_THROWS_AS(construct_case2(FlowModel::hyperbolic(1.0, -1.0, 1.0), 4), CaseMismatch);
    CHECK_THROWS_AS(construct_case2(FlowModel::parabolic(1.0, 1.0), 4), CaseMismatch);
    CHECK_THROWS_AS(construct_case2(radial(), 4), CaseMismatch);
}

TEST_CASE("separability witness") {
    const auto B = dyadic_radial_product(10);
    const auto g = GridSpec::polar({0.0, 0.5, 0.9}, 32);
    const std::vector<double> one{0.0};
    const auto vac = separability_witness(B, one, g);
    CHECK_FALSE(vac.epsilon_hat.has_value());
    CHECK(vac.success);

    const std::vector<double> two{0.0, std::numbers::pi};
    const auto rep = separability_witness(B, two, g);
    REQUIRE(rep.epsilon_hat.has_value());
    CHECK(*rep.epsilon_hat > 0.0);
    // B_pi - B_0 at a zero r_k of B_0 is B_pi(r_k), and |B_0'(r_k)| (1 - r_k^2) bounds the gap from below
    const double rk = B.zeros[4].real();
    CHECK(*rep.epsilon_hat >= std::abs(blaschke_derivative(B, rk)) * (1.0 - rk * rk) -
                                   std::abs(blaschke_derivative(B.rotated(std::numbers::pi), rk)) * (1.0 - rk * rk) - 1e-12);

    const std::vector<double> same{0.1, 0.1 + 2.0 * std::numbers::pi};
    CHECK_THROWS_AS(separability_witness(B, same, g), InvalidArgument);
}
