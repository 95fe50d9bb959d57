#include <doctest.h>

#include "corpus.hpp"

#include <semiflow/cocycle.hpp>
#include <semiflow/errors.hpp>

#include <cmath>
#include <numbers>

using namespace semiflow;
using corpus::c;
using corpus::poly;
using corpus::z;

namespace {

const std::vector<double> ladder{1e-3, 5e-4, 2.5e-4};

FlowModel radial() { return FlowModel::ode(c(-1.0) * z()); }

WeightedSemigroup with_g(AnalyticFn g, FlowModel flow = radial()) { return {std::move(flow), WeightSpec::weight(std::move(g))}; }

}  // namespace

TEST_CASE("cocycle closed forms") {
    const cplx p{0.3, -0.2};
    CHECK(std::abs(cocycle_eval(with_g(c({0.5, 0.25})), p, 1.2) - std::exp(cplx(0.5, 0.25) * 1.2)) < 1e-13);
    for (double t : {0.1, 0.7, 2.0}) {
        const cplx want = std::exp(p * (1.0 - std::exp(-t)));
        CHECK(std::abs(cocycle_eval(with_g(z()), p, t) - want) < 1e-9);
    }
    for (const auto& [name, flow] : corpus::flows()) CHECK(cocycle_eval(with_g(z(), flow), p, 0.0) == cplx(1.0));
}

TEST_CASE("cocycle z-derivative against the closed form") {
    // m = exp(z (1 - e^{-t})), dm/dz = (1 - e^{-t}) m
    const cplx p{0.2, 0.5};
    const double t = 0.8;
    const auto v = cocycle_with_derivative(with_g(z()), p, t);
    const double k = 1.0 - std::exp(-t);
    CHECK(std::abs(v.m - std::exp(k * p)) < 1e-9);
    CHECK(std::abs(v.dm - k * std::exp(k * p)) < 1e-9);
}

TEST_CASE("coboundary closed forms") {
    const auto flow = radial();
    CHECK(std::abs(coboundary_eval(c(1.0), flow, {0.3, 0.3}, 1.0) - 1.0) < 1e-15);
    CHECK(std::abs(coboundary_eval(poly({1.0, -1.0}), flow, 0.5, std::log(2.0)) - 1.5) < 1e-10);
    CHECK(coboundary_eval(poly({1.0, -1.0}), flow, 0.5, 0.0) == cplx(1.0));
    CHECK_THROWS_AS(coboundary_eval(poly({-0.5, 1.0}), flow, 0.5, 1.0), SingularityError);
}

TEST_CASE("cocycle identity residual") {
    CHECK(check_cocycle_identity(with_g(z()), 0.5, 0.5, 0.5) <= 1e-8);
    const WeightedSemigroup cob{radial(), WeightSpec::coboundary(poly({1.0, -1.0}))};
    CHECK(check_cocycle_identity(cob, {0.1, 0.4}, 0.3, 1.1) <= 1e-8);
}

TEST_CASE("weight generator round-trip") {
    CHECK(std::abs(weight_generator_fd(with_g(z()), {0.3, 0.2}, ladder) - cplx(0.3, 0.2)) < 1e-6);
    const WeightedSemigroup cob{radial(), WeightSpec::coboundary(poly({1.0, -1.0}))};
    CHECK(std::abs(weight_generator_fd(cob, 0.5, ladder) - 1.0) < 1e-6);
    CHECK(std::abs(weight_generator(cob)(0.5) - 1.0) < 1e-14);
    CHECK(std::abs(weight_generator_fd(with_g(c(0.0)), 0.5, ladder)) == 0.0);
}

TEST_CASE("weighted composition") {
    const auto f = poly({1.0, 2.0, {0.0, 1.0}});
    const cplx p{0.4, -0.1};
    CHECK(apply_weighted(with_g(z()), f, p, 0.0) == f(p));
    for (double t : {0.2, 1.5}) {
        CHECK(std::abs(apply_weighted(with_g(c(0.0)), z(), p, t) - p * std::exp(-t)) < 1e-10);
        CHECK(std::abs(apply_weighted(with_g(c(1.0), corpus::flows()[2].value), c(1.0), p, t) - std::exp(t)) < 1e-12);
    }
}

TEST_CASE("weighted z-derivative") {
    const cplx p{0.1, 0.6};
    const auto f = poly({0.0, 1.0, 0.5});
    CHECK(std::abs(weighted_z_derivative(with_g(z()), f, p, 0.0) - f.derivative()(p)) < 1e-14);
    CHECK(std::abs(weighted_z_derivative(with_g(c(0.0)), z(), p, 0.9) - std::exp(-0.9)) < 1e-10);
    CHECK(std::abs(weighted_z_derivative(with_g(c(1.0)), z(), p, 0.9) - 1.0) < 1e-10);
}

TEST_CASE("generator application") {
    const auto f = poly({0.0, 0.0, 1.0});
    CHECK(apply_generator(c(0.0), c(0.0), f)(0.3) == cplx(0.0));
    CHECK(std::abs(apply_generator(c(-1.0) * z(), c(0.0), f)(0.5) - (-0.5)) < 1e-15);
    CHECK(std::abs(apply_generator(c(-1.0) * z(), c(1.0), c(1.0))({0.2, 0.7}) - 1.0) < 1e-15);
}

TEST_CASE("consistency ladder") {
    const auto ts = default_time_ladder();
    REQUIRE(ts.size() == 7);
    CHECK(ts.front() == 0.1);
    CHECK(ts.back() == 0.1 / 64);

    // f = 1, g = 1: W_t f = e^t, residual |(e^t - 1)/t - 1| ||1|| ~ t/2
    const auto rows = generator_consistency(with_g(c(1.0)), c(1.0), H2Norm{}, ts);
    const auto& r = rows[3];
    CHECK(r.t == 0.0125);
    CHECK(r.residual == doctest::Approx((std::exp(r.t) - 1.0) / r.t - 1.0).epsilon(1e-6));
    CHECK(r.residual == doctest::Approx(0.00626).epsilon(1e-3));
    CHECK(first_order_decay(rows));

    // f = z^2, g = 0: residual |e^{-2t} - 1 + 2t| / t * ||z^2||_{H2}, and ||z^2||_{H2} = 1
    const auto sq = generator_consistency(with_g(c(0.0)), poly({0.0, 0.0, 1.0}), H2Norm{}, ts);
    for (const auto& row : sq) {
        const double want = std::abs(std::exp(-2.0 * row.t) - 1.0 + 2.0 * row.t) / row.t;
        CHECK(row.residual == doctest::Approx(want).epsilon(1e-4));
    }

    // trivial semigroup: the residual vanishes identically
    const auto zero = generator_consistency({FlowModel::ode(c(0.0)), WeightSpec::none()}, poly({0.0, 0.0, 1.0}),
                                            H2Norm{}, ts);
    for (const auto& row : zero) CHECK(row.residual == 0.0);
    CHECK(first_order_decay(zero));
}

TEST_CASE("consistency in the grid Bloch norm") {
    const auto grid = GridSpec::polar({0.0, 0.5, 0.9}, 32);
    const auto rows = generator_consistency(with_g(c(1.0)), poly({0.0, 0.0, 1.0}), BlochGridNorm{grid},
                                            default_time_ladder(5));
    CHECK(first_order_decay(rows));
}

TEST_CASE("ladder validation") {
    const std::vector<double> up{0.01, 0.02};
    CHECK_THROWS_AS(generator_consistency(with_g(c(0.0)), z(), H2Norm{}, up), InvalidArgument);
}

TEST_CASE("coboundary similarity") {
    const auto flow = radial();
    CHECK(coboundary_similarity_check(c(2.0), flow, poly({1.0, 3.0}), {0.2, 0.2}, 0.7) <= 1e-15);
    CHECK(coboundary_similarity_check(poly({1.0, -1.0}), flow, z(), 0.5, std::log(2.0)) <= 1e-14);
    CHECK(coboundary_similarity_check(poly({1.0, -1.0}), flow, z(), 0.5, 0.0) == 0.0);
}

TEST_CASE("conformal transfer") {
    const auto id = transfer_generator(ConformalMap::identity(), c(-1.0) * z(), z());
    CHECK(std::abs(id.G(0.3) - (-0.3)) < 1e-15);
    CHECK(std::abs(id.g(0.3) - 0.3) < 1e-15);

    const cplx cc{0.0, 1.0};
    const auto tr = transfer_generator(ConformalMap::cayley(), c(cc), c(0.25));
    for (cplx p : {cplx(0.0), cplx(0.5, 0.2), cplx(-0.3, -0.7)}) {
        CHECK(std::abs(tr.G(p) - cc * (1.0 - p) * (1.0 - p) / 2.0) < 1e-10);
        CHECK(tr.g(p) == cplx(0.25));
    }

    const WeightedSemigroup wsg{radial(), WeightSpec::weight(z())};
    CHECK(transfer_conjugation_check(ConformalMap::identity(), wsg, z(), 0.3, 0.5) <= 1e-12);
    CHECK(transfer_conjugation_check(ConformalMap::cayley(), wsg, z(), 0.3, 0.5) <= 1e-9);
    CHECK(transfer_conjugation_check(ConformalMap::cayley(), wsg, z(), 0.3, 0.0) <= 1e-14);
}

TEST_CASE("orbit integrals of non-constant weights are nonvanishing") {
    const auto lg = corpus::flows()[2].value;
    for (double t : {0.5, 3.0, 10.0}) CHECK(std::abs(cocycle_eval(with_g(poly({0.0, 3.0, -2.0}), lg), {0.5, 0.4}, t)) > 0.0);
}
