#include <doctest.h>

#include "corpus.hpp"

#include <semiflow/blaschke.hpp>
#include <semiflow/errors.hpp>

#include <cmath>
#include <numbers>

using namespace semiflow;

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
}

// product rule over the explicit factors u_m b_m, b_m(z) = (a_m - z) / (1 - conj(a_m) z)
cplx product_rule_derivative(const std::vector<cplx>& zeros, cplx p) {
    auto unit = [](cplx a) { return a == cplx(0.0) ? cplx(-1.0) : std::abs(a) / a; };
    cplx d = 0.0;
    for (std::size_t m = 0; m < zeros.size(); ++m) {
        const cplx a = zeros[m];
        cplx term = unit(a) * -(1.0 - std::norm(a)) / ((1.0 - std::conj(a) * p) * (1.0 - std::conj(a) * p));
        for (std::size_t q = 0; q < zeros.size(); ++q)
            if (q != m) term *= unit(zeros[q]) * (zeros[q] - p) / (1.0 - std::conj(zeros[q]) * p);
        d += term;
    }
    return d;
}

// min of |B'(z)| (1 - |a_k|) over a fine polar grid of the pseudo-disc
double brute_beta(const std::vector<cplx>& zeros, std::size_t k, double alpha) {
    const cplx a = zeros[k];
    double best = INFINITY;
    for (int i = 0; i <= 60; ++i) {
        for (int j = 0; j < 256; ++j) {
            const cplx zeta = std::polar(alpha * i / 60.0, 2.0 * std::numbers::pi * j / 256);
            const cplx p = (a - zeta) / (1.0 - std::conj(a) * zeta);
            best = std::min(best, std::abs(product_rule_derivative(zeros, p)) * (1.0 - std::abs(a)));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("single factors") {
    CHECK(b_factor(0.0, {0.3, 0.2}) == cplx(0.3, 0.2));
    CHECK(std::abs(b_factor({0.2, 0.4}, {0.2, 0.4})) == 0.0);
    CHECK(std::abs(b_factor(0.5, 0.0) - 0.5) < 1e-15);
}

TEST_CASE("products") {
    const BlaschkeProduct empty{{}, 0.0, 0.0};
    CHECK(blaschke_eval(empty, {0.3, 0.1}) == cplx(1.0));
    const BlaschkeProduct one{{0.5}, 0.0, 0.0};
    CHECK(std::abs(blaschke_eval(one, 0.0) - 0.5) < 1e-15);
    CHECK(std::abs(blaschke_derivative(one, 0.0) - (-0.75)) < 1e-15);
    for (const auto& [name, B] : corpus::products())
        for (cplx a : B.zeros) CHECK(std::abs(blaschke_eval(B, a)) == 0.0);
    const BlaschkeProduct turned{{0.5}, 0.7, 0.0};
    CHECK(std::abs(blaschke_eval(turned, 0.0) - std::polar(0.5, 0.7)) < 1e-15);
}

TEST_CASE("derivative at a zero equals the deflated value over 1 - |a|^2") {
    const BlaschkeProduct B{{0.0, {0.3, 0.4}, {0.0, -0.5}}, 0.0, 0.0};
    for (std::size_t k = 0; k < B.zeros.size(); ++k) {
        const cplx a = B.zeros[k];
        cplx rest = 1.0;
        for (std::size_t q = 0; q < B.zeros.size(); ++q)
            if (q != k) rest *= b_factor(B.zeros[q], a);
        const cplx unit = a == cplx(0.0) ? cplx(1.0) : -std::abs(a) / a;
        CHECK(std::abs(blaschke_derivative(B, a) - unit * rest / (1.0 - std::norm(a))) < 1e-14);
    }
}

TEST_CASE("higher derivatives from jets") {
    const std::vector<cplx> zeros{0.5};
    // B = (0.5 - z)/(1 - 0.5 z); B'' = -0.75 * 2 * 0.5 / (1 - 0.5 z)^3
    CHECK(std::abs(blaschke_derivative_n(zeros, 0.0, 0.0, 2) - (-0.75)) < 1e-14);
    CHECK(std::abs(blaschke_derivative_n(zeros, 0.0, 0.2, 1) - (-0.75 / 0.81)) < 1e-14);
}

TEST_CASE("rotation") {
    const auto B = dyadic_radial_product(5);
    const auto R = B.rotated(1.1);
    const cplx p{0.3, -0.5};
    CHECK(std::abs(blaschke_eval(R, p) - blaschke_eval(B, std::exp(cplx(0.0, -1.1)) * p)) < 1e-14);
}

TEST_CASE("pseudohyperbolic distance") {
    CHECK(pseudo_distance({0.4, 0.1}, {0.4, 0.1}) == 0.0);
    CHECK(std::abs(pseudo_distance(0.0, {0.3, -0.4}) - 0.5) < 1e-15);
    CHECK(std::abs(pseudo_distance(0.5, -0.5) - 0.8) < 1e-15);
    CHECK_THROWS_AS(pseudo_distance(1.0, 0.0), DomainError);
    const PseudoDisc D{0.5, 0.3};
    CHECK(std::abs(pseudo_distance(D.from_local({0.1, 0.2}), 0.5) - std::abs(cplx(0.1, 0.2))) < 1e-14);
}

TEST_CASE("interpolation constant") {
    CHECK(interpolation_delta(BlaschkeProduct{{0.5}, 0.0, 0.0}).delta == 1.0);
    CHECK(std::abs(interpolation_delta(BlaschkeProduct{{0.0, 0.5}, 0.0, 0.0}).delta - 0.5) < 1e-15);
    const auto rep = interpolation_delta(dyadic_radial_product(12));
    CHECK(rep.delta > 0.0);
    CHECK(rep.interpolating);
    CHECK(std::abs(rep.geometric_ratio - 0.5) < 1e-12);
    CHECK_THROWS_AS(interpolation_delta(BlaschkeProduct{{0.5, 0.5}, 0.0, 0.0}), MultiplicityError);
}

TEST_CASE("GPV bound") {
    const BlaschkeProduct one{{0.5}, 0.0, 0.0};
    const std::vector<std::size_t> first{0};
    const auto single = gpv_bound_check(one, first, 0.3);
    CHECK(single.disjoint);
    CHECK(single.beta_hat > 0.0);
    // |B'| = 0.75 / |1 - 0.5 z|^2 is smallest at the left end x of the disc: (0.5 - x) / (1 - 0.5 x) = 0.3
    const double x = 0.2 / 0.85;
    const double exact = 0.75 / ((1.0 - 0.5 * x) * (1.0 - 0.5 * x)) * 0.5;
    CHECK(single.beta_hat >= exact * (1.0 - 1e-12));
    CHECK(single.beta_hat <= exact * 1.05);

    const auto B = dyadic_radial_product(10);
    const auto marked = all_indices(10);
    const auto rep = gpv_bound_check(B, marked, 0.1);
    CHECK(rep.disjoint);
    CHECK(rep.min_separation >= 1.0 / 3.0 - 1e-12);
    CHECK(rep.beta_hat > 0.0);
    for (std::size_t n = 1; n <= 9; ++n) {
        const double a = std::ldexp(1.0, -int(n)), b = std::ldexp(1.0, -int(n) - 1);
        const double want = b / (a + b - a * b);
        CHECK(std::abs(pseudo_distance(B.zeros[n - 1], B.zeros[n]) - want) < 1e-13);
    }
    double brute = INFINITY;
    for (std::size_t k = 0; k < 10; ++k) brute = std::min(brute, brute_beta(B.zeros, k, 0.1));
    CHECK(rep.beta_hat == doctest::Approx(brute).epsilon(0.05));
    const std::vector<cplx> two{0.0, {0.3, 0.4}};
    for (cplx p : {cplx(0.1, 0.1), cplx(-0.5, 0.2)})
        CHECK(std::abs(blaschke_derivative(BlaschkeProduct{two, 0.0, 0.0}, p) - product_rule_derivative(two, p)) < 1e-14);

    const auto wide = gpv_bound_check(B, marked, 0.9);
    CHECK_FALSE(wide.disjoint);
}

TEST_CASE("Blaschke condition") {
    CHECK(blaschke_condition_sum({}).sum == 0.0);
    const auto B = dyadic_radial_product(8);
    CHECK(std::abs(blaschke_condition_sum(B.zeros).sum - (1.0 - std::ldexp(1.0, -8))) < 1e-15);
    const std::vector<cplx> twice{0.5, 0.5};
    CHECK(blaschke_condition_sum(twice).sum == 1.0);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS((BlaschkeProduct{{1.0}, 0.0, 0.0}.validate()), InvalidArgument);
    CHECK_NOTHROW(dyadic_radial_product(4).validate());
    CHECK(dyadic_radial_product(4).tail_mass == std::ldexp(1.0, -4));
}
