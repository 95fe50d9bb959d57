#include "semiflow/blaschke.hpp"

#include "semiflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace semiflow {

namespace {

cplx unimodular_of(cplx a) { return a == cplx(0.0) ? cplx(-1.0) : std::abs(a) / a; }

// Taylor coefficients of b_a(z + eps) in eps, up to eps^order.
void factor_jet(cplx a, cplx z, int order, std::vector<cplx>& out) {
    const cplx u = unimodular_of(a);
    const cplx den = 1.0 - std::conj(a) * z;
    const cplx q = std::conj(a) / den;
    const cplx az = a - z;
    out.assign(order + 1, 0.0);
    out[0] = u * az / den;
    cplx qpow_prev = 1.0;  // q^{j-1}
    for (int j = 1; j <= order; ++j) {
        const cplx qpow = qpow_prev * q;
        out[j] = u * (az * qpow - qpow_prev) / den;
        qpow_prev = qpow;
    }
}

}  // namespace

void BlaschkeProduct::validate() const {
    for (auto a : zeros)
        if (!(std::abs(a) < 1.0)) throw InvalidArgument("Blaschke zero outside the open unit disc");
    if (!(tail_mass >= 0.0)) throw InvalidArgument("negative tail mass");
}

BlaschkeProduct BlaschkeProduct::rotated(double t) const {
    // b_a(e^{-it} z) = b_{e^{it} a}(z) for a != 0, and e^{-it} b_0(z) for a = 0.
    BlaschkeProduct out{{}, theta, tail_mass};
    const cplx rot = std::polar(1.0, t);
    for (auto a : zeros) {
        if (a == cplx(0.0)) {
            out.zeros.push_back(a);
            out.theta -= t;
        } else {
            out.zeros.push_back(rot * a);
        }
    }
    return out;
}

double BlaschkeProduct::truncation_bound(cplx z) const {
    return tail_mass * 2.0 / (1.0 - std::abs(z));
}

AnalyticFn BlaschkeProduct::to_analytic() const { return AnalyticFn::blaschke(zeros, theta, 0); }

BlaschkeProduct dyadic_radial_product(int count, double theta) {
    if (count < 0 || count > 52) throw InvalidArgument("dyadic product depth must lie in [0, 52]");
    BlaschkeProduct B;
    B.theta = theta;
    for (int n = 1; n <= count; ++n) B.zeros.push_back(1.0 - std::ldexp(1.0, -n));
    B.tail_mass = std::ldexp(1.0, -count);
    return B;
}

cplx b_factor(cplx a, cplx z) {
    if (a == cplx(0.0)) return z;
    return unimodular_of(a) * (a - z) / (1.0 - std::conj(a) * z);
}

cplx blaschke_eval(const BlaschkeProduct& B, cplx z) {
    if (std::abs(z) > 1.0) throw DomainError("Blaschke product evaluated outside the closed disc");
    cplx acc = std::polar(1.0, B.theta);
    for (auto a : B.zeros) acc *= b_factor(a, z);
    return acc;
}

cplx blaschke_derivative(const BlaschkeProduct& B, cplx z) {
    if (!(std::abs(z) < 1.0)) throw DomainError("Blaschke derivative requires |z| < 1");
    return blaschke_derivative_n(B.zeros, B.theta, z, 1);
}

cplx blaschke_derivative_n(std::span<const cplx> zeros, double theta, cplx z, int order) {
    if (order == 0) {
        cplx acc = std::polar(1.0, theta);
        for (auto a : zeros) acc *= b_factor(a, z);
        return acc;
    }
    std::vector<cplx> jet(order + 1, 0.0), factor, next(order + 1);
    jet[0] = std::polar(1.0, theta);
    for (auto a : zeros) {
        factor_jet(a, z, order, factor);
        for (int k = 0; k <= order; ++k) {
            cplx s = 0.0;
            for (int j = 0; j <= k; ++j) s += jet[j] * factor[k - j];
            next[k] = s;
        }
        jet.swap(next);
    }
    double factorial = 1.0;
    for (int k = 2; k <= order; ++k) factorial *= k;
    return factorial * jet[order];
}

double pseudo_distance(cplx z, cplx w) {
    if (!(std::abs(z) < 1.0) || !(std::abs(w) < 1.0))
        throw DomainError("pseudohyperbolic distance requires points in the open disc");
    return std::abs(w - z) / std::abs(1.0 - std::conj(w) * z);
}

cplx PseudoDisc::from_local(cplx zeta) const {
    // tau_a(zeta) = (a - zeta) / (1 - conj(a) zeta) is an involution with rho(tau_a(zeta), a) = |zeta|.
    return (center - zeta) / (1.0 - std::conj(center) * zeta);
}

double pseudo_disc_separation_threshold(double radius) { return 2.0 * radius / (1.0 + radius * radius); }

InterpolationReport interpolation_delta(const BlaschkeProduct& B) { return interpolation_delta(B.zeros); }

InterpolationReport interpolation_delta(std::span<const cplx> zeros) {
    for (std::size_t i = 0; i < zeros.size(); ++i)
        for (std::size_t j = i + 1; j < zeros.size(); ++j)
            if (zeros[i] == zeros[j]) throw MultiplicityError("repeated zero in interpolation_delta");

    InterpolationReport rep;
    rep.per_zero.resize(zeros.size());
    for (std::size_t n = 0; n < zeros.size(); ++n) {
        double prod = 1.0;
        for (std::size_t k = 0; k < zeros.size(); ++k)
            if (k != n) prod *= std::abs(b_factor(zeros[k], zeros[n]));
        rep.per_zero[n] = prod;
    }
    rep.delta = zeros.empty() ? 1.0 : *std::min_element(rep.per_zero.begin(), rep.per_zero.end());
    for (std::size_t n = 0; n + 1 < zeros.size(); ++n) {
        const double ratio = (1.0 - std::abs(zeros[n + 1])) / (1.0 - std::abs(zeros[n]));
        rep.geometric_ratio = std::max(rep.geometric_ratio, ratio);
    }
    rep.interpolating = rep.delta > 0.0;
    return rep;
}

GpvReport gpv_bound_check(const BlaschkeProduct& B, std::span<const std::size_t> marked, double alpha,
                          int samples_per_disc) {
    B.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("pseudo-disc radius must lie in (0, 1)");
    if (samples_per_disc < 5) throw InvalidArgument("need at least 5 samples per disc");
    for (auto i : marked)
        if (i >= B.zeros.size()) throw InvalidArgument("marked index out of range");

    GpvReport rep;
    rep.alpha = alpha;
    rep.truncation_tail = B.tail_mass;
    rep.separation_threshold = pseudo_disc_separation_threshold(alpha);

    // hypothesis: |(B / b_{a_n})(a_n)| >= delta > 0 over the marked zeros
    rep.delta = std::numeric_limits<double>::infinity();
    for (auto i : marked) {
        double prod = 1.0;
        for (std::size_t k = 0; k < B.zeros.size(); ++k)
            if (k != i) prod *= std::abs(b_factor(B.zeros[k], B.zeros[i]));
        rep.per_zero.push_back({i, B.zeros[i], prod, 0.0});
        rep.delta = std::min(rep.delta, prod);
    }
    if (marked.empty()) rep.delta = 1.0;
    if (!(rep.delta > 0.0)) throw HypothesisError("marked zeros are not uniformly separated (delta = 0)");

    rep.disjoint = true;
    for (std::size_t i = 0; i < marked.size(); ++i) {
        for (std::size_t j = i + 1; j < marked.size(); ++j) {
            const double d = pseudo_distance(B.zeros[marked[i]], B.zeros[marked[j]]);
            rep.min_separation = std::min(rep.min_separation, d);
            if (!(d > rep.separation_threshold)) rep.disjoint = false;
        }
    }

    constexpr int kRadii = 5;
    const int angles = samples_per_disc / kRadii;
    rep.beta_hat = std::numeric_limits<double>::infinity();
    for (auto& row : rep.per_zero) {
        const PseudoDisc disc{row.zero, alpha};
        const double scale = 1.0 - std::abs(row.zero);
        double beta = std::abs(blaschke_derivative(B, row.zero)) * scale;
        for (int ri = 1; ri <= kRadii; ++ri) {
            const double s = alpha * ri / kRadii;
            for (int j = 0; j < angles; ++j) {
                const cplx zeta = std::polar(s, 2.0 * std::numbers::pi * j / angles);
                beta = std::min(beta, std::abs(blaschke_derivative(B, disc.from_local(zeta))) * scale);
            }
        }
        row.beta = beta;
        rep.beta_hat = std::min(rep.beta_hat, beta);
    }
    if (rep.per_zero.empty()) rep.beta_hat = 0.0;
    rep.success = rep.disjoint && rep.beta_hat > 0.0;
    return rep;
}

BlaschkeSum blaschke_condition_sum(std::span<const cplx> zeros, double tail_mass) {
    BlaschkeSum s;
    for (auto a : zeros) s.sum += 1.0 - std::abs(a);
    s.tail_bound = tail_mass;
    return s;
}

}  // namespace semiflow
