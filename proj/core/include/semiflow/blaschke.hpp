#pragma once

#include "semiflow/analytic.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace semiflow {

/// Finite Blaschke product e^{i theta} prod_k b_{z_k}(z).
///
/// Truncations of infinite products record the omitted Blaschke mass
/// sum_{k>N} (1 - |z_k|) in tail_mass; see truncation_bound().
struct BlaschkeProduct {
    std::vector<cplx> zeros;
    double theta = 0.0;
    double tail_mass = 0.0;

    void validate() const;

    /// B(e^{-it} z), expressed again as a product over rotated zeros.
    BlaschkeProduct rotated(double t) const;

    /// Upper bound for |B_N(z) - B(z)| given the recorded tail mass.
    double truncation_bound(cplx z) const;

    AnalyticFn to_analytic() const;
};

/// Zeros {1 - 2^{-n}}, n = 1..count, with tail mass 2^{-count}.
BlaschkeProduct dyadic_radial_product(int count, double theta = 0.0);

/// (|a|/a) (a - z) / (1 - conj(a) z), with b_0(z) = z.
cplx b_factor(cplx a, cplx z);

/// Defined for |z| <= 1.
cplx blaschke_eval(const BlaschkeProduct& B, cplx z);
cplx blaschke_derivative(const BlaschkeProduct& B, cplx z);

/// order-th derivative at z, computed from the product of the factors'
/// Taylor jets at z. Exact product-rule arithmetic, stable at the zeros.
cplx blaschke_derivative_n(std::span<const cplx> zeros, double theta, cplx z, int order);

/// rho(z, w) = |(w - z) / (1 - conj(w) z)|
double pseudo_distance(cplx z, cplx w);

/// Pseudo-disc Delta(center, radius) = { z : rho(z, center) < radius }.
struct PseudoDisc {
    cplx center;
    double radius;

    /// Point at pseudohyperbolic offset zeta (|zeta| < 1) from the center.
    cplx from_local(cplx zeta) const;
    bool contains(cplx z) const { return pseudo_distance(z, center) < radius; }
};

/// Closures of Delta(a, r) and Delta(b, r) are disjoint iff rho(a, b) > 2r / (1 + r^2).
double pseudo_disc_separation_threshold(double radius);

struct InterpolationReport {
    double delta = 1.0;                 // inf_n |(B / b_{z_n})(z_n)|
    std::vector<double> per_zero;       // |(B / b_{z_n})(z_n)|
    double geometric_ratio = 0.0;       // max_n (1 - |z_{n+1}|) / (1 - |z_n|); 0 if < 2 zeros
    bool interpolating = true;          // delta > 0
};

/// Throws MultiplicityError when a zero is repeated.
InterpolationReport interpolation_delta(const BlaschkeProduct& B);
InterpolationReport interpolation_delta(std::span<const cplx> zeros);

struct GpvZeroRow {
    std::size_t index;
    cplx zero;
    double deflated;  // |(B / b_{a_n})(a_n)|
    double beta;      // min over sampled z in Delta(a_n, alpha) of |B'(z)| (1 - |a_n|)
};

struct GpvReport {
    double delta = 0.0;
    double alpha = 0.0;
    bool disjoint = false;
    double min_separation = 1.0;        // min pairwise rho over marked zeros
    double separation_threshold = 0.0;  // 2 alpha / (1 + alpha^2)
    double beta_hat = 0.0;
    std::vector<GpvZeroRow> per_zero;
    double truncation_tail = 0.0;
    bool success = false;
};

/// Empirical check of the derivative lower bound on pseudo-discs around
/// marked zeros. Each disc is sampled on 5 concentric pseudohyperbolic
/// circles (plus its center) with samples_per_disc / 5 angles each.
/// Throws HypothesisError when some marked zero has vanishing deflated value.
GpvReport gpv_bound_check(const BlaschkeProduct& B, std::span<const std::size_t> marked,
                          double alpha, int samples_per_disc = 80);

struct BlaschkeSum {
    double sum = 0.0;
    double tail_bound = 0.0;
};

BlaschkeSum blaschke_condition_sum(std::span<const cplx> zeros, double tail_mass = 0.0);

}  // namespace semiflow
