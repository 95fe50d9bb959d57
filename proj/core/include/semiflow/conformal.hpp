#pragma once

#include "semiflow/analytic.hpp"

#include <optional>
#include <string>

namespace semiflow {

struct NewtonOptions {
    int max_iter = 50;
    double tol = 1e-12;
};

/// Conformal map h of the disc onto a simply connected domain, with a
/// closed-form inverse when one is known and damped Newton iteration otherwise.
class ConformalMap {
public:
    using NewtonOptions = semiflow::NewtonOptions;

    static ConformalMap identity();
    /// (1 + z) / (1 - z): disc onto the right half-plane, 1 -> infinity.
    static ConformalMap cayley();
    /// (a z + b) / (c z + d) with inverse (d w - b) / (-c w + a).
    static ConformalMap mobius(cplx a, cplx b, cplx c, cplx d);
    static ConformalMap closed_form(AnalyticFn forward, AnalyticFn inverse, std::string label = "closed");
    static ConformalMap newton(AnalyticFn forward, NewtonOptions opts = {});

    const std::string& label() const { return label_; }
    const AnalyticFn& forward() const { return forward_; }
    const AnalyticFn& forward_derivative() const { return dforward_; }
    const std::optional<AnalyticFn>& inverse_fn() const { return inverse_; }
    const NewtonOptions& newton_options() const { return newton_; }

    cplx operator()(cplx z) const { return forward_.eval_extended(z); }
    cplx derivative(cplx z) const { return dforward_.eval_extended(z); }

    /// h^{-1}(w). Newton maps start from seed; throws InverseError on failure.
    cplx inverse(cplx w, cplx seed = 0.0) const;

    /// The map h^{-1}; requires a closed-form inverse.
    ConformalMap inverted() const;

private:
    ConformalMap(AnalyticFn forward, std::optional<AnalyticFn> inverse, std::string label, NewtonOptions opts);

    AnalyticFn forward_;
    AnalyticFn dforward_;
    std::optional<AnalyticFn> inverse_;
    std::string label_;
    NewtonOptions newton_;
};

}  // namespace semiflow
