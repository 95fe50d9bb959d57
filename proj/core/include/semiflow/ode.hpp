#pragma once

#include "semiflow/analytic.hpp"
#include "semiflow/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>

namespace semiflow {

template <std::size_t K>
using OdeState = std::array<cplx, K>;

struct OdeOptions {
    double atol = 1e-10;
    double rtol = 1e-10;
    std::size_t max_steps = 1'000'000;
    /// Component 0 is a point of the disc; reaching this modulus aborts.
    double escape_radius = 1.0 - 1e-12;
};

namespace detail {

template <std::size_t K>
OdeState<K> axpy(const OdeState<K>& y, double h, std::initializer_list<std::pair<double, const OdeState<K>*>> terms) {
    OdeState<K> out = y;
    for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < K; ++i) out[i] += h * c * (*k)[i];
    return out;
}

template <std::size_t K>
double error_norm(const OdeState<K>& err, const OdeState<K>& y0, const OdeState<K>& y1, const OdeOptions& opt) {
    double acc = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double e = std::abs(err[i]) / sc;
        acc += e * e;
    }
    return std::sqrt(acc / K);
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(y) on [t0, t1].
///
/// step is the initial step size (0 selects one) and on return holds the
/// proposed next step, so sequential calls can continue a trajectory.
/// on_accept(t, y) is invoked after every accepted step.
template <std::size_t K, class Rhs, class OnAccept>
OdeState<K> integrate_dopri(const Rhs& rhs, OdeState<K> y, double t0, double t1, const OdeOptions& opt,
                            double& step, OnAccept&& on_accept) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (!(t1 >= t0)) throw InvalidArgument("integrate_dopri: t1 must not precede t0");
    if (t1 == t0) return y;

    OdeState<K> k1 = rhs(y);
    double t = t0;
    double h = step;
    if (!(h > 0.0)) {
        // Hairer's starting-step heuristic
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d0 += std::norm(y[i]) / (sc * sc);
            d1 += std::norm(k1[i]) / (sc * sc);
        }
        d0 = std::sqrt(d0 / K);
        d1 = std::sqrt(d1 / K);
        const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        const OdeState<K> y1 = detail::axpy<K>(y, h0, {{1.0, &k1}});
        const OdeState<K> f1 = rhs(y1);
        double d2 = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d2 += std::norm(f1[i] - k1[i]) / (sc * sc);
        }
        d2 = std::sqrt(d2 / K) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min(100.0 * h0, h1);
    }

    std::size_t steps = 0;
    bool last_rejected = false;
    while (t < t1) {
        if (++steps > opt.max_steps) throw NoConvergence("integrate_dopri: step budget exhausted");
        if (h < 1e-15 * std::max(1.0, std::abs(t))) throw NoConvergence("integrate_dopri: step size underflow");
        const bool final_step = t + h >= t1;
        const double hh = final_step ? t1 - t : h;

        const OdeState<K> k2 = rhs(detail::axpy<K>(y, hh, {{a21, &k1}}));
        const OdeState<K> k3 = rhs(detail::axpy<K>(y, hh, {{a31, &k1}, {a32, &k2}}));
        const OdeState<K> k4 = rhs(detail::axpy<K>(y, hh, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const OdeState<K> k5 = rhs(detail::axpy<K>(y, hh, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const OdeState<K> k6 =
            rhs(detail::axpy<K>(y, hh, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const OdeState<K> ynew =
            detail::axpy<K>(y, hh, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const OdeState<K> k7 = rhs(ynew);

        OdeState<K> err{};
        for (std::size_t i = 0; i < K; ++i)
            err[i] = hh * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double en = detail::error_norm<K>(err, y, ynew, opt);

        if (en <= 1.0) {
            t = final_step ? t1 : t + hh;
            y = ynew;
            k1 = k7;
            if (!(std::abs(y[0]) < opt.escape_radius)) {
                std::ostringstream os;
                os << "orbit reached |w| = " << std::abs(y[0]) << " at t = " << t;
                throw EscapeError(os.str());
            }
            on_accept(t, y);
            double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            // keep the proposal from a clipped final step
            if (!final_step || hh >= h) h = hh * fac;
            last_rejected = false;
        } else {
            h = hh * std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0);
            last_rejected = true;
        }
    }
    step = h;
    return y;
}

}  // namespace semiflow
