#include "semiflow/conformal.hpp"

#include "semiflow/errors.hpp"

#include <cmath>
#include <sstream>

namespace semiflow {

ConformalMap::ConformalMap(AnalyticFn forward, std::optional<AnalyticFn> inverse, std::string label,
                           NewtonOptions opts)
    : forward_(std::move(forward)),
      dforward_(forward_.derivative()),
      inverse_(std::move(inverse)),
      label_(std::move(label)),
      newton_(opts) {}

ConformalMap ConformalMap::identity() {
    return ConformalMap(AnalyticFn::identity(), AnalyticFn::identity(), "identity", {});
}

ConformalMap ConformalMap::cayley() {
    return ConformalMap(AnalyticFn::mobius(1.0, 1.0, -1.0, 1.0), AnalyticFn::mobius(1.0, -1.0, 1.0, 1.0), "cayley",
                        {});
}

ConformalMap ConformalMap::mobius(cplx a, cplx b, cplx c, cplx d) {
    return ConformalMap(AnalyticFn::mobius(a, b, c, d), AnalyticFn::mobius(d, -b, -c, a), "mobius", {});
}

ConformalMap ConformalMap::closed_form(AnalyticFn forward, AnalyticFn inverse, std::string label) {
    return ConformalMap(std::move(forward), std::move(inverse), std::move(label), {});
}

ConformalMap ConformalMap::newton(AnalyticFn forward, NewtonOptions opts) {
    if (opts.max_iter <= 0 || !(opts.tol > 0.0)) throw InvalidArgument("Newton options must be positive");
    return ConformalMap(std::move(forward), std::nullopt, "newton", opts);
}

cplx ConformalMap::inverse(cplx w, cplx seed) const {
    if (inverse_) {
        try {
            return inverse_->eval_extended(w);
        } catch (const SingularityError& e) {
            throw InverseError(std::string("closed-form inverse failed: ") + e.what());
        }
    }
    // Damped Newton on h(z) = w; a step is halved until it stays in the disc
    // and decreases the residual.
    cplx z = seed;
    double residual = std::abs((*this)(z) - w);
    for (int it = 0; it < newton_.max_iter; ++it) {
        cplx dh;
        try {
            dh = derivative(z);
        } catch (const SingularityError&) {
            break;
        }
        if (dh == cplx(0.0)) break;
        const cplx step = ((*this)(z) - w) / dh;
        double lambda = 1.0;
        bool moved = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            const cplx trial = z - lambda * step;
            if (!(std::abs(trial) < 1.0)) continue;
            double r;
            try {
                r = std::abs((*this)(trial) - w);
            } catch (const SingularityError&) {
                continue;
            }
            if (r < residual || lambda * std::abs(step) <= newton_.tol) {
                z = trial;
                residual = r;
                moved = true;
                break;
            }
        }
        if (!moved) break;
        if (lambda * std::abs(step) <= newton_.tol) return z;
    }
    std::ostringstream os;
    os << "Newton inversion did not converge for w = " << w << " (residual " << residual << ")";
    throw InverseError(os.str());
}

ConformalMap ConformalMap::inverted() const {
    if (!inverse_) throw InvalidArgument("map has no closed-form inverse to invert");
    return ConformalMap(*inverse_, forward_, label_ + "^-1", newton_);
}

}  // namespace semiflow
