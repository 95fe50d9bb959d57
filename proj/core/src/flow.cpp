#include "semiflow/flow.hpp"

#include "semiflow/errors.hpp"
#include "semiflow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace semiflow {

namespace {

constexpr double kUnitTol = 1e-12;

OdeOptions ode_options(double tol) {
    OdeOptions o;
    o.atol = tol;
    o.rtol = tol;
    return o;
}

void check_start(const FlowModel& flow, cplx z, double t) {
    if (!(std::abs(z) < 1.0)) throw DomainError("flow evaluated at a point outside the open disc");
    if (!std::isfinite(t)) throw InvalidArgument("non-finite flow time");
    if (t < 0.0 && !flow.allows_negative_time())
        throw InvalidArgument("negative time is only defined for automorphism groups");
}

void check_inside(cplx w, double t) {
    if (!(std::abs(w) < 1.0)) {
        std::ostringstream os;
        os << "flow value " << w << " at t = " << t << " left the open disc";
        throw EscapeError(os.str());
    }
}

AnalyticFn koenigs_generator(const ConformalMap& h, cplx c, KoenigsMode mode) {
    if (c == cplx(0.0)) return AnalyticFn::constant(0.0);
    // d/dt h^{-1}(e^{-ct} h(z)) at t = 0 is -c h / h'; for h + ct it is c / h'.
    if (mode == KoenigsMode::Spiral)
        return AnalyticFn::quotient(AnalyticFn::constant(-c) * h.forward(), h.forward_derivative());
    return AnalyticFn::quotient(AnalyticFn::constant(c), h.forward_derivative());
}

struct ClosedModel {
    const ConformalMap& h;
    cplx c;
    KoenigsMode mode;
};

FlowPoint closed_form_point(const ClosedModel& m, cplx z, double t, cplx seed) {
    const cplx u = m.h(z);
    const cplx scale = m.mode == KoenigsMode::Spiral ? std::exp(-m.c * t) : cplx(1.0);
    const cplx target = m.mode == KoenigsMode::Spiral ? scale * u : u + m.c * t;
    cplx w;
    if (m.h.inverse_fn()) {
        w = m.h.inverse(target);
    } else {
        try {
            w = m.h.inverse(target, seed);
        } catch (const InverseError&) {
            // continuation in t, each solve seeded by the previous point
            bool done = false;
            for (int pieces = 2; pieces <= 64 && !done; pieces *= 2) {
                try {
                    cplx prev = z;
                    for (int k = 1; k <= pieces; ++k) {
                        const double tk = t * k / pieces;
                        const cplx tg = m.mode == KoenigsMode::Spiral ? std::exp(-m.c * tk) * u : u + m.c * tk;
                        prev = m.h.inverse(tg, prev);
                    }
                    w = prev;
                    done = true;
                } catch (const InverseError&) {
                }
            }
            if (!done) throw;
        }
    }
    if (!(std::abs(w) < 1.0)) {
        std::ostringstream os;
        os << "Koenigs inverse landed outside the disc (" << w << "); the image is not invariant";
        throw InverseError(os.str());
    }
    return {w, scale * m.h.derivative(z) / m.h.derivative(w)};
}

template <class Fn>
decltype(auto) visit_closed(const FlowModel::Spec& spec, Fn&& fn) {
    if (const auto* k = std::get_if<flowspec::Koenigs>(&spec)) return fn(ClosedModel{k->h, k->c, k->mode});
    const auto& a = std::get<flowspec::Automorphism>(spec);
    return fn(ClosedModel{a.h, a.c, a.mode});
}

FlowPoint ode_point(const flowspec::Ode& s, cplx z, double t, bool with_derivative) {
    if (t == 0.0) return {z, 1.0};
    double step = 0.0;
    const auto opt = ode_options(s.tol);
    if (!with_derivative) {
        auto rhs = [&](const OdeState<1>& y) { return OdeState<1>{s.G.eval_extended(y[0])}; };
        const auto y = integrate_dopri<1>(rhs, {z}, 0.0, t, opt, step, [](double, const OdeState<1>&) {});
        return {y[0], 0.0};
    }
    auto rhs = [&](const OdeState<2>& y) {
        return OdeState<2>{s.G.eval_extended(y[0]), s.dG.eval_extended(y[0]) * y[1]};
    };
    const auto y = integrate_dopri<2>(rhs, {z, 1.0}, 0.0, t, opt, step, [](double, const OdeState<2>&) {});
    return {y[0], y[1]};
}

FlowPoint point(const FlowModel& flow, cplx z, double t, bool with_derivative) {
    const auto& spec = flow.spec();
    FlowPoint p;
    if (const auto* o = std::get_if<flowspec::Ode>(&spec)) {
        p = ode_point(*o, z, t, with_derivative);
    } else if (const auto* r = std::get_if<flowspec::Rotated>(&spec)) {
        p = point(*r->base, r->gamma * z, t, with_derivative);
        p.value *= std::conj(r->gamma);
    } else if (t == 0.0) {
        p = {z, 1.0};
    } else {
        p = visit_closed(spec, [&](const ClosedModel& m) { return closed_form_point(m, z, t, z); });
    }
    check_inside(p.value, t);
    return p;
}

}  // namespace

const char* to_string(KoenigsMode m) { return m == KoenigsMode::Spiral ? "spiral" : "translate"; }

const char* to_string(AutomorphismKind k) {
    switch (k) {
        case AutomorphismKind::Elliptic: return "elliptic";
        case AutomorphismKind::Hyperbolic: return "hyperbolic";
        case AutomorphismKind::Parabolic: return "parabolic";
    }
    return "unknown";
}

FlowModel FlowModel::ode(AnalyticFn G, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("ODE tolerance must be positive");
    auto dG = G.derivative();
    auto gen = G;
    return FlowModel(flowspec::Ode{std::move(G), std::move(dG), tol}, std::move(gen));
}

FlowModel FlowModel::automorphism(const AutomorphismParams& p) {
    auto unimodular = [](cplx z) { return std::abs(std::abs(z) - 1.0) <= kUnitTol; };
    switch (p.kind) {
        case AutomorphismKind::Elliptic: {
            if (!(std::abs(p.center) < 1.0)) throw ModelError("elliptic center must lie in the open disc");
            if (p.omega == 0.0) throw ModelError("elliptic angular speed must be nonzero");
            // tau_a(z) = (a - z) / (1 - conj(a) z), an involution sending a to 0
            auto h = ConformalMap::mobius(-1.0, p.center, -std::conj(p.center), 1.0);
            const cplx c(0.0, -p.omega);
            auto gen = koenigs_generator(h, c, KoenigsMode::Spiral);
            return FlowModel(flowspec::Automorphism{p, h, c, KoenigsMode::Spiral}, std::move(gen));
        }
        case AutomorphismKind::Hyperbolic: {
            if (!unimodular(p.attracting) || !unimodular(p.repelling))
                throw ModelError("hyperbolic fixed points must lie on the unit circle");
            if (std::abs(p.attracting - p.repelling) < 1e-9) throw ModelError("hyperbolic fixed points coincide");
            if (!(p.rate > 0.0)) throw ModelError("hyperbolic rate must be positive");
            // S(z) = (z - p) / (z - q), S(phi_t) = e^{-rate t} S
            auto h = ConformalMap::mobius(1.0, -p.attracting, 1.0, -p.repelling);
            const cplx c(p.rate, 0.0);
            auto gen = koenigs_generator(h, c, KoenigsMode::Spiral);
            return FlowModel(flowspec::Automorphism{p, h, c, KoenigsMode::Spiral}, std::move(gen));
        }
        case AutomorphismKind::Parabolic: {
            if (!unimodular(p.fixed_point)) throw ModelError("parabolic fixed point must lie on the unit circle");
            if (p.speed == 0.0) throw ModelError("parabolic speed must be nonzero");
            // C_p(z) = (p + z) / (p - z) onto the right half-plane, p -> infinity
            auto h = ConformalMap::mobius(1.0, p.fixed_point, -1.0, p.fixed_point);
            const cplx c(0.0, p.speed);
            auto gen = koenigs_generator(h, c, KoenigsMode::Translate);
            return FlowModel(flowspec::Automorphism{p, h, c, KoenigsMode::Translate}, std::move(gen));
        }
    }
    throw ModelError("unknown automorphism kind");
}

FlowModel FlowModel::elliptic(cplx center, double omega) {
    AutomorphismParams p;
    p.kind = AutomorphismKind::Elliptic;
    p.center = center;
    p.omega = omega;
    return automorphism(p);
}

FlowModel FlowModel::hyperbolic(cplx attracting, cplx repelling, double rate) {
    AutomorphismParams p;
    p.kind = AutomorphismKind::Hyperbolic;
    p.attracting = attracting;
    p.repelling = repelling;
    p.rate = rate;
    return automorphism(p);
}

FlowModel FlowModel::parabolic(cplx fixed_point, double speed) {
    AutomorphismParams p;
    p.kind = AutomorphismKind::Parabolic;
    p.fixed_point = fixed_point;
    p.speed = speed;
    return automorphism(p);
}

double FlowModel::tol() const {
    if (const auto* o = std::get_if<flowspec::Ode>(&spec_)) return o->tol;
    if (const auto* r = std::get_if<flowspec::Rotated>(&spec_)) return r->base->tol();
    return 1e-10;
}

bool FlowModel::is_automorphism() const {
    if (std::holds_alternative<flowspec::Automorphism>(spec_)) return true;
    if (const auto* r = std::get_if<flowspec::Rotated>(&spec_)) return r->base->is_automorphism();
    return false;
}

FlowModel FlowModel::with_tol(double tol) const {
    if (const auto* o = std::get_if<flowspec::Ode>(&spec_)) return ode(o->G, tol);
    if (const auto* r = std::get_if<flowspec::Rotated>(&spec_)) return r->base->with_tol(tol).rotated(r->gamma);
    return *this;
}

FlowModel FlowModel::rotated(cplx gamma) const {
    if (std::abs(std::abs(gamma) - 1.0) > kUnitTol) throw InvalidArgument("rotation must be unimodular");
    auto gen = AnalyticFn::constant(std::conj(gamma)) *
               AnalyticFn::compose(generator_, AnalyticFn::polynomial({0.0, gamma}));
    return FlowModel(flowspec::Rotated{std::make_shared<const FlowModel>(*this), gamma}, std::move(gen));
}

FlowModel koenigs_flow(const ConformalMap& h, cplx c, KoenigsMode mode) {
    if (mode == KoenigsMode::Spiral) {
        if (c.real() < 0.0) throw ModelError("spiral Koenigs model requires Re c >= 0");
        if (std::abs(h(0.0)) > kUnitTol) throw ModelError("spiral Koenigs model requires h(0) = 0");
    }
    return FlowModel(flowspec::Koenigs{h, c, mode}, koenigs_generator(h, c, mode));
}

cplx advance(const FlowModel& flow, cplx z, double t) {
    check_start(flow, z, t);
    return point(flow, z, t, false).value;
}

cplx flow_z_derivative(const FlowModel& flow, cplx z, double t) {
    check_start(flow, z, t);
    return point(flow, z, t, true).dz;
}

FlowPoint advance_with_derivative(const FlowModel& flow, cplx z, double t) {
    check_start(flow, z, t);
    return point(flow, z, t, true);
}

std::vector<FlowPoint> sample_orbit(const FlowModel& flow, cplx z, std::span<const double> times,
                                    bool with_derivative) {
    check_start(flow, z, times.empty() ? 0.0 : times.front());
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] < times[i - 1]) throw InvalidArgument("sample_orbit: times must be nondecreasing");
    std::vector<FlowPoint> out;
    out.reserve(times.size());
    const auto& spec = flow.spec();

    if (const auto* r = std::get_if<flowspec::Rotated>(&spec)) {
        out = sample_orbit(*r->base, r->gamma * z, times, with_derivative);
        for (auto& p : out) p.value *= std::conj(r->gamma);
        return out;
    }
    if (const auto* o = std::get_if<flowspec::Ode>(&spec)) {
        if (!times.empty() && times.front() < 0.0) throw InvalidArgument("negative time for an ODE flow");
        const auto opt = ode_options(o->tol);
        double step = 0.0;
        double t = 0.0;
        auto noop = [](double, const auto&) {};
        if (with_derivative) {
            auto rhs = [&](const OdeState<2>& y) {
                return OdeState<2>{o->G.eval_extended(y[0]), o->dG.eval_extended(y[0]) * y[1]};
            };
            OdeState<2> y{z, 1.0};
            for (double ti : times) {
                y = integrate_dopri<2>(rhs, y, t, ti, opt, step, noop);
                t = ti;
                out.push_back({y[0], y[1]});
            }
        } else {
            auto rhs = [&](const OdeState<1>& y) { return OdeState<1>{o->G.eval_extended(y[0])}; };
            OdeState<1> y{z};
            for (double ti : times) {
                y = integrate_dopri<1>(rhs, y, t, ti, opt, step, noop);
                t = ti;
                out.push_back({y[0], 0.0});
            }
        }
        return out;
    }
    cplx seed = z;
    visit_closed(spec, [&](const ClosedModel& m) {
        for (double ti : times) {
            FlowPoint p = ti == 0.0 ? FlowPoint{z, 1.0} : closed_form_point(m, z, ti, seed);
            check_inside(p.value, ti);
            seed = p.value;
            out.push_back(p);
        }
        return 0;
    });
    return out;
}

std::vector<double> step_breakpoints(const FlowModel& flow, cplx z, double t, double max_width) {
    check_start(flow, z, t);
    if (!(t > 0.0)) throw InvalidArgument("step_breakpoints needs t > 0");
    const auto& spec = flow.spec();
    if (const auto* r = std::get_if<flowspec::Rotated>(&spec))
        return step_breakpoints(*r->base, r->gamma * z, t, max_width);
    std::vector<double> edges{0.0};
    if (const auto* o = std::get_if<flowspec::Ode>(&spec)) {
        double step = 0.0;
        auto rhs = [&](const OdeState<1>& y) { return OdeState<1>{o->G.eval_extended(y[0])}; };
        integrate_dopri<1>(rhs, {z}, 0.0, t, ode_options(o->tol), step,
                           [&](double s, const OdeState<1>&) { edges.push_back(s); });
        edges.back() = t;
        return edges;
    }
    const int pieces = std::max(1, static_cast<int>(std::ceil(t / max_width)));
    for (int k = 1; k <= pieces; ++k) edges.push_back(k == pieces ? t : t * k / pieces);
    return edges;
}

Trajectory trace(const FlowModel& flow, cplx z, std::span<const double> times) {
    if (times.empty() || times.front() != 0.0) throw InvalidArgument("trajectory times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw InvalidArgument("trajectory times must strictly increase");
    const auto pts = sample_orbit(flow, z, times, true);
    Trajectory out;
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({times[i], pts[i].value, pts[i].dz});
    return out;
}

double check_semigroup(const FlowModel& flow, cplx z, double s, double t) {
    const cplx direct = advance(flow, z, s + t);
    const cplx composed = advance(flow, advance(flow, z, s), t);
    return std::abs(direct - composed);
}

cplx richardson_to_zero(std::span<const double> ladder, std::span<const cplx> quotients) {
    if (ladder.empty() || ladder.size() != quotients.size())
        throw InvalidArgument("richardson: ladder and values must be nonempty and of equal length");
    // Neville's scheme evaluated at h = 0
    std::vector<cplx> p(quotients.begin(), quotients.end());
    const std::size_t n = p.size();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            const double hi = ladder[i], hj = ladder[i + level];
            p[i] = (hi * p[i + 1] - hj * p[i]) / (hi - hj);
        }
    }
    return p[0];
}

cplx generator_fd(const FlowModel& flow, cplx z, std::span<const double> h_ladder) {
    for (std::size_t i = 0; i < h_ladder.size(); ++i) {
        if (!(h_ladder[i] > 0.0)) throw InvalidArgument("generator_fd: ladder entries must be positive");
        if (i > 0 && !(h_ladder[i] < h_ladder[i - 1])) throw InvalidArgument("generator_fd: ladder must decrease");
    }
    std::vector<cplx> q;
    for (double h : h_ladder) q.push_back((advance(flow, z, h) - z) / h);
    return richardson_to_zero(h_ladder, q);
}

AutomorphismClass classify_automorphism(const FlowModel& flow, double tol) {
    using M2 = std::array<cplx, 4>;
    const cplx z1 = 0.0, z2 = 0.5, z3(0.0, -0.5);
    const cplx w1 = advance(flow, z1, 1.0), w2 = advance(flow, z2, 1.0), w3 = advance(flow, z3, 1.0);
    // cross-ratio maps sending (p1, p2, p3) to (0, 1, infinity)
    auto cross = [](cplx p1, cplx p2, cplx p3) { return M2{p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1)}; };
    const M2 tz = cross(z1, z2, z3), tw = cross(w1, w2, w3);
    const M2 tw_inv{tw[3], -tw[1], -tw[2], tw[0]};
    M2 m{tw_inv[0] * tz[0] + tw_inv[1] * tz[2], tw_inv[0] * tz[1] + tw_inv[1] * tz[3],
         tw_inv[2] * tz[0] + tw_inv[3] * tz[2], tw_inv[2] * tz[1] + tw_inv[3] * tz[3]};
    const cplx det = m[0] * m[3] - m[1] * m[2];
    if (std::abs(det) == 0.0) throw ModelError("degenerate Mobius fit");
    const cplx root = std::sqrt(det);
    for (auto& e : m) e /= root;
    auto apply = [&m](cplx z) { return (m[0] * z + m[1]) / (m[2] * z + m[3]); };

    const double fit_tol = std::max(1e-8, 100.0 * flow.tol());
    for (cplx probe : {cplx(0.3, 0.3), cplx(-0.6, 0.1), cplx(0.05, 0.7)}) {
        if (std::abs(apply(probe) - advance(flow, probe, 1.0)) > fit_tol)
            throw ModelError("phi_1 is not a Mobius map within tolerance");
    }
    for (int j = 0; j < 8; ++j) {
        const cplx u = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / 8);
        if (std::abs(std::abs(apply(u)) - 1.0) > fit_tol) throw ModelError("phi_1 does not preserve the unit circle");
    }
    if (std::abs(m[1]) <= tol && std::abs(m[2]) <= tol && std::abs(m[0] - m[3]) <= tol)
        throw ModelError("phi_1 is the identity; the flow is trivial");

    AutomorphismClass out;
    out.mobius = m;
    out.discriminant = (m[0] + m[3]) * (m[0] + m[3]) - 4.0;
    const cplx a = m[0], b = m[1], c = m[2], d = m[3];
    if (std::abs(c) <= tol) {
        // affine: fixed points b / (d - a) and infinity
        out.fixed_points.push_back(b / (d - a));
        out.kind = AutomorphismKind::Elliptic;
        return out;
    }
    if (std::abs(out.discriminant) <= tol) {
        out.fixed_points.push_back((a - d) / (2.0 * c));
        out.kind = AutomorphismKind::Parabolic;
        return out;
    }
    const cplx sq = std::sqrt(out.discriminant);
    const cplx f1 = (a - d + sq) / (2.0 * c), f2 = (a - d - sq) / (2.0 * c);
    out.fixed_points = {f1, f2};
    const double on_circle = 1e-6;
    const bool both_boundary =
        std::abs(std::abs(f1) - 1.0) <= on_circle && std::abs(std::abs(f2) - 1.0) <= on_circle;
    out.kind = both_boundary ? AutomorphismKind::Hyperbolic : AutomorphismKind::Elliptic;
    return out;
}

std::vector<double> dyadic_ladder(int first, int last) {
    if (first < 1 || last > 52 || first > last) throw InvalidArgument("dyadic ladder exponents out of range");
    std::vector<double> out;
    for (int j = first; j <= last; ++j) out.push_back(1.0 - std::ldexp(1.0, -j));
    return out;
}

BoundaryOrbit boundary_orbit(const FlowModel& flow, cplx gamma0, double t, std::span<const double> r_ladder) {
    if (!(t > 0.0)) throw InvalidArgument("boundary_orbit needs t > 0");
    if (std::abs(std::abs(gamma0) - 1.0) > kUnitTol) throw InvalidArgument("boundary point must be unimodular");
    if (r_ladder.size() < 2) throw InvalidArgument("boundary_orbit needs at least two radii");
    for (std::size_t i = 0; i < r_ladder.size(); ++i) {
        if (!(r_ladder[i] >= 0.0 && r_ladder[i] < 1.0)) throw InvalidArgument("ladder radius outside [0, 1)");
        if (i > 0 && !(r_ladder[i] > r_ladder[i - 1])) throw InvalidArgument("ladder must increase");
    }
    BoundaryOrbit out;
    for (double r : r_ladder) out.values.push_back(advance(flow, r * gamma0, t));
    const std::size_t n = out.values.size();
    const cplx v1 = out.values[n - 1], v0 = out.values[n - 2];
    const double e1 = 1.0 - r_ladder[n - 1], e0 = 1.0 - r_ladder[n - 2];
    out.limit = v1 + (v1 - v0) * (e1 / (e0 - e1));
    out.last_increment = std::abs(v1 - v0);
    out.converged = out.last_increment < 1e-6;
    out.inside = std::abs(out.limit) < 1.0 - 1e-6;
    if (!out.converged) {
        std::ostringstream os;
        os << "radial limit did not settle (last increment " << out.last_increment << ")";
        throw NoConvergence(os.str());
    }
    return out;
}

}  // namespace semiflow
