#include "semiflow/json_io.hpp"

#include "semiflow/errors.hpp"

#include <string>

namespace semiflow {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

const json& field(const json& j, const char* key) {
    if (!j.is_object()) bad(std::string("expected an object holding '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) bad(std::string("missing field '") + key + "'");
    return *it;
}

double number(const json& j, const char* what) {
    if (!j.is_number()) bad(std::string(what) + " must be a number");
    return j.get<double>();
}

std::string text(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<cplx> complex_list(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + " must be an array");
    std::vector<cplx> out;
    for (const auto& v : j) out.push_back(complex_from_json(v));
    return out;
}

std::vector<Guard> guards_from_json(const json& j) {
    std::vector<Guard> out;
    auto it = j.find("guards");
    if (it == j.end()) return out;
    if (!it->is_array()) bad("guards must be an array");
    for (const auto& g : *it)
        out.push_back({complex_from_json(field(g, "center")), g.contains("radius") ? number(g["radius"], "guard radius") : 0.0});
    return out;
}

json guards_to_json(const std::vector<Guard>& gs) {
    json out = json::array();
    for (const auto& g : gs) out.push_back({{"center", complex_to_json(g.center)}, {"radius", g.radius}});
    return out;
}

std::vector<AnalyticFn> fn_list(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_array()) bad(std::string("field '") + key + "' must be an array");
    std::vector<AnalyticFn> out;
    for (const auto& e : v) out.push_back(analytic_from_json(e));
    return out;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    bad("complex values are numbers or [re, im] pairs, got " + j.dump());
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

AnalyticFn analytic_from_json(const json& j) {
    const std::string op = text(j, "op");
    try {
        if (op == "const") return AnalyticFn::constant(complex_from_json(field(j, "value")));
        if (op == "id") return AnalyticFn::identity();
        if (op == "poly") return AnalyticFn::polynomial(complex_list(field(j, "coeffs"), "coeffs"));
        if (op == "mobius")
            return AnalyticFn::mobius(complex_from_json(field(j, "a")), complex_from_json(field(j, "b")),
                                      complex_from_json(field(j, "c")), complex_from_json(field(j, "d")));
        if (op == "exp") return AnalyticFn::exp(analytic_from_json(field(j, "arg")));
        if (op == "log")
            return AnalyticFn::log(analytic_from_json(field(j, "arg")),
                                   j.contains("base") ? complex_from_json(j["base"]) : cplx(0.0), guards_from_json(j));
        if (op == "sum") return AnalyticFn::sum(fn_list(j, "terms"));
        if (op == "product") return AnalyticFn::product(fn_list(j, "factors"));
        if (op == "quotient")
            return AnalyticFn::quotient(analytic_from_json(field(j, "num")), analytic_from_json(field(j, "den")),
                                        guards_from_json(j));
        if (op == "compose")
            return AnalyticFn::compose(analytic_from_json(field(j, "outer")), analytic_from_json(field(j, "inner")));
        if (op == "power") {
            const auto& e = field(j, "exponent");
            if (!e.is_number_integer()) bad("power exponent must be an integer");
            return AnalyticFn::power(analytic_from_json(field(j, "base")), e.get<int>());
        }
        if (op == "blaschke") {
            const auto B = blaschke_from_json(j);
            return AnalyticFn::blaschke(B.zeros, B.theta, j.contains("order") ? j["order"].get<int>() : 0);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        bad("invalid '" + op + "' node: " + e.what());
    } catch (const json::exception& e) {
        bad("invalid '" + op + "' node: " + e.what());
    }
    bad("unknown function op '" + op + "'");
}

json analytic_to_json(const AnalyticFn& f) {
    return std::visit(
        overloaded{
            [](const expr::Constant& c) { return json{{"op", "const"}, {"value", complex_to_json(c.value)}}; },
            [](const expr::Identity&) { return json{{"op", "id"}}; },
            [](const expr::Polynomial& p) {
                json cs = json::array();
                for (cplx c : p.coeffs) cs.push_back(complex_to_json(c));
                return json{{"op", "poly"}, {"coeffs", cs}};
            },
            [](const expr::Mobius& m) {
                return json{{"op", "mobius"},
                            {"a", complex_to_json(m.a)},
                            {"b", complex_to_json(m.b)},
                            {"c", complex_to_json(m.c)},
                            {"d", complex_to_json(m.d)}};
            },
            [](const expr::Exp& e) { return json{{"op", "exp"}, {"arg", analytic_to_json(e.arg)}}; },
            [](const expr::Log& l) {
                return json{{"op", "log"},
                            {"arg", analytic_to_json(l.arg)},
                            {"base", complex_to_json(l.base)},
                            {"guards", guards_to_json(l.guards)}};
            },
            [](const expr::Sum& s) {
                json ts = json::array();
                for (const auto& t : s.terms) ts.push_back(analytic_to_json(t));
                return json{{"op", "sum"}, {"terms", ts}};
            },
            [](const expr::Product& p) {
                json fs = json::array();
                for (const auto& t : p.factors) fs.push_back(analytic_to_json(t));
                return json{{"op", "product"}, {"factors", fs}};
            },
            [](const expr::Quotient& q) {
                return json{{"op", "quotient"},
                            {"num", analytic_to_json(q.num)},
                            {"den", analytic_to_json(q.den)},
                            {"guards", guards_to_json(q.guards)}};
            },
            [](const expr::Compose& c) {
                return json{{"op", "compose"}, {"outer", analytic_to_json(c.outer)}, {"inner", analytic_to_json(c.inner)}};
            },
            [](const expr::Power& p) {
                return json{{"op", "power"}, {"base", analytic_to_json(p.base)}, {"exponent", p.exponent}};
            },
            [](const expr::Blaschke& b) {
                json zs = json::array();
                for (cplx z : *b.zeros) zs.push_back(complex_to_json(z));
                return json{{"op", "blaschke"}, {"zeros", zs}, {"theta", b.theta}, {"order", b.order}};
            },
        },
        f.node().v);
}

GridSpec grid_from_json(const json& j) {
    GridSpec g;
    const auto& radii = field(j, "radii");
    if (!radii.is_array()) bad("grid radii must be an array");
    for (const auto& r : radii) g.radii.push_back(number(r, "grid radius"));
    const auto& ang = field(j, "angular");
    if (ang.is_number_integer()) {
        g.angular.assign(g.radii.size(), ang.get<int>());
    } else if (ang.is_array()) {
        for (const auto& a : ang) {
            if (!a.is_number_integer()) bad("angular counts must be integers");
            g.angular.push_back(a.get<int>());
        }
    } else {
        bad("grid angular must be an integer or an array of integers");
    }
    if (j.contains("points")) g.points = complex_list(j["points"], "grid points");
    try {
        g.validate();
    } catch (const Error& e) {
        bad(std::string("invalid grid: ") + e.what());
    }
    return g;
}

json grid_to_json(const GridSpec& g) {
    json pts = json::array();
    for (cplx p : g.points) pts.push_back(complex_to_json(p));
    return json{{"radii", g.radii}, {"angular", g.angular}, {"points", pts}};
}

ConformalMap map_from_json(const json& j) {
    const std::string type = text(j, "type");
    try {
        if (type == "identity") return ConformalMap::identity();
        if (type == "cayley") return ConformalMap::cayley();
        if (type == "mobius")
            return ConformalMap::mobius(complex_from_json(field(j, "a")), complex_from_json(field(j, "b")),
                                        complex_from_json(field(j, "c")), complex_from_json(field(j, "d")));
        if (type == "closed")
            return ConformalMap::closed_form(analytic_from_json(field(j, "forward")),
                                             analytic_from_json(field(j, "inverse")));
        if (type == "newton") {
            NewtonOptions opt;
            if (j.contains("max_iter")) opt.max_iter = j["max_iter"].get<int>();
            if (j.contains("tol")) opt.tol = number(j["tol"], "newton tol");
            if (opt.max_iter <= 0 || !(opt.tol > 0.0)) bad("newton options must be positive");
            return ConformalMap::newton(analytic_from_json(field(j, "forward")), opt);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        bad("invalid '" + type + "' map: " + e.what());
    }
    bad("unknown map type '" + type + "'");
}

FlowModel flow_from_json(const json& j) {
    const std::string type = text(j, "type");
    try {
        if (type == "ode") {
            const double tol = j.contains("tol") ? number(j["tol"], "ode tol") : 1e-10;
            if (!(tol > 0.0)) bad("ode tol must be positive");
            return FlowModel::ode(analytic_from_json(field(j, "G")), tol);
        }
        if (type == "koenigs") {
            const std::string mode = text(j, "mode");
            if (mode != "spiral" && mode != "translate") bad("koenigs mode must be 'spiral' or 'translate'");
            return koenigs_flow(map_from_json(field(j, "h")), complex_from_json(field(j, "c")),
                                mode == "spiral" ? KoenigsMode::Spiral : KoenigsMode::Translate);
        }
        if (type == "automorphism") {
            const std::string kind = text(j, "kind");
            if (kind == "elliptic")
                return FlowModel::elliptic(j.contains("center") ? complex_from_json(j["center"]) : cplx(0.0),
                                           number(field(j, "omega"), "omega"));
            if (kind == "hyperbolic")
                return FlowModel::hyperbolic(complex_from_json(field(j, "attracting")),
                                             complex_from_json(field(j, "repelling")), number(field(j, "rate"), "rate"));
            if (kind == "parabolic")
                return FlowModel::parabolic(complex_from_json(field(j, "fixed_point")),
                                            number(field(j, "speed"), "speed"));
            bad("unknown automorphism kind '" + kind + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        bad("invalid '" + type + "' flow: " + e.what());
    }
    bad("unknown flow type '" + type + "'");
}

WeightSpec weight_from_json(const json& j) {
    const std::string type = text(j, "type");
    if (type == "none") return WeightSpec::none();
    if (type == "weight") return WeightSpec::weight(analytic_from_json(field(j, "g")));
    if (type == "coboundary") {
        std::optional<cplx> fp;
        if (j.contains("fixed_point") && !j["fixed_point"].is_null()) fp = complex_from_json(j["fixed_point"]);
        try {
            return WeightSpec::coboundary(analytic_from_json(field(j, "alpha")), fp);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            bad(std::string("invalid coboundary: ") + e.what());
        }
    }
    bad("unknown weight type '" + type + "'");
}

BlaschkeProduct blaschke_from_json(const json& j) {
    const double theta = j.contains("theta") ? number(j["theta"], "theta") : 0.0;
    BlaschkeProduct B;
    if (j.contains("dyadic")) {
        const auto& n = j["dyadic"];
        if (!n.is_number_integer() || n.get<int>() < 0) bad("dyadic count must be a nonnegative integer");
        B = dyadic_radial_product(n.get<int>(), theta);
    } else {
        B.zeros = complex_list(field(j, "zeros"), "zeros");
        B.theta = theta;
        if (j.contains("tail_mass")) B.tail_mass = number(j["tail_mass"], "tail_mass");
    }
    try {
        B.validate();
    } catch (const Error& e) {
        bad(std::string("invalid Blaschke product: ") + e.what());
    }
    return B;
}

json blaschke_to_json(const BlaschkeProduct& B) {
    json zs = json::array();
    for (cplx z : B.zeros) zs.push_back(complex_to_json(z));
    return json{{"zeros", zs}, {"theta", B.theta}, {"tail_mass", B.tail_mass}};
}

json gpv_report_to_json(const GpvReport& r) {
    json rows = json::array();
    for (const auto& z : r.per_zero)
        rows.push_back({{"index", z.index}, {"zero", complex_to_json(z.zero)}, {"deflated", z.deflated}, {"beta", z.beta}});
    return json{{"delta", r.delta},
                {"alpha", r.alpha},
                {"disjoint", r.disjoint},
                {"min_separation", r.min_separation},
                {"separation_threshold", r.separation_threshold},
                {"beta_hat", r.beta_hat},
                {"per_zero", rows},
                {"truncation_tail", r.truncation_tail},
                {"success", r.success}};
}

}  // namespace semiflow
