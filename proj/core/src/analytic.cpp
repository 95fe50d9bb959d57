#include "semiflow/analytic.hpp"

#include "semiflow/blaschke.hpp"
#include "semiflow/errors.hpp"

#include <cmath>
#include <sstream>

namespace semiflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_guards(const std::vector<Guard>& guards, cplx z, const char* what) {
    for (const auto& g : guards) {
        if (g.contains(z)) {
            std::ostringstream os;
            os << what << ": point " << z << " lies in the guard disc around " << g.center;
            throw SingularityError(os.str());
        }
    }
}

cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

cplx ipow(cplx w, int k) {
    if (k < 0) {
        if (w == cplx(0.0)) throw SingularityError("negative power of a vanishing base");
        return 1.0 / ipow(w, -k);
    }
    cplx result = 1.0;
    while (k > 0) {
        if (k & 1) result *= w;
        w *= w;
        k >>= 1;
    }
    return result;
}

cplx eval_node(const Node& n, cplx z);

cplx eval_fn(const AnalyticFn& f, cplx z) { return eval_node(f.node(), z); }

cplx eval_node(const Node& n, cplx z) {
    return std::visit(
        overloaded{
            [](const expr::Constant& c) { return c.value; },
            [z](const expr::Identity&) { return z; },
            [z](const expr::Polynomial& p) { return horner(p.coeffs, z); },
            [z](const expr::Mobius& m) {
                const cplx den = m.c * z + m.d;
                if (den == cplx(0.0)) throw SingularityError("Mobius pole");
                return (m.a * z + m.b) / den;
            },
            [z](const expr::Exp& e) { return std::exp(eval_fn(e.arg, z)); },
            [z](const expr::Log& l) {
                check_guards(l.guards, z, "Log");
                const cplx w = eval_fn(l.arg, z);
                if (w == cplx(0.0)) throw SingularityError("Log of zero");
                return l.base_log + std::log(w / l.base_value);
            },
            [z](const expr::Sum& s) {
                cplx acc = 0.0;
                for (const auto& t : s.terms) acc += eval_fn(t, z);
                return acc;
            },
            [z](const expr::Product& p) {
                cplx acc = 1.0;
                for (const auto& f : p.factors) acc *= eval_fn(f, z);
                return acc;
            },
            [z](const expr::Quotient& q) {
                check_guards(q.guards, z, "Quotient");
                const cplx den = eval_fn(q.den, z);
                if (den == cplx(0.0)) throw SingularityError("Quotient denominator vanishes");
                return eval_fn(q.num, z) / den;
            },
            [z](const expr::Compose& c) { return eval_fn(c.outer, eval_fn(c.inner, z)); },
            [z](const expr::Power& p) { return ipow(eval_fn(p.base, z), p.exponent); },
            [z](const expr::Blaschke& b) {
                return blaschke_derivative_n(*b.zeros, b.theta, z, b.order);
            },
        },
        n.v);
}

AnalyticFn derive(const AnalyticFn& f) {
    return std::visit(
        overloaded{
            [](const expr::Constant&) { return AnalyticFn::constant(0.0); },
            [](const expr::Identity&) { return AnalyticFn::constant(1.0); },
            [](const expr::Polynomial& p) {
                std::vector<cplx> d;
                for (std::size_t k = 1; k < p.coeffs.size(); ++k)
                    d.push_back(static_cast<double>(k) * p.coeffs[k]);
                return AnalyticFn::polynomial(std::move(d));
            },
            [](const expr::Mobius& m) {
                // (ad - bc) / (cz + d)^2
                return AnalyticFn::quotient(
                    AnalyticFn::constant(m.a * m.d - m.b * m.c),
                    AnalyticFn::power(AnalyticFn::polynomial({m.d, m.c}), 2));
            },
            [&f](const expr::Exp& e) { return f * e.arg.derivative(); },
            [](const expr::Log& l) {
                return AnalyticFn::quotient(l.arg.derivative(), l.arg, l.guards);
            },
            [](const expr::Sum& s) {
                std::vector<AnalyticFn> d;
                d.reserve(s.terms.size());
                for (const auto& t : s.terms) d.push_back(t.derivative());
                return AnalyticFn::sum(std::move(d));
            },
            [](const expr::Product& p) {
                std::vector<AnalyticFn> terms;
                for (std::size_t i = 0; i < p.factors.size(); ++i) {
                    std::vector<AnalyticFn> fs;
                    for (std::size_t j = 0; j < p.factors.size(); ++j)
                        fs.push_back(i == j ? p.factors[j].derivative() : p.factors[j]);
                    terms.push_back(AnalyticFn::product(std::move(fs)));
                }
                return AnalyticFn::sum(std::move(terms));
            },
            [](const expr::Quotient& q) {
                auto num = q.num.derivative() * q.den - q.num * q.den.derivative();
                return AnalyticFn::quotient(std::move(num), AnalyticFn::power(q.den, 2), q.guards);
            },
            [](const expr::Compose& c) {
                return AnalyticFn::compose(c.outer.derivative(), c.inner) * c.inner.derivative();
            },
            [](const expr::Power& p) {
                if (p.exponent == 0) return AnalyticFn::constant(0.0);
                return AnalyticFn::product({AnalyticFn::constant(static_cast<double>(p.exponent)),
                                            AnalyticFn::power(p.base, p.exponent - 1),
                                            p.base.derivative()});
            },
            [](const expr::Blaschke& b) {
                return AnalyticFn::blaschke(*b.zeros, b.theta, b.order + 1);
            },
        },
        f.node().v);
}

void print(std::ostream& os, const AnalyticFn& f);

void print_list(std::ostream& os, const char* name, const std::vector<AnalyticFn>& fs) {
    os << name << '(';
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (i) os << ", ";
        print(os, fs[i]);
    }
    os << ')';
}

void print(std::ostream& os, const AnalyticFn& f) {
    std::visit(overloaded{
                   [&](const expr::Constant& c) { os << c.value; },
                   [&](const expr::Identity&) { os << 'z'; },
                   [&](const expr::Polynomial& p) {
                       os << "poly[";
                       for (std::size_t i = 0; i < p.coeffs.size(); ++i) os << (i ? "," : "") << p.coeffs[i];
                       os << ']';
                   },
                   [&](const expr::Mobius& m) {
                       os << "mobius(" << m.a << ',' << m.b << ',' << m.c << ',' << m.d << ')';
                   },
                   [&](const expr::Exp& e) { os << "exp("; print(os, e.arg); os << ')'; },
                   [&](const expr::Log& l) { os << "log("; print(os, l.arg); os << ')'; },
                   [&](const expr::Sum& s) { print_list(os, "sum", s.terms); },
                   [&](const expr::Product& p) { print_list(os, "prod", p.factors); },
                   [&](const expr::Quotient& q) {
                       os << "quot("; print(os, q.num); os << ", "; print(os, q.den); os << ')';
                   },
                   [&](const expr::Compose& c) {
                       print(os, c.outer); os << " o "; print(os, c.inner);
                   },
                   [&](const expr::Power& p) { os << "pow("; print(os, p.base); os << ',' << p.exponent << ')'; },
                   [&](const expr::Blaschke& b) {
                       os << "blaschke[" << b.zeros->size() << " zeros";
                       if (b.order) os << ", d^" << b.order;
                       os << ']';
                   },
               },
               f.node().v);
}

}  // namespace

AnalyticFn::AnalyticFn() : node_(std::make_shared<const Node>(Node{expr::Constant{0.0}})) {}

AnalyticFn AnalyticFn::constant(cplx c) {
    if (!finite(c)) throw InvalidArgument("non-finite constant");
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Constant{c}}));
}

AnalyticFn AnalyticFn::identity() {
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Identity{}}));
}

AnalyticFn AnalyticFn::polynomial(std::vector<cplx> coeffs) {
    for (auto c : coeffs)
        if (!finite(c)) throw InvalidArgument("non-finite polynomial coefficient");
    while (!coeffs.empty() && coeffs.back() == cplx(0.0)) coeffs.pop_back();
    if (coeffs.empty()) return constant(0.0);
    if (coeffs.size() == 1) return constant(coeffs[0]);
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Polynomial{std::move(coeffs)}}));
}

AnalyticFn AnalyticFn::mobius(cplx a, cplx b, cplx c, cplx d) {
    if (a * d - b * c == cplx(0.0)) throw InvalidArgument("Mobius map requires ad - bc != 0");
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Mobius{a, b, c, d}}));
}

AnalyticFn AnalyticFn::exp(AnalyticFn arg) {
    if (const auto* c = std::get_if<expr::Constant>(&arg.node().v)) return constant(std::exp(c->value));
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Exp{std::move(arg)}}));
}

AnalyticFn AnalyticFn::log(AnalyticFn arg, cplx base_point, std::vector<Guard> guards) {
    const cplx base_value = arg.eval_extended(base_point);
    if (base_value == cplx(0.0)) throw InvalidArgument("Log branch base point is a zero of its argument");
    const cplx base_log = std::log(base_value);
    return AnalyticFn(std::make_shared<const Node>(
        Node{expr::Log{std::move(arg), base_point, base_value, base_log, std::move(guards)}}));
}

AnalyticFn AnalyticFn::sum(std::vector<AnalyticFn> terms) {
    std::vector<AnalyticFn> kept;
    cplx constant_part = 0.0;
    for (auto& t : terms) {
        if (const auto* c = std::get_if<expr::Constant>(&t.node().v))
            constant_part += c->value;
        else
            kept.push_back(std::move(t));
    }
    if (constant_part != cplx(0.0) || kept.empty()) kept.push_back(constant(constant_part));
    if (kept.size() == 1) return kept.front();
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Sum{std::move(kept)}}));
}

AnalyticFn AnalyticFn::product(std::vector<AnalyticFn> factors) {
    std::vector<AnalyticFn> kept;
    cplx scale = 1.0;
    for (auto& f : factors) {
        if (const auto* c = std::get_if<expr::Constant>(&f.node().v))
            scale *= c->value;
        else
            kept.push_back(std::move(f));
    }
    if (scale == cplx(0.0)) return constant(0.0);
    if (scale != cplx(1.0) || kept.empty()) kept.insert(kept.begin(), constant(scale));
    if (kept.size() == 1) return kept.front();
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Product{std::move(kept)}}));
}

AnalyticFn AnalyticFn::quotient(AnalyticFn num, AnalyticFn den, std::vector<Guard> guards) {
    if (den.is_zero()) throw InvalidArgument("quotient by the zero function");
    if (num.is_zero()) return constant(0.0);
    if (den.is_constant(1.0)) return num;
    return AnalyticFn(std::make_shared<const Node>(
        Node{expr::Quotient{std::move(num), std::move(den), std::move(guards)}}));
}

AnalyticFn AnalyticFn::compose(AnalyticFn outer, AnalyticFn inner) {
    if (std::holds_alternative<expr::Constant>(outer.node().v)) return outer;
    if (std::holds_alternative<expr::Identity>(outer.node().v)) return inner;
    if (std::holds_alternative<expr::Identity>(inner.node().v)) return outer;
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Compose{std::move(outer), std::move(inner)}}));
}

AnalyticFn AnalyticFn::power(AnalyticFn base, int exponent) {
    if (exponent == 0) return constant(1.0);
    if (exponent == 1) return base;
    if (const auto* c = std::get_if<expr::Constant>(&base.node().v)) return constant(ipow(c->value, exponent));
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Power{std::move(base), exponent}}));
}

AnalyticFn AnalyticFn::blaschke(std::vector<cplx> zeros, double theta, int order) {
    if (order < 0) throw InvalidArgument("negative derivative order");
    for (auto a : zeros)
        if (!(std::abs(a) < 1.0)) throw InvalidArgument("Blaschke zero outside the open disc");
    auto shared = std::make_shared<const std::vector<cplx>>(std::move(zeros));
    return AnalyticFn(std::make_shared<const Node>(Node{expr::Blaschke{std::move(shared), theta, order}}));
}

cplx AnalyticFn::operator()(cplx z) const {
    if (!(std::abs(z) < 1.0)) {
        std::ostringstream os;
        os << "evaluation point " << z << " is not in the open unit disc";
        throw DomainError(os.str());
    }
    return eval_extended(z);
}

cplx AnalyticFn::eval_extended(cplx z) const {
    const cplx w = eval_node(*node_, z);
    if (!finite(w)) {
        std::ostringstream os;
        os << "non-finite value at " << z;
        throw SingularityError(os.str());
    }
    return w;
}

AnalyticFn AnalyticFn::derivative() const { return derive(*this); }

bool AnalyticFn::is_constant(cplx c) const noexcept {
    const auto* k = std::get_if<expr::Constant>(&node_->v);
    return k && k->value == c;
}

std::string AnalyticFn::to_string() const {
    std::ostringstream os;
    print(os, *this);
    return os.str();
}

AnalyticFn operator+(const AnalyticFn& a, const AnalyticFn& b) { return AnalyticFn::sum({a, b}); }
AnalyticFn operator-(const AnalyticFn& a, const AnalyticFn& b) {
    return AnalyticFn::sum({a, AnalyticFn::product({AnalyticFn::constant(-1.0), b})});
}
AnalyticFn operator*(const AnalyticFn& a, const AnalyticFn& b) { return AnalyticFn::product({a, b}); }
AnalyticFn operator*(cplx c, const AnalyticFn& a) { return AnalyticFn::product({AnalyticFn::constant(c), a}); }

}  // namespace semiflow
