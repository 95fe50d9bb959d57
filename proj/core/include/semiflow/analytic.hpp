#pragma once

#include <complex>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace semiflow {

using cplx = std::complex<double>;

/// Closed disc excluded from the domain of a Quotient or Log node.
/// A radius of zero excludes exactly the center.
struct Guard {
    cplx center{};
    double radius = 0.0;

    bool contains(cplx z) const noexcept {
        return radius > 0.0 ? std::abs(z - center) <= radius : z == center;
    }
};

struct Node;

/// Immutable expression tree for a function analytic on the unit disc.
///
/// Trees are shared by pointer; copying an AnalyticFn is cheap and never
/// deep-copies. Evaluation through operator() enforces |z| < 1, while
/// eval_extended() evaluates the same formula at any point of the plane
/// (used when a tree describes a map into another domain, e.g. the Cayley
/// transform, or a generator evaluated at an off-disc Runge-Kutta stage).
class AnalyticFn {
public:
    AnalyticFn();  // Constant(0)

    static AnalyticFn constant(cplx c);
    static AnalyticFn identity();
    static AnalyticFn polynomial(std::vector<cplx> coeffs);
    /// (a z + b) / (c z + d); requires ad - bc != 0.
    static AnalyticFn mobius(cplx a, cplx b, cplx c, cplx d);
    static AnalyticFn exp(AnalyticFn arg);
    /// Branch of log(arg) continuous near arg(base_point), principal relative to it.
    static AnalyticFn log(AnalyticFn arg, cplx base_point, std::vector<Guard> guards = {});
    static AnalyticFn sum(std::vector<AnalyticFn> terms);
    static AnalyticFn product(std::vector<AnalyticFn> factors);
    static AnalyticFn quotient(AnalyticFn num, AnalyticFn den, std::vector<Guard> guards = {});
    /// outer(inner(z))
    static AnalyticFn compose(AnalyticFn outer, AnalyticFn inner);
    static AnalyticFn power(AnalyticFn base, int exponent);
    /// order-th derivative of the finite Blaschke product with the given zeros and phase.
    static AnalyticFn blaschke(std::vector<cplx> zeros, double theta, int order = 0);

    const Node& node() const noexcept { return *node_; }

    /// Value at z; requires |z| < 1.
    cplx operator()(cplx z) const;
    /// Value at any z off the guard sets.
    cplx eval_extended(cplx z) const;

    AnalyticFn derivative() const;

    /// True when the tree is the literal constant c.
    bool is_constant(cplx c) const noexcept;
    bool is_zero() const noexcept { return is_constant(0.0); }

    std::string to_string() const;

private:
    explicit AnalyticFn(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

AnalyticFn operator+(const AnalyticFn& a, const AnalyticFn& b);
AnalyticFn operator-(const AnalyticFn& a, const AnalyticFn& b);
AnalyticFn operator*(const AnalyticFn& a, const AnalyticFn& b);
AnalyticFn operator*(cplx c, const AnalyticFn& a);

namespace expr {
struct Constant { cplx value; };
struct Identity {};
struct Polynomial { std::vector<cplx> coeffs; };
struct Mobius { cplx a, b, c, d; };
struct Exp { AnalyticFn arg; };
struct Log {
    AnalyticFn arg;
    cplx base;
    cplx base_value;  // arg(base)
    cplx base_log;    // principal log of base_value
    std::vector<Guard> guards;
};
struct Sum { std::vector<AnalyticFn> terms; };
struct Product { std::vector<AnalyticFn> factors; };
struct Quotient { AnalyticFn num, den; std::vector<Guard> guards; };
struct Compose { AnalyticFn outer, inner; };
struct Power { AnalyticFn base; int exponent; };
struct Blaschke {
    std::shared_ptr<const std::vector<cplx>> zeros;
    double theta;
    int order;
};
}  // namespace expr

struct Node {
    std::variant<expr::Constant, expr::Identity, expr::Polynomial, expr::Mobius, expr::Exp,
                 expr::Log, expr::Sum, expr::Product, expr::Quotient, expr::Compose,
                 expr::Power, expr::Blaschke>
        v;
};

/// Free-function spellings used throughout the library.
inline cplx eval(const AnalyticFn& f, cplx z) { return f(z); }
inline AnalyticFn derivative(const AnalyticFn& f) { return f.derivative(); }

}  // namespace semiflow
