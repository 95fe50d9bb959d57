#pragma once

#include <vector>

namespace semiflow {

struct GaussLegendreRule {
    std::vector<double> nodes;    // ascending, in (-1, 1)
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n), cached per n.
const GaussLegendreRule& gauss_legendre(int n);

}  // namespace semiflow
