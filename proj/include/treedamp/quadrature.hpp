#pragma once

#include <vector>

namespace treedamp {

struct GaussRule {
    std::vector<double> nodes;    // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule with `points` nodes mapped to [0, 1]; exact for
/// polynomials of degree 2 * points - 1.
const GaussRule& gauss_legendre(int points);

}  // namespace treedamp
