#pragma once

#include <vector>

#include "treedamp/coefficients.hpp"
#include "treedamp/mesh.hpp"
#include "treedamp/tree_function.hpp"

namespace treedamp {

/// Right-hand side u_e on [0, T_e] for every edge.
struct Control {
    std::vector<PiecewisePoly> u;

    static Control zero(const Tree& tree);
};

/// Method of steps for
///   sum_k b_k y^(k)(t) + c_k y^(k)(t - tau) = u(t),  y_1 = phi on [-tau, 0],
/// with derivatives 0..n-1 carried across vertices. Every element of the
/// mesh is at most tau wide, so the delayed terms on an element only touch
/// parts that are already known; on each element the unknown polynomial
/// of degree `degree` (at least 2n-1) takes its first n Taylor
/// coefficients from the previous element and the rest from collocation at
/// Gauss points.
///
/// Throws ValidationError if b_n vanishes, an element is wider than tau or
/// the mesh lacks wavefront nodes.
TreeFunction solve_cauchy(const Tree& tree, const CoefficientSet& coeffs, const PiecewisePoly& phi,
                          const Control& control, const DelayMesh& mesh, int degree = -1);

/// ||l_e y - u_e||_{L2(0, T_e)} per edge.
std::vector<double> residual_ell(const TreeFunction& y, const CoefficientSet& coeffs, const Control& control);

}  // namespace treedamp
