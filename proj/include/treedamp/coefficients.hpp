#pragma once

#include <vector>

#include "treedamp/piecewise_poly.hpp"
#include "treedamp/tree.hpp"

namespace treedamp {

/// Coefficients of the controlled system
///   sum_k b[k][e](t) y_e^(k)(t) + c[k][e](t) y_e^(k)(t - tau) = u_e(t)
/// on every edge e, with b[k][e], c[k][e] defined on [0, T_e].
struct CoefficientSet {
    int order = 1;  // n
    double tau = 0.0;
    std::vector<std::vector<PiecewisePoly>> b;  // [k][e], k = 0..n
    std::vector<std::vector<PiecewisePoly>> c;

    /// All coefficients identically zero on every edge.
    static CoefficientSet zeros(const Tree& tree, int order, double tau);
    /// Same constant b_k, c_k on every edge.
    static CoefficientSet constant(const Tree& tree, int order, double tau, const std::vector<cplx>& b_values,
                                   const std::vector<cplx>& c_values);

    /// Throws ValidationError unless 0 < tau < min edge length, domains
    /// match the edges, all values are finite and |b_n| stays bounded away
    /// from zero on a sample grid.
    void validate(const Tree& tree) const;

    /// Sampled min over edges and t of |b_n(t)|.
    double leading_lower_bound(int samples_per_piece = 64) const;
    int max_degree() const;
    /// Union of breakpoints of all b_k, c_k on edge e.
    std::vector<double> breakpoints(EdgeId e) const;
    bool is_zero(const PiecewisePoly& f) const;
};

}  // namespace treedamp
