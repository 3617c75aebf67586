#pragma once

#include <vector>

#include "treedamp/coefficients.hpp"
#include "treedamp/tree_function.hpp"

namespace treedamp {

/// y_e^(k)(t) for t in [-tau, T_e]. Negative arguments follow the delay
/// through the start vertex: into the parent edge at t + T_parent, or into
/// the history segment for the root edge. At t = 0 the Left side takes
/// the value arriving through the vertex.
cplx eval_delayed(const TreeFunction& y, EdgeId e, double t, int k, Side side = Side::Right);

/// t -> y_e(t - tau) on [0, T_e] as a piecewise polynomial.
PiecewisePoly delayed_argument(const TreeFunction& y, EdgeId e);

/// (l_e y)(t) at a single point.
cplx ell_at(const TreeFunction& y, const CoefficientSet& coeffs, EdgeId e, double t, Side side = Side::Right);

/// l_e y = sum_k b_k y_e^(k)(t) + c_k y_e^(k)(t - tau) on [0, T_e].
PiecewisePoly apply_ell(const TreeFunction& y, const CoefficientSet& coeffs, EdgeId e);
std::vector<PiecewisePoly> apply_ell_all(const TreeFunction& y, const CoefficientSet& coeffs);

/// T_e on internal edges, T_e - tau on boundary edges.
double reduced_length(const Tree& tree, double tau, EdgeId e);

/// The adjoint-side expression l_{k,e} y on [0, reduced_length(e)], built from
/// the per-edge values l_e y (see apply_ell_all):
///   conj(b_k(t)) l_e y(t) + conj(c_k(t+tau)) l_e y(t+tau)             t < T_e - tau
///   conj(b_k(t)) l_e y(t) + sum_{child v} conj(c_{k,v}(s)) l_v y(s)    s = t+tau-T_e, internal e
PiecewisePoly apply_ell_kj(const std::vector<PiecewisePoly>& ell, const Tree& tree, const CoefficientSet& coeffs,
                           int k, EdgeId e);

/// Sum over edges of the integral of |l_e y|^2.
double energy(const TreeFunction& y, const CoefficientSet& coeffs);

/// B(y, w) = sum_e integral of l_e y * conj(l_e w).
cplx bilinear_form(const TreeFunction& y, const TreeFunction& w, const CoefficientSet& coeffs);

/// The same form rewritten by moving the delay onto y:
///   sum_e sum_k integral over [0, l_e] of l_{k,e} y * conj(w_e^(k)).
/// Equal to bilinear_form when w has zero history, satisfies the vertex
/// conditions and vanishes on the terminal windows.
cplx bilinear_form_reindexed(const TreeFunction& y, const TreeFunction& w, const CoefficientSet& coeffs);

}  // namespace treedamp
