#pragma once

#include <vector>

#include "treedamp/basis.hpp"
#include "treedamp/coefficients.hpp"
#include "treedamp/damping.hpp"
#include "treedamp/tree_function.hpp"

namespace treedamp {

/// One-sided gap y^<k>(t+) - y^<k>(t-) at an interior breakpoint.
struct Jump {
    EdgeId edge = 0;
    int order = 0;
    double t = 0.0;
    cplx value = 0.0;
    bool mesh_node = false;
};

/// Quasi-derivatives y^<k> for k = n..2n on [0, l_e] of every edge:
///   y^<n> = l_{n,e} y,   y^<n+l> = l_{n-l,e} y - (y^<n+l-1>)'.
struct QuasiDerivativeSet {
    int order = 1;
    std::vector<std::vector<PiecewisePoly>> values;  // [e][k - n]
    /// Every interior breakpoint of y^<k>, k = n..2n-1. Breakpoints that
    /// are not mesh nodes come from coefficient or history breaks and
    /// their delay images.
    std::vector<Jump> jumps;

    const PiecewisePoly& at(EdgeId e, int k) const { return values.at(e).at(k - order); }
};

/// `mesh` (optional) only labels which jumps sit on mesh nodes.
QuasiDerivativeSet quasi_derivatives(const TreeFunction& y, const CoefficientSet& coeffs,
                                     const DelayMesh* mesh = nullptr);

/// g_{n+l} = sum_{k=n-l}^{n} (-1)^(k-n+l) f_k^(k-n+l) with f_k = l_{k,e} y:
/// the unrolled recursion, computed without reusing lower orders.
std::vector<std::vector<PiecewisePoly>> g_unrolled(const TreeFunction& y, const CoefficientSet& coeffs);

/// max over edges and orders of |y^<k> - g_k| relative to max(1, |y^<k>|).
double compare_g_paths(const QuasiDerivativeSet& qd, const std::vector<std::vector<PiecewisePoly>>& g);

struct KirchhoffEntry {
    EdgeId edge = 0;  // internal edge whose end vertex is checked
    int order = 0;
    cplx incoming = 0.0;  // y_e^<k>(l_e-)
    cplx outgoing = 0.0;  // sum over children of y_v^<k>(0+)
    double residual() const { return std::abs(incoming - outgoing); }
};

/// y_e^<k>(l_e) = sum_{v child of e} y_v^<k>(0) for internal e and k = n..2n-1.
std::vector<KirchhoffEntry> kirchhoff_residual(const QuasiDerivativeSet& qd, const Tree& tree);
double max_residual(const std::vector<KirchhoffEntry>& entries);

struct OrderJump {
    int order = 0;
    double max_jump = 0.0;
    EdgeId edge = 0;
    double t = 0.0;
};

/// Largest jump of y^<k> per order k = n..2n-1.
std::vector<OrderJump> continuity_report(const QuasiDerivativeSet& qd);

/// max_p |B(y, w_p)| evaluated through the rewritten form
///   sum_e sum_k integral over [0, l_e] of l_{k,e} y * conj(w_p^(k)),
/// normalised as in optimality_check.
OptimalityReport weak_bvp_residual(const TreeFunction& y, const Basis& basis, const CoefficientSet& coeffs);

}  // namespace treedamp
