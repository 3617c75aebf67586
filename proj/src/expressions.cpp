#include "treedamp/expressions.hpp"

#include <stdexcept>
#include <string>

namespace treedamp {

cplx eval_delayed(const TreeFunction& y, EdgeId e, double t, int k, Side side) {
    const double tau = y.tau();
    const double tol = breakpoint_tolerance(tau);
    if (t < -tau - tol) throw std::out_of_range("eval_delayed: t below -tau");
    if (k < 0 || k > y.order()) throw std::out_of_range("eval_delayed: derivative order above n");
    const bool through_vertex = t < 0.0 || (t == 0.0 && side == Side::Left);
    if (!through_vertex) return y.edge(e).derivative_at(t, k, side);
    if (auto p = y.tree().parent(e)) {
        const double T = y.tree().length(*p);
        return y.edge(*p).derivative_at(t + T, k, side);
    }
    return y.history().derivative_at(t, k, side);
}

PiecewisePoly delayed_argument(const TreeFunction& y, EdgeId e) {
    const double tau = y.tau();
    const double T = y.tree().length(e);
    PiecewisePoly head;
    if (auto p = y.tree().parent(e)) {
        const double Tp = y.tree().length(*p);
        head = y.edge(*p).restricted(Tp - tau, Tp).relocated(0.0, tau);
    } else {
        head = y.history().relocated(0.0, tau);
    }
    PiecewisePoly tail = y.edge(e).restricted(0.0, T - tau).relocated(tau, T);
    return PiecewisePoly::concat(head, tail);
}

cplx ell_at(const TreeFunction& y, const CoefficientSet& coeffs, EdgeId e, double t, Side side) {
    cplx acc = 0.0;
    for (int k = 0; k <= coeffs.order; ++k) {
        acc += coeffs.b[k][e](t, side) * y.edge(e).derivative_at(t, k, side);
        acc += coeffs.c[k][e](t, side) * eval_delayed(y, e, t - coeffs.tau, k, side);
    }
    return acc;
}

PiecewisePoly apply_ell(const TreeFunction& y, const CoefficientSet& coeffs, EdgeId e) {
    if (y.order() < coeffs.order) throw std::invalid_argument("apply_ell: function smoothness below equation order");
    const PiecewisePoly& own = y.edge(e);
    const PiecewisePoly delayed = delayed_argument(y, e);
    PiecewisePoly out = PiecewisePoly::zero(0.0, y.tree().length(e));
    for (int k = 0; k <= coeffs.order; ++k) {
        if (!coeffs.is_zero(coeffs.b[k][e])) out += coeffs.b[k][e] * own.derivative(k);
        if (!coeffs.is_zero(coeffs.c[k][e])) out += coeffs.c[k][e] * delayed.derivative(k);
    }
    return out;
}

std::vector<PiecewisePoly> apply_ell_all(const TreeFunction& y, const CoefficientSet& coeffs) {
    std::vector<PiecewisePoly> out;
    out.reserve(y.tree().num_edges());
    for (EdgeId e = 0; e < y.tree().num_edges(); ++e) out.push_back(apply_ell(y, coeffs, e));
    return out;
}

double reduced_length(const Tree& tree, double tau, EdgeId e) {
    return tree.is_internal(e) ? tree.length(e) : tree.length(e) - tau;
}

PiecewisePoly apply_ell_kj(const std::vector<PiecewisePoly>& ell, const Tree& tree, const CoefficientSet& coeffs,
                           int k, EdgeId e) {
    if (k < 0 || k > coeffs.order) throw std::out_of_range("apply_ell_kj: k outside 0..n");
    const double tau = coeffs.tau;
    const double T = tree.length(e);
    const double l = reduced_length(tree, tau, e);

    PiecewisePoly out = (coeffs.b[k][e].conjugated() * ell[e]).restricted(0.0, l);
    PiecewisePoly shifted = (coeffs.c[k][e].conjugated() * ell[e]).restricted(tau, T).relocated(0.0, T - tau);
    if (tree.is_internal(e)) {
        PiecewisePoly spliced = PiecewisePoly::zero(T - tau, T);
        for (EdgeId v : tree.children(e)) {
            spliced += (coeffs.c[k][v].conjugated() * ell[v]).restricted(0.0, tau).relocated(T - tau, T);
        }
        shifted = PiecewisePoly::concat(shifted, spliced);
    }
    out += shifted;
    return out;
}

double energy(const TreeFunction& y, const CoefficientSet& coeffs) {
    double total = 0.0;
    for (EdgeId e = 0; e < y.tree().num_edges(); ++e) {
        const auto f = apply_ell(y, coeffs, e);
        total += inner_product(f, f).real();
    }
    return total;
}

cplx bilinear_form(const TreeFunction& y, const TreeFunction& w, const CoefficientSet& coeffs) {
    cplx total = 0.0;
    for (EdgeId e = 0; e < y.tree().num_edges(); ++e) {
        total += inner_product(apply_ell(y, coeffs, e), apply_ell(w, coeffs, e));
    }
    return total;
}

cplx bilinear_form_reindexed(const TreeFunction& y, const TreeFunction& w, const CoefficientSet& coeffs) {
    const auto ell = apply_ell_all(y, coeffs);
    const Tree& tree = y.tree();
    cplx total = 0.0;
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        const double l = reduced_length(tree, coeffs.tau, e);
        for (int k = 0; k <= coeffs.order; ++k) {
            total += inner_product(apply_ell_kj(ell, tree, coeffs, k, e), w.edge(e).derivative(k).restricted(0.0, l));
        }
    }
    return total;
}

}  // namespace treedamp
