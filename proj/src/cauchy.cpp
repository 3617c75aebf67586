#include "treedamp/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treedamp/dense.hpp"
#include "treedamp/errors.hpp"
#include "treedamp/expressions.hpp"
#include "treedamp/quadrature.hpp"

namespace treedamp {

Control Control::zero(const Tree& tree) {
    Control c;
    for (EdgeId e = 0; e < tree.num_edges(); ++e) c.u.push_back(PiecewisePoly::zero(0.0, tree.length(e)));
    return c;
}

namespace {

double falling(int i, int k) {
    double f = 1.0;
    for (int r = 0; r < k; ++r) f *= static_cast<double>(i - r);
    return f;
}

void check_inputs(const Tree& tree, const CoefficientSet& coeffs, const PiecewisePoly& phi, const Control& control,
                  const DelayMesh& mesh) {
    coeffs.validate(tree);
    if (mesh.nodes.size() != tree.num_edges()) throw ValidationError("cauchy: mesh does not match the tree");
    const double tol = 10 * breakpoint_tolerance(tree.height());
    if (std::abs(mesh.tau - coeffs.tau) > tol) throw ValidationError("cauchy: mesh built for a different tau");
    if (mesh.max_width() > coeffs.tau + tol) throw ValidationError("cauchy: mesh elements must not exceed tau");
    if (auto missing = mesh.missing_wavefronts(); !missing.empty()) {
        const auto [e, t] = missing.front();
        throw ValidationError("cauchy: mesh lacks wavefront node t = " + std::to_string(t) + " on edge " +
                              std::to_string(tree.original_id(e)));
    }
    if (phi.empty() || std::abs(phi.lower() + coeffs.tau) > tol || std::abs(phi.upper()) > tol) {
        throw ValidationError("cauchy: history must be defined on [-tau, 0]");
    }
    if (control.u.size() != tree.num_edges()) throw ValidationError("cauchy: one control per edge required");
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        const auto& u = control.u[e];
        if (u.empty() || std::abs(u.lower()) > tol || std::abs(u.upper() - tree.length(e)) > tol) {
            throw ValidationError("cauchy: control on edge " + std::to_string(tree.original_id(e)) +
                                  " must be defined on [0, T]");
        }
    }
}

}  // namespace

TreeFunction solve_cauchy(const Tree& tree, const CoefficientSet& coeffs, const PiecewisePoly& phi,
                          const Control& control, const DelayMesh& mesh, int degree) {
    check_inputs(tree, coeffs, phi, control, mesh);
    const int n = coeffs.order;
    const int p = std::max(degree, 2 * n - 1);
    const int unknowns = p + 1 - n;
    const double tau = coeffs.tau;
    const auto& rule = gauss_legendre(unknowns);

    std::vector<std::vector<std::vector<cplx>>> pieces(tree.num_edges());

    auto value_on = [&](EdgeId e, double t, int k) -> cplx {
        const auto& nodes = mesh.nodes[e];
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
        std::size_t i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
        i = std::min(i, pieces[e].size() - 1);
        return poly::eval_derivative(pieces[e][i], t - nodes[i], k);
    };
    auto delayed = [&](EdgeId e, double t, int k) -> cplx {
        if (t >= 0.0) return value_on(e, t, k);
        if (auto parent = tree.parent(e)) return value_on(*parent, t + tree.length(*parent), k);
        return phi.derivative_at(t, k);
    };

    for (EdgeId e : tree.topological_order()) {
        const auto& nodes = mesh.nodes[e];
        std::vector<cplx> start(n);
        if (auto parent = tree.parent(e)) {
            const auto& last = pieces[*parent].back();
            const auto& pn = mesh.nodes[*parent];
            const double h_last = pn.back() - pn[pn.size() - 2];
            for (int k = 0; k < n; ++k) start[k] = poly::eval_derivative(last, h_last, k);
        } else {
            for (int k = 0; k < n; ++k) start[k] = phi.derivative_at(0.0, k, Side::Left);
        }

        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double x0 = nodes[i];
            const double h = nodes[i + 1] - x0;
            // Work in sigma = s / h with alpha_i = a_i h^i.
            std::vector<cplx> alpha(p + 1, cplx{0.0});
            double fact = 1.0;
            for (int k = 0; k < n; ++k) {
                if (k > 0) fact *= k;
                alpha[k] = start[k] / fact * std::pow(h, k);
            }
            Matrix A(unknowns, unknowns);
            std::vector<cplx> rhs(unknowns);
            for (int r = 0; r < unknowns; ++r) {
                const double sigma = rule.nodes[r];
                const double t = x0 + sigma * h;
                cplx f = control.u[e](t);
                for (int k = 0; k <= n; ++k) {
                    const cplx ck = coeffs.c[k][e](t);
                    if (ck != cplx{0.0}) f -= ck * delayed(e, t - tau, k);
                }
                for (int k = 0; k <= n; ++k) {
                    const cplx bk = coeffs.b[k][e](t);
                    if (bk == cplx{0.0}) continue;
                    const double hk = std::pow(h, -k);
                    for (int j = 0; j <= p; ++j) {
                        if (j < k) continue;
                        const cplx entry = bk * falling(j, k) * std::pow(sigma, j - k) * hk;
                        if (j < n) {
                            f -= entry * alpha[j];
                        } else {
                            A(r, j - n) += entry;
                        }
                    }
                }
                rhs[r] = f;
            }
            const auto sol = solve_linear(std::move(A), std::move(rhs));
            std::vector<cplx> a(p + 1);
            for (int j = 0; j <= p; ++j) {
                const cplx aj = j < n ? alpha[j] : sol[j - n];
                a[j] = aj / std::pow(h, j);
            }
            for (int k = 0; k < n; ++k) start[k] = poly::eval_derivative(a, h, k);
            pieces[e].push_back(std::move(a));
        }
    }

    std::vector<PiecewisePoly> edges;
    for (EdgeId e = 0; e < tree.num_edges(); ++e) edges.emplace_back(mesh.nodes[e], std::move(pieces[e]));
    return TreeFunction(mesh.tree, n, tau, std::move(edges), phi);
}

std::vector<double> residual_ell(const TreeFunction& y, const CoefficientSet& coeffs, const Control& control) {
    std::vector<double> out;
    for (EdgeId e = 0; e < y.tree().num_edges(); ++e) {
        const auto d = apply_ell(y, coeffs, e) - control.u.at(e);
        out.push_back(std::sqrt(std::max(0.0, inner_product(d, d).real())));
    }
    return out;
}

}  // namespace treedamp
