#include "treedamp/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "treedamp/expressions.hpp"

namespace treedamp {

namespace {

// f[e][k] = l_{k,e} y for k = 0..n.
std::vector<std::vector<PiecewisePoly>> adjoint_parts(const TreeFunction& y, const CoefficientSet& coeffs) {
    const auto ell = apply_ell_all(y, coeffs);
    std::vector<std::vector<PiecewisePoly>> f(y.tree().num_edges());
    for (EdgeId e = 0; e < y.tree().num_edges(); ++e) {
        for (int k = 0; k <= coeffs.order; ++k) f[e].push_back(apply_ell_kj(ell, y.tree(), coeffs, k, e));
    }
    return f;
}

}  // namespace

QuasiDerivativeSet quasi_derivatives(const TreeFunction& y, const CoefficientSet& coeffs, const DelayMesh* mesh) {
    const int n = coeffs.order;
    const auto f = adjoint_parts(y, coeffs);
    QuasiDerivativeSet qd;
    qd.order = n;
    qd.values.resize(f.size());
    for (EdgeId e = 0; e < f.size(); ++e) {
        auto& v = qd.values[e];
        v.push_back(f[e][n]);
        for (int l = 1; l <= n; ++l) v.push_back(f[e][n - l] - v.back().derivative());

        for (int k = n; k < 2 * n; ++k) {
            const auto& g = v[k - n];
            const auto& br = g.breakpoints();
            for (std::size_t i = 1; i + 1 < br.size(); ++i) {
                const double t = br[i];
                Jump jump{e, k, t, g(t, Side::Right) - g(t, Side::Left), false};
                if (mesh) jump.mesh_node = mesh->has_node(e, t);
                qd.jumps.push_back(jump);
            }
        }
    }
    return qd;
}

std::vector<std::vector<PiecewisePoly>> g_unrolled(const TreeFunction& y, const CoefficientSet& coeffs) {
    const int n = coeffs.order;
    const auto f = adjoint_parts(y, coeffs);
    std::vector<std::vector<PiecewisePoly>> g(f.size());
    for (EdgeId e = 0; e < f.size(); ++e) {
        for (int l = 0; l <= n; ++l) {
            PiecewisePoly acc = PiecewisePoly::zero(f[e][n].lower(), f[e][n].upper());
            for (int k = n - l; k <= n; ++k) {
                const int order = k - n + l;
                const double sign = order % 2 == 0 ? 1.0 : -1.0;
                acc += f[e][k].derivative(order) * cplx{sign};
            }
            g[e].push_back(std::move(acc));
        }
    }
    return g;
}

double compare_g_paths(const QuasiDerivativeSet& qd, const std::vector<std::vector<PiecewisePoly>>& g) {
    double worst = 0.0;
    for (std::size_t e = 0; e < qd.values.size(); ++e) {
        for (std::size_t k = 0; k < qd.values[e].size(); ++k) {
            const auto& a = qd.values[e][k];
            const double scale = std::max(1.0, a.max_abs());
            worst = std::max(worst, (a - g.at(e).at(k)).max_abs() / scale);
        }
    }
    return worst;
}

std::vector<KirchhoffEntry> kirchhoff_residual(const QuasiDerivativeSet& qd, const Tree& tree) {
    std::vector<KirchhoffEntry> out;
    for (EdgeId e = 0; e < tree.num_internal(); ++e) {
        for (int k = qd.order; k < 2 * qd.order; ++k) {
            KirchhoffEntry entry{e, k, 0.0, 0.0};
            const auto& own = qd.at(e, k);
            entry.incoming = own(own.upper(), Side::Left);
            for (EdgeId v : tree.children(e)) entry.outgoing += qd.at(v, k)(0.0, Side::Right);
            out.push_back(entry);
        }
    }
    return out;
}

double max_residual(const std::vector<KirchhoffEntry>& entries) {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.residual());
    return m;
}

std::vector<OrderJump> continuity_report(const QuasiDerivativeSet& qd) {
    std::vector<OrderJump> out;
    for (int k = qd.order; k < 2 * qd.order; ++k) out.push_back(OrderJump{k, 0.0, 0, 0.0});
    for (const auto& j : qd.jumps) {
        auto& slot = out[j.order - qd.order];
        if (std::abs(j.value) > slot.max_jump) slot = OrderJump{j.order, std::abs(j.value), j.edge, j.t};
    }
    return out;
}

OptimalityReport weak_bvp_residual(const TreeFunction& y, const Basis& basis, const CoefficientSet& coeffs) {
    const Tree& tree = basis.tree();
    const auto f = adjoint_parts(y, coeffs);
    std::vector<cplx> r(basis.size(), cplx{0.0});
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        const double l = reduced_length(tree, coeffs.tau, e);
        for (std::size_t i = 0; i < basis.num_elements(e); ++i) {
            const Element& el = basis.element(e, i);
            const double a = el.x0;
            const double b = std::min(el.x0 + el.h, l);
            if (b <= a + breakpoint_tolerance(l)) continue;
            for (int k = 0; k <= coeffs.order; ++k) {
                const auto fk = f[e][k].restricted(a, b);
                for (std::size_t s = 0; s < el.dofs.size(); ++s) {
                    if (el.dofs[s] < 0) continue;
                    const std::vector<cplx> shape(el.shapes[s].begin(), el.shapes[s].end());
                    const PiecewisePoly w({a, b}, {poly::derivative(shape, k)});
                    r[static_cast<std::size_t>(el.dofs[s])] += inner_product(fk, w);
                }
            }
        }
    }
    const auto d = gram_diagonal(build_rows(basis, y, coeffs));
    const double J = energy(y, coeffs);
    OptimalityReport report;
    for (std::size_t p = 0; p < r.size(); ++p) {
        const double abs_r = std::abs(r[p]);
        const double denom = std::sqrt(d[p]) * std::sqrt(J);
        const double rel = abs_r == 0.0 ? 0.0 : (denom > 0.0 ? abs_r / denom : INFINITY);
        if (abs_r > report.absolute) {
            report.absolute = abs_r;
            report.worst_dof = p;
        }
        report.relative = std::max(report.relative, rel);
    }
    return report;
}

}  // namespace treedamp
