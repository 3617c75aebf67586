#include "treedamp/basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "treedamp/dense.hpp"
#include "treedamp/errors.hpp"
#include "treedamp/quadrature.hpp"

namespace treedamp {

namespace {

using RealPoly = std::vector<double>;

RealPoly real_multiply(const RealPoly& a, const RealPoly& b) {
    RealPoly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

double falling(int i, int k) {
    double f = 1.0;
    for (int r = 0; r < k; ++r) f *= static_cast<double>(i - r);
    return f;
}

// sigma^n (1 - sigma)^n P_i(2 sigma - 1), scaled to unit size at the centre.
RealPoly bubble_reference(int order, int i) {
    RealPoly legendre_prev{1.0};
    RealPoly legendre{-1.0, 2.0};  // P_1(2s - 1)
    RealPoly p = i == 0 ? legendre_prev : legendre;
    for (int k = 2; k <= i; ++k) {
        // k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2} with x = 2s - 1.
        RealPoly next = real_multiply(legendre, {-1.0, 2.0});
        for (auto& v : next) v *= (2.0 * k - 1.0) / k;
        for (std::size_t j = 0; j < legendre_prev.size(); ++j) next[j] -= (k - 1.0) / k * legendre_prev[j];
        legendre_prev = legendre;
        legendre = next;
        p = next;
    }
    RealPoly envelope{1.0};
    for (int k = 0; k < order; ++k) envelope = real_multiply(envelope, {0.0, 1.0});
    for (int k = 0; k < order; ++k) envelope = real_multiply(envelope, {1.0, -1.0});
    auto out = real_multiply(envelope, p);
    const double scale = std::pow(4.0, order);
    for (auto& v : out) v *= scale;
    return out;
}

RealPoly scale_to_width(const RealPoly& ref, double h, double prefactor) {
    RealPoly out(ref.size());
    double hp = 1.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        out[i] = prefactor * ref[i] / hp;
        hp *= h;
    }
    return out;
}

}  // namespace

std::vector<std::vector<std::vector<double>>> hermite_reference(int order) {
    static std::mutex mutex;
    static std::map<int, std::vector<std::vector<std::vector<double>>>> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(order); it != cache.end()) return it->second;

    const int size = 2 * order;
    Matrix conditions(size, size);
    for (int side = 0; side < 2; ++side) {
        const double x = side;
        for (int v = 0; v < order; ++v) {
            for (int i = v; i < size; ++i) conditions(side * order + v, i) = falling(i, v) * std::pow(x, i - v);
        }
    }
    std::vector<std::vector<std::vector<double>>> out(2, std::vector<std::vector<double>>(order));
    for (int side = 0; side < 2; ++side) {
        for (int k = 0; k < order; ++k) {
            std::vector<cplx> rhs(size, cplx{0.0});
            rhs[side * order + k] = 1.0;
            const auto sol = solve_linear(conditions, rhs);
            auto& target = out[side][k];
            for (const auto& v : sol) target.push_back(v.real());
        }
    }
    cache.emplace(order, out);
    return out;
}

std::vector<double> hermite_shape(int order, int side, int k, double h) {
    return scale_to_width(hermite_reference(order).at(side).at(k), h, std::pow(h, k));
}

Basis Basis::build(std::shared_ptr<const DelayMesh> mesh, int order, int degree) {
    if (order < 1) throw ValidationError("basis: order n must be >= 1");
    Basis basis;
    basis.mesh_ = mesh;
    basis.order_ = order;
    basis.degree_ = std::max(degree, 2 * order - 1);
    const int bubbles = basis.degree_ - (2 * order - 1);
    const Tree& tree = *mesh->tree;
    const double tol = 10 * breakpoint_tolerance(tree.height());

    std::vector<RealPoly> bubble_refs;
    for (int i = 0; i < bubbles; ++i) bubble_refs.push_back(bubble_reference(order, i));

    basis.elements_.assign(tree.num_edges(), {});
    basis.node_dofs_.assign(tree.num_edges(), {});
    std::ptrdiff_t next = 0;
    for (EdgeId e : tree.topological_order()) {
        const auto& nodes = mesh->nodes[e];
        const double T = tree.length(e);
        const bool boundary = tree.is_boundary(e);
        auto frozen = [&](double x) { return boundary && x >= T - mesh->tau - tol; };

        auto& nd = basis.node_dofs_[e];
        nd.assign(nodes.size(), std::vector<std::ptrdiff_t>(order, -1));
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (i == 0) {
                if (auto p = tree.parent(e)) nd[0] = basis.node_dofs_[*p].back();
                continue;  // root start stays constrained
            }
            if (frozen(nodes[i])) continue;
            for (int k = 0; k < order; ++k) nd[i][k] = next++;
        }
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            Element el;
            el.x0 = nodes[i];
            el.h = nodes[i + 1] - nodes[i];
            for (int side = 0; side < 2; ++side) {
                for (int k = 0; k < order; ++k) {
                    el.dofs.push_back(nd[i + side][k]);
                    el.shapes.push_back(hermite_shape(order, side, k, el.h));
                }
            }
            for (const auto& ref : bubble_refs) {
                el.dofs.push_back(frozen(el.x0) ? -1 : next++);
                el.shapes.push_back(scale_to_width(ref, el.h, 1.0));
            }
            basis.elements_[e].push_back(std::move(el));
        }
    }
    basis.ndof_ = static_cast<std::size_t>(next);
    return basis;
}

std::size_t Basis::locate(EdgeId e, double t) const {
    const auto& nodes = mesh_->nodes.at(e);
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    std::size_t idx = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    return std::min(idx, elements_[e].size() - 1);
}

std::optional<std::size_t> Basis::node_dof(EdgeId e, std::size_t node, int k) const {
    const auto d = node_dofs_.at(e).at(node).at(k);
    if (d < 0) return std::nullopt;
    return static_cast<std::size_t>(d);
}

TreeFunction Basis::function(std::span<const cplx> coeffs, PiecewisePoly history) const {
    if (coeffs.size() != ndof_) throw std::invalid_argument("Basis::function: coefficient count mismatch");
    const Tree& tree = this->tree();
    std::vector<PiecewisePoly> edges;
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        std::vector<std::vector<cplx>> pieces;
        for (const auto& el : elements_[e]) {
            std::vector<cplx> piece(degree_ + 1, cplx{0.0});
            for (std::size_t a = 0; a < el.dofs.size(); ++a) {
                if (el.dofs[a] < 0) continue;
                const cplx c = coeffs[static_cast<std::size_t>(el.dofs[a])];
                if (c == cplx{0.0}) continue;
                for (std::size_t i = 0; i < el.shapes[a].size(); ++i) piece[i] += c * el.shapes[a][i];
            }
            pieces.push_back(std::move(piece));
        }
        edges.emplace_back(mesh_->nodes[e], std::move(pieces));
    }
    if (history.empty()) history = PiecewisePoly::zero(-mesh_->tau, 0.0);
    return TreeFunction(mesh_->tree, order_, mesh_->tau, std::move(edges), std::move(history));
}

TreeFunction Basis::basis_function(std::size_t p) const {
    std::vector<cplx> c(ndof_, cplx{0.0});
    c.at(p) = 1.0;
    return function(c);
}

std::vector<cplx> Basis::interpolate(const TreeFunction& y) const {
    std::vector<cplx> c(ndof_, cplx{0.0});
    const Tree& tree = this->tree();
    const int bubbles = degree_ - (2 * order_ - 1);
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        const auto& nodes = mesh_->nodes[e];
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Side side = i + 1 == nodes.size() ? Side::Left : Side::Right;
            for (int k = 0; k < order_; ++k) {
                if (auto d = node_dof(e, i, k)) c[*d] = y.edge(e).derivative_at(nodes[i], k, side);
            }
        }
    }
    if (bubbles == 0) return c;
    const auto& rule = gauss_legendre(bubbles);
    const int nodal = 2 * order_;
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        for (const auto& el : elements_[e]) {
            if (el.dofs[nodal] < 0) continue;
            Matrix m(bubbles, bubbles);
            std::vector<cplx> rhs(bubbles);
            for (int r = 0; r < bubbles; ++r) {
                const double s = rule.nodes[r] * el.h;
                cplx residual = y.edge(e)(el.x0 + s);
                for (int a = 0; a < nodal; ++a) {
                    if (el.dofs[a] < 0) continue;
                    std::vector<cplx> shape(el.shapes[a].begin(), el.shapes[a].end());
                    residual -= c[static_cast<std::size_t>(el.dofs[a])] * poly::eval(shape, s);
                }
                rhs[r] = residual;
                for (int b = 0; b < bubbles; ++b) {
                    std::vector<cplx> shape(el.shapes[nodal + b].begin(), el.shapes[nodal + b].end());
                    m(r, b) = poly::eval(shape, s);
                }
            }
            const auto sol = solve_linear(m, rhs);
            for (int b = 0; b < bubbles; ++b) c[static_cast<std::size_t>(el.dofs[nodal + b])] = sol[b];
        }
    }
    return c;
}

TreeFunction lift_history(const DelayMesh& mesh, int order, const PiecewisePoly& history) {
    const Tree& tree = *mesh.tree;
    const double tau = mesh.tau;
    const double tol = 10 * breakpoint_tolerance(tau);
    if (history.empty() || std::abs(history.lower() + tau) > tol || std::abs(history.upper()) > tol) {
        throw ValidationError("history must be defined on [-tau, 0]");
    }
    const double T1 = tree.length(0);
    const double L = T1 - tau;
    const auto ref = hermite_reference(order);
    std::vector<cplx> blend(2 * order, cplx{0.0});
    for (int k = 0; k < order; ++k) {
        const cplx value = history.derivative_at(0.0, k, Side::Left);
        const auto shape = hermite_shape(order, 0, k, L);
        for (std::size_t i = 0; i < shape.size(); ++i) blend[i] += value * shape[i];
    }
    std::vector<PiecewisePoly> edges;
    edges.emplace_back(std::vector<double>{0.0, L, T1}, std::vector<std::vector<cplx>>{blend, {cplx{0.0}}});
    for (EdgeId e = 1; e < tree.num_edges(); ++e) edges.push_back(PiecewisePoly::zero(0.0, tree.length(e)));
    return TreeFunction(mesh.tree, order, tau, std::move(edges), history);
}

MembershipReport check_membership(const TreeFunction& y, double tol) {
    MembershipReport report;
    const Tree& tree = y.tree();
    const int n = y.order();
    const double tau = y.tau();
    double scale = std::max(1.0, y.history().max_abs());
    for (const auto& f : y.edges()) scale = std::max(scale, f.max_abs());
    const double bound = tol * scale;
    auto fail = [&](std::string msg) {
        report.ok = false;
        report.violations.push_back(std::move(msg));
    };
    auto edge_name = [&](EdgeId e) { return std::to_string(tree.original_id(e)); };

    for (int k = 0; k < n; ++k) {
        if (y.history().derivative(k).max_abs() > bound) {
            fail("history: derivative " + std::to_string(k) + " is not zero on [-tau, 0]");
            break;
        }
    }
    for (int k = 0; k < n; ++k) {
        if (std::abs(y.edge(0).derivative_at(0.0, k)) > bound) {
            fail("root start: derivative " + std::to_string(k) + " is not zero at t = 0");
        }
    }
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        if (auto p = tree.parent(e)) {
            for (int k = 0; k < n; ++k) {
                const cplx parent_end = y.edge(*p).derivative_at(tree.length(*p), k, Side::Left);
                if (std::abs(y.edge(e).derivative_at(0.0, k) - parent_end) > bound) {
                    fail("vertex continuity: derivative " + std::to_string(k) + " jumps entering edge " + edge_name(e));
                }
            }
        }
        const auto& f = y.edge(e);
        for (std::size_t i = 1; i + 1 < f.breakpoints().size(); ++i) {
            const double x = f.breakpoints()[i];
            for (int k = 0; k < n; ++k) {
                if (std::abs(f.derivative_at(x, k, Side::Right) - f.derivative_at(x, k, Side::Left)) > bound) {
                    fail("smoothness: derivative " + std::to_string(k) + " jumps at t = " + std::to_string(x) +
                         " on edge " + edge_name(e));
                }
            }
        }
        if (tree.is_boundary(e)) {
            const double T = tree.length(e);
            const auto tail = f.restricted(T - tau, T);
            for (int k = 0; k < n; ++k) {
                const double left_limit = std::abs(f.derivative_at(T - tau, k, Side::Left));
                if (tail.derivative(k).max_abs() > bound || left_limit > bound) {
                    fail("terminal window: edge " + edge_name(e) + " is not at rest on [T - tau, T] (derivative " +
                         std::to_string(k) + ")");
                    break;
                }
            }
        }
    }
    return report;
}

}  // namespace treedamp
