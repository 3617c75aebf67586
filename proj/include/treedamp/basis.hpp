#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treedamp/mesh.hpp"
#include "treedamp/tree_function.hpp"

namespace treedamp {

/// Reference Hermite polynomials of degree 2n-1 on [0, 1], lowest power first.
/// hermite_reference(n)[side][k] has derivative k equal to 1 at the chosen
/// end (side 0 = left, 1 = right) and all other derivatives below n zero at
/// both ends.
std::vector<std::vector<std::vector<double>>> hermite_reference(int order);

/// Hermite polynomial in powers of s on [0, h] with d^v/ds^v equal to
/// delta_{kv} at the chosen end and zero at the other, for v < order.
std::vector<double> hermite_shape(int order, int side, int k, double h);

/// One element of an edge: [x0, x0 + h] with local shape functions.
/// Local index layout: left node k = 0..n-1, right node k = 0..n-1, then
/// interior bubbles. dofs[a] is the global index or -1 when constrained to zero.
struct Element {
    double x0 = 0.0;
    double h = 0.0;
    std::vector<std::ptrdiff_t> dofs;
    std::vector<std::vector<double>> shapes;  // powers of (t - x0)
};

/// C^(n-1) piecewise polynomial basis of the constrained trajectory space:
/// zero history (all derivatives below n vanish at the root start), vertex
/// continuity of derivatives 0..n-1, and identically zero on
/// [T_e - tau, T_e] for boundary edges.
class Basis {
public:
    /// `degree` is the element polynomial degree; values below 2n-1 (or -1)
    /// select the minimal Hermite degree 2n-1. Extra degrees add interior
    /// bubble functions that vanish to order n at both element ends.
    static Basis build(std::shared_ptr<const DelayMesh> mesh, int order, int degree = -1);

    const DelayMesh& mesh() const noexcept { return *mesh_; }
    const std::shared_ptr<const DelayMesh>& shared_mesh() const noexcept { return mesh_; }
    const Tree& tree() const noexcept { return *mesh_->tree; }
    int order() const noexcept { return order_; }
    int degree() const noexcept { return degree_; }
    std::size_t size() const noexcept { return ndof_; }

    std::size_t num_elements(EdgeId e) const { return elements_.at(e).size(); }
    const Element& element(EdgeId e, std::size_t i) const { return elements_.at(e).at(i); }
    /// Element containing t (right-continuous at nodes).
    std::size_t locate(EdgeId e, double t) const;

    /// Global dof carrying derivative k at node i of edge e, if free.
    std::optional<std::size_t> node_dof(EdgeId e, std::size_t node, int k) const;

    /// sum_p coeffs[p] w_p, with the given history attached (zero by default).
    TreeFunction function(std::span<const cplx> coeffs, PiecewisePoly history = {}) const;
    TreeFunction basis_function(std::size_t p) const;

    /// Coefficients of the element-wise interpolant of y in this space:
    /// nodal derivatives plus bubble collocation. Exact for functions that
    /// already lie in the space.
    std::vector<cplx> interpolate(const TreeFunction& y) const;

private:
    std::shared_ptr<const DelayMesh> mesh_;
    int order_ = 1;
    int degree_ = 1;
    std::size_t ndof_ = 0;
    std::vector<std::vector<Element>> elements_;
    std::vector<std::vector<std::vector<std::ptrdiff_t>>> node_dofs_;  // [e][node][k]
};

/// Trajectory carrying the history phi: phi on [-tau, 0), the Hermite
/// blend of phi's derivatives at 0 on [0, T_1 - tau], zero afterwards and
/// on every other edge.
TreeFunction lift_history(const DelayMesh& mesh, int order, const PiecewisePoly& history);

struct MembershipReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Checks zero history, zero start data on the root edge, vertex
/// continuity, in-edge C^(n-1) continuity and the terminal-window zero
/// condition on boundary edges, each to tol relative to max(1, sup |y|).
MembershipReport check_membership(const TreeFunction& y, double tol);

}  // namespace treedamp
