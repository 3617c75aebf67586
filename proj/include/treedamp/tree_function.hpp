#pragma once

#include <memory>
#include <vector>

#include "treedamp/piecewise_poly.hpp"
#include "treedamp/tree.hpp"

namespace treedamp {

/// A function y = [y_1, ..., y_m] on the tree extended by the history
/// segment [-tau, 0] in front of the root edge.
class TreeFunction {
public:
    TreeFunction(std::shared_ptr<const Tree> tree, int order, double tau, std::vector<PiecewisePoly> edges,
                 PiecewisePoly history);

    /// Identically zero, including the history.
    static TreeFunction zero(std::shared_ptr<const Tree> tree, int order, double tau);

    const Tree& tree() const noexcept { return *tree_; }
    const std::shared_ptr<const Tree>& shared_tree() const noexcept { return tree_; }
    int order() const noexcept { return order_; }
    double tau() const noexcept { return tau_; }

    const PiecewisePoly& edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<PiecewisePoly>& edges() const noexcept { return edges_; }
    const PiecewisePoly& history() const noexcept { return history_; }

    TreeFunction& operator+=(const TreeFunction& other);
    TreeFunction& operator*=(cplx s);
    friend TreeFunction operator+(TreeFunction a, const TreeFunction& b) { return a += b; }
    friend TreeFunction operator-(TreeFunction a, const TreeFunction& b) { return a += b * cplx{-1.0}; }
    friend TreeFunction operator*(TreeFunction a, cplx s) { return a *= s; }
    friend TreeFunction operator*(cplx s, TreeFunction a) { return a *= s; }

private:
    std::shared_ptr<const Tree> tree_;
    int order_;
    double tau_;
    std::vector<PiecewisePoly> edges_;
    PiecewisePoly history_;
};

}  // namespace treedamp
