#include "treedamp/tree_function.hpp"

#include <stdexcept>

namespace treedamp {

TreeFunction::TreeFunction(std::shared_ptr<const Tree> tree, int order, double tau, std::vector<PiecewisePoly> edges,
                           PiecewisePoly history)
    : tree_(std::move(tree)), order_(order), tau_(tau), edges_(std::move(edges)), history_(std::move(history)) {
    if (!tree_) throw std::invalid_argument("TreeFunction: null tree");
    if (edges_.size() != tree_->num_edges()) throw std::invalid_argument("TreeFunction: one piece per edge required");
    if (history_.empty()) history_ = PiecewisePoly::zero(-tau_, 0.0);
}

TreeFunction TreeFunction::zero(std::shared_ptr<const Tree> tree, int order, double tau) {
    std::vector<PiecewisePoly> edges;
    for (EdgeId e = 0; e < tree->num_edges(); ++e) edges.push_back(PiecewisePoly::zero(0.0, tree->length(e)));
    return TreeFunction(std::move(tree), order, tau, std::move(edges), PiecewisePoly::zero(-tau, 0.0));
}

TreeFunction& TreeFunction::operator+=(const TreeFunction& other) {
    if (other.edges_.size() != edges_.size()) throw std::invalid_argument("TreeFunction: tree mismatch");
    for (std::size_t e = 0; e < edges_.size(); ++e) edges_[e] += other.edges_[e];
    history_ += other.history_;
    return *this;
}

TreeFunction& TreeFunction::operator*=(cplx s) {
    for (auto& f : edges_) f *= s;
    history_ *= s;
    return *this;
}

}  // namespace treedamp
