#include "treedamp/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>

#include "treedamp/errors.hpp"

namespace treedamp {

Tree Tree::build(const std::vector<EdgeSpec>& edges) {
    if (edges.empty()) throw ValidationError("tree: no edges");

    std::map<int, std::size_t> by_id;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (e.id == 0) throw ValidationError("tree: edge id 0 is reserved for the root vertex");
        if (!by_id.emplace(e.id, i).second) {
            throw ValidationError("tree: duplicate edge id " + std::to_string(e.id));
        }
        if (!(e.length > 0.0) || !std::isfinite(e.length)) {
            throw ValidationError("tree: edge " + std::to_string(e.id) + " has nonpositive length");
        }
    }

    std::vector<std::size_t> roots;
    std::vector<std::vector<std::size_t>> kids(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const int p = edges[i].parent;
        if (p == 0) {
            roots.push_back(i);
            continue;
        }
        auto it = by_id.find(p);
        if (it == by_id.end()) {
            throw ValidationError("tree: edge " + std::to_string(edges[i].id) +
                                  " references unknown parent " + std::to_string(p));
        }
        kids[it->second].push_back(i);
    }
    if (roots.empty()) throw ValidationError("tree: no root edge (parent 0); the parent relation has a cycle");
    if (roots.size() > 1) throw ValidationError("tree: multiple root edges");

    // Breadth-first from the root; anything unreached sits on a cycle.
    std::vector<std::size_t> bfs;
    std::deque<std::size_t> queue{roots.front()};
    std::vector<bool> seen(edges.size(), false);
    seen[roots.front()] = true;
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        bfs.push_back(i);
        auto sorted = kids[i];
        std::sort(sorted.begin(), sorted.end(),
                  [&](std::size_t a, std::size_t b) { return edges[a].id < edges[b].id; });
        for (std::size_t c : sorted) {
            if (seen[c]) throw ValidationError("tree: cycle detected");
            seen[c] = true;
            queue.push_back(c);
        }
    }
    if (bfs.size() != edges.size()) {
        throw ValidationError("tree: parent relation has a cycle or a disconnected edge");
    }

    std::vector<std::size_t> order;
    for (std::size_t i : bfs) {
        if (!kids[i].empty()) order.push_back(i);
    }
    const std::size_t d = order.size();
    for (std::size_t i : bfs) {
        if (kids[i].empty()) order.push_back(i);
    }

    std::vector<EdgeId> canon(edges.size());
    for (std::size_t c = 0; c < order.size(); ++c) canon[order[c]] = c;

    Tree t;
    const std::size_t m = edges.size();
    t.num_internal_ = d;
    t.lengths_.resize(m);
    t.parent_.assign(m, -1);
    t.children_.assign(m, {});
    t.original_ids_.resize(m);
    for (std::size_t c = 0; c < m; ++c) {
        const auto& spec = edges[order[c]];
        t.lengths_[c] = spec.length;
        t.original_ids_[c] = spec.id;
        if (spec.parent != 0) t.parent_[c] = static_cast<std::ptrdiff_t>(canon[by_id.at(spec.parent)]);
    }
    for (std::size_t c = 0; c < m; ++c) {
        if (t.parent_[c] >= 0) t.children_[static_cast<std::size_t>(t.parent_[c])].push_back(c);
    }
    for (std::size_t i : bfs) t.topo_.push_back(canon[i]);
    t.start_time_.assign(m, 0.0);
    for (EdgeId e : t.topo_) {
        if (t.parent_[e] >= 0) t.start_time_[e] = t.end_time(static_cast<EdgeId>(t.parent_[e]));
    }
    return t;
}

std::optional<EdgeId> Tree::parent(EdgeId e) const {
    const auto p = parent_.at(e);
    if (p < 0) return std::nullopt;
    return static_cast<EdgeId>(p);
}

std::vector<EdgeId> Tree::path_to_root(EdgeId e) const {
    std::vector<EdgeId> path{e};
    // Bounded by construction: parents are acyclic.
    while (parent_.at(path.back()) >= 0) path.push_back(static_cast<EdgeId>(parent_[path.back()]));
    return path;
}

double Tree::height() const {
    double h = 0.0;
    for (EdgeId e = num_internal_; e < num_edges(); ++e) h = std::max(h, end_time(e));
    return h;
}

double Tree::min_length() const { return *std::min_element(lengths_.begin(), lengths_.end()); }

VertexClass Tree::vertex_class(std::size_t vertex) const {
    if (vertex == 0) return {VertexKind::Root, 0};
    if (vertex > num_edges()) throw std::out_of_range("vertex index");
    return {vertex <= num_internal_ ? VertexKind::Internal : VertexKind::Boundary, vertex};
}

EdgeId Tree::canonical(int original_id) const {
    auto it = std::find(original_ids_.begin(), original_ids_.end(), original_id);
    if (it == original_ids_.end()) throw ValidationError("tree: unknown edge id " + std::to_string(original_id));
    return static_cast<EdgeId>(it - original_ids_.begin());
}

}  // namespace treedamp
