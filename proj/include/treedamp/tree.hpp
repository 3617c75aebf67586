#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace treedamp {

/// Edge index in canonical order (0-based). Canonical order puts the
/// internal edges (those whose end vertex has children) first, root edge at
/// index 0, followed by the boundary edges; each group in breadth-first
/// order. Vertex j+1 is the end point of edge j, vertex 0 is the root.
using EdgeId = std::size_t;

/// One edge as supplied by the user: its own id, the id of the edge it
/// hangs from (0 for the root edge), and its length.
struct EdgeSpec {
    int id = 0;
    int parent = 0;
    double length = 0.0;
};

enum class VertexKind { Root, Internal, Boundary };

struct VertexClass {
    VertexKind kind;
    std::size_t index;  // vertex number, 0 = root
};

/// Rooted metric tree with time-parametrized edges. Immutable once built.
class Tree {
public:
    /// Validates and canonicalizes. Throws ValidationError on a missing or
    /// duplicate root, cycles, dangling parents, duplicate ids or
    /// nonpositive lengths.
    static Tree build(const std::vector<EdgeSpec>& edges);

    std::size_t num_edges() const noexcept { return lengths_.size(); }
    /// Number of internal vertices d; edges 0..d-1 are internal.
    std::size_t num_internal() const noexcept { return num_internal_; }
    bool is_internal(EdgeId e) const noexcept { return e < num_internal_; }
    bool is_boundary(EdgeId e) const noexcept { return e >= num_internal_; }

    double length(EdgeId e) const { return lengths_.at(e); }
    const std::vector<double>& lengths() const noexcept { return lengths_; }
    /// Parent edge, empty for the root edge.
    std::optional<EdgeId> parent(EdgeId e) const;
    /// Edges leaving the end vertex of e (the set V of that vertex).
    const std::vector<EdgeId>& children(EdgeId e) const { return children_.at(e); }

    /// Edge chain from e up to the root edge, both included.
    std::vector<EdgeId> path_to_root(EdgeId e) const;
    /// Global time at which edge e starts (sum of ancestor lengths).
    double start_time(EdgeId e) const { return start_time_.at(e); }
    double end_time(EdgeId e) const { return start_time_.at(e) + lengths_.at(e); }
    /// Max over boundary edges of the root-path length.
    double height() const;
    double min_length() const;

    VertexClass vertex_class(std::size_t vertex) const;

    /// User-facing id of canonical edge e, and the inverse lookup.
    int original_id(EdgeId e) const { return original_ids_.at(e); }
    EdgeId canonical(int original_id) const;

    /// Edges in an order where every parent precedes its children.
    const std::vector<EdgeId>& topological_order() const noexcept { return topo_; }

private:
    std::vector<double> lengths_;
    std::vector<std::ptrdiff_t> parent_;  // -1 for the root edge
    std::vector<std::vector<EdgeId>> children_;
    std::vector<double> start_time_;
    std::vector<int> original_ids_;
    std::vector<EdgeId> topo_;
    std::size_t num_internal_ = 0;
};

}  // namespace treedamp
