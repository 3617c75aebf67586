#pragma once

#include <memory>
#include <vector>

#include "treedamp/tree.hpp"

namespace treedamp {

/// Per-edge element nodes aligned with the delay wavefronts.
///
/// Wavefronts are the points whose global time differs by a multiple of
/// tau from the root start, from a vertex, or from a point T_e - tau. They
/// are where the trajectory may lose smoothness; every one is a node.
struct DelayMesh {
    std::shared_ptr<const Tree> tree;
    double tau = 0.0;
    int q = 0;  // elements per tau; 0 for meshes built from raw nodes
    std::vector<std::vector<double>> nodes;
    std::vector<std::vector<double>> wavefronts;

    /// Throws ValidationError unless 0 < tau < every edge length and q >= 1.
    static DelayMesh build(std::shared_ptr<const Tree> tree, double tau, int q);
    /// Wrap caller-provided nodes (no wavefront guarantee; see missing_wavefronts).
    static DelayMesh from_nodes(std::shared_ptr<const Tree> tree, double tau, std::vector<std::vector<double>> nodes);

    double max_width() const;
    bool has_node(EdgeId e, double t) const;
    /// Wavefront points that are not nodes, as (edge, t) pairs.
    std::vector<std::pair<EdgeId, double>> missing_wavefronts() const;
};

std::vector<std::vector<double>> wavefront_points(const Tree& tree, double tau);

}  // namespace treedamp
