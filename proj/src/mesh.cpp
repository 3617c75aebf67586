#include "treedamp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treedamp/errors.hpp"
#include "treedamp/piecewise_poly.hpp"

namespace treedamp {

std::vector<std::vector<double>> wavefront_points(const Tree& tree, double tau) {
    std::vector<double> seeds{0.0};
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        seeds.push_back(tree.end_time(e));
        seeds.push_back(tree.end_time(e) - tau);
    }
    const double tol = breakpoint_tolerance(tree.height());
    std::vector<std::vector<double>> out(tree.num_edges());
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        const double a = tree.start_time(e);
        const double b = tree.end_time(e);
        std::vector<double> pts{0.0, tree.length(e)};
        for (double g : seeds) {
            const auto kmin = static_cast<long>(std::ceil((a - g - tol) / tau));
            const auto kmax = static_cast<long>(std::floor((b - g + tol) / tau));
            for (long k = kmin; k <= kmax; ++k) {
                const double t = g + static_cast<double>(k) * tau - a;
                pts.push_back(std::clamp(t, 0.0, tree.length(e)));
            }
        }
        auto merged = merge_breakpoints(pts, {});
        merged.front() = 0.0;
        merged.back() = tree.length(e);
        out[e] = std::move(merged);
    }
    return out;
}

DelayMesh DelayMesh::build(std::shared_ptr<const Tree> tree, double tau, int q) {
    if (!(tau > 0.0)) throw ValidationError("mesh: tau must be positive");
    if (!(tau < tree->min_length())) throw ValidationError("mesh: tau must be smaller than every edge length");
    if (q < 1) throw ValidationError("mesh: refinement q must be >= 1");
    DelayMesh mesh;
    mesh.tree = tree;
    mesh.tau = tau;
    mesh.q = q;
    mesh.wavefronts = wavefront_points(*tree, tau);
    for (EdgeId e = 0; e < tree->num_edges(); ++e) {
        const auto& w = mesh.wavefronts[e];
        std::vector<double> nodes{w.front()};
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            const double gap = w[i + 1] - w[i];
            // q elements per started tau, so q -> 2q bisects every element.
            const long count = q * std::max(1L, static_cast<long>(std::ceil(gap / tau - 1e-9)));
            for (long s = 1; s < count; ++s) nodes.push_back(w[i] + gap * static_cast<double>(s) / count);
            nodes.push_back(w[i + 1]);
        }
        mesh.nodes.push_back(std::move(nodes));
    }
    return mesh;
}

DelayMesh DelayMesh::from_nodes(std::shared_ptr<const Tree> tree, double tau, std::vector<std::vector<double>> nodes) {
    if (nodes.size() != tree->num_edges()) throw ValidationError("mesh: one node list per edge required");
    for (EdgeId e = 0; e < nodes.size(); ++e) {
        auto& n = nodes[e];
        if (n.size() < 2 || n.front() != 0.0 || n.back() != tree->length(e) || !std::is_sorted(n.begin(), n.end())) {
            throw ValidationError("mesh: nodes of edge " + std::to_string(tree->original_id(e)) +
                                  " must increase from 0 to the edge length");
        }
    }
    DelayMesh mesh;
    mesh.tree = tree;
    mesh.tau = tau;
    mesh.nodes = std::move(nodes);
    mesh.wavefronts = wavefront_points(*tree, tau);
    return mesh;
}

double DelayMesh::max_width() const {
    double w = 0.0;
    for (const auto& n : nodes) {
        for (std::size_t i = 0; i + 1 < n.size(); ++i) w = std::max(w, n[i + 1] - n[i]);
    }
    return w;
}

bool DelayMesh::has_node(EdgeId e, double t) const {
    const auto& n = nodes.at(e);
    const double tol = 10 * breakpoint_tolerance(tree->height());
    auto it = std::lower_bound(n.begin(), n.end(), t - tol);
    return it != n.end() && std::abs(*it - t) <= tol;
}

std::vector<std::pair<EdgeId, double>> DelayMesh::missing_wavefronts() const {
    std::vector<std::pair<EdgeId, double>> out;
    for (EdgeId e = 0; e < nodes.size(); ++e) {
        for (double t : wavefronts[e]) {
            if (!has_node(e, t)) out.emplace_back(e, t);
        }
    }
    return out;
}

}  // namespace treedamp
