#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "treedamp/errors.hpp"
#include "treedamp/tree.hpp"

using namespace treedamp;

namespace {

std::vector<EdgeSpec> nine_edge_tree(double length = 1.0) {
    const std::pair<int, int> parent[] = {{1, 0}, {2, 1}, {3, 1}, {4, 2}, {5, 2}, {6, 3}, {7, 3}, {8, 3}, {9, 3}};
    std::vector<EdgeSpec> edges;
    for (const auto& [id, p] : parent) edges.push_back({id, p, length});
    return edges;
}

std::vector<int> ids(const Tree& tree, const std::vector<EdgeId>& path) {
    std::vector<int> out;
    for (EdgeId e : path) out.push_back(tree.original_id(e));
    return out;
}

}  // namespace

TEST_CASE("nine-edge tree has three internal vertices") {
    const Tree tree = Tree::build(nine_edge_tree());
    CHECK(tree.num_edges() == 9);
    CHECK(tree.num_internal() == 3);
    std::vector<int> v3;
    for (EdgeId c : tree.children(tree.canonical(3))) v3.push_back(tree.original_id(c));
    std::sort(v3.begin(), v3.end());
    CHECK(v3 == std::vector<int>{6, 7, 8, 9});
    for (EdgeId e = 0; e < tree.num_edges(); ++e) CHECK(tree.is_internal(e) == !tree.children(e).empty());
    CHECK(tree.original_id(0) == 1);
}

TEST_CASE("single edge is a plain interval") {
    const Tree tree = Tree::build({{1, 0, 5.0}});
    CHECK(tree.num_edges() == 1);
    CHECK(tree.num_internal() == 0);
    CHECK(tree.height() == doctest::Approx(5.0));
}

TEST_CASE("malformed parent maps are rejected") {
    CHECK_THROWS_AS(Tree::build({{1, 2, 1.0}, {2, 1, 1.0}}), ValidationError);
    CHECK_THROWS_AS(Tree::build({{1, 0, 1.0}, {2, 0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(Tree::build({{1, 0, 1.0}, {2, 7, 1.0}}), ValidationError);
    CHECK_THROWS_AS(Tree::build({{1, 0, 1.0}, {1, 1, 1.0}}), ValidationError);
    CHECK_THROWS_AS(Tree::build({{1, 0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(Tree::build({{1, 0, -2.0}}), ValidationError);
    CHECK_THROWS_AS(Tree::build({}), ValidationError);
    // Rooted part is fine but 3 <-> 4 form a detached cycle.
    CHECK_THROWS_AS(Tree::build({{1, 0, 1.0}, {2, 1, 1.0}, {3, 4, 1.0}, {4, 3, 1.0}}), ValidationError);
}

TEST_CASE("path to root") {
    const Tree tree = Tree::build(nine_edge_tree());
    CHECK(ids(tree, tree.path_to_root(tree.canonical(7))) == std::vector<int>{7, 3, 1});
    CHECK(ids(tree, tree.path_to_root(tree.canonical(5))) == std::vector<int>{5, 2, 1});
    CHECK(ids(tree, tree.path_to_root(tree.canonical(1))) == std::vector<int>{1});
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        const auto path = tree.path_to_root(e);
        CHECK(path.size() <= tree.num_edges());
        CHECK(path.front() == e);
        CHECK(path.back() == 0);
    }
}

TEST_CASE("height") {
    CHECK(Tree::build({{1, 0, 2.0}, {2, 1, 3.0}, {3, 1, 1.0}}).height() == doctest::Approx(5.0));
    // Every root path of the nine-edge tree has three edges.
    CHECK(Tree::build(nine_edge_tree(1.0)).height() == doctest::Approx(3.0));
}

TEST_CASE("vertex classification") {
    const Tree tree = Tree::build(nine_edge_tree());
    CHECK(tree.vertex_class(0).kind == VertexKind::Root);
    for (std::size_t v = 1; v <= tree.num_edges(); ++v) {
        const auto cls = tree.vertex_class(v);
        CHECK((cls.kind == VertexKind::Internal) == (v <= tree.num_internal()));
    }
}

TEST_CASE("canonical order: internal edges first, parents before children") {
    const Tree tree = Tree::build({{40, 10, 1.0}, {10, 0, 2.0}, {30, 20, 1.5}, {20, 10, 1.0}, {50, 20, 1.0}});
    CHECK(tree.original_id(0) == 10);
    CHECK(tree.num_internal() == 2);
    CHECK(tree.original_id(1) == 20);
    for (EdgeId e : tree.topological_order()) {
        if (auto p = tree.parent(e)) {
            const auto& topo = tree.topological_order();
            CHECK(std::find(topo.begin(), topo.end(), *p) < std::find(topo.begin(), topo.end(), e));
        }
    }
    CHECK(tree.start_time(tree.canonical(30)) == doctest::Approx(3.0));
    CHECK(tree.end_time(tree.canonical(30)) == doctest::Approx(4.5));
}

TEST_CASE("property: every edge has exactly one parent vertex") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 30);
        std::vector<EdgeSpec> edges{{1, 0, 1.0}};
        for (int id = 2; id <= m; ++id) edges.push_back({id, 1 + static_cast<int>(rng() % (id - 1)), 0.5 + rng() % 5});
        const Tree tree = Tree::build(edges);
        std::size_t total = 1;  // the root vertex carries edge 1
        for (EdgeId e = 0; e < tree.num_internal(); ++e) total += tree.children(e).size();
        CHECK(total == tree.num_edges());
    }
}

TEST_CASE("property: height does not depend on edge labels") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 20);
        std::vector<EdgeSpec> edges{{1, 0, 1.0 + rng() % 3}};
        for (int id = 2; id <= m; ++id) {
            edges.push_back({id, 1 + static_cast<int>(rng() % (id - 1)), 0.25 + 0.5 * (rng() % 7)});
        }
        std::vector<int> relabel(m);
        std::iota(relabel.begin(), relabel.end(), 101);
        std::shuffle(relabel.begin(), relabel.end(), rng);
        std::vector<EdgeSpec> renamed;
        for (const auto& e : edges) {
            renamed.push_back({relabel[e.id - 1], e.parent == 0 ? 0 : relabel[e.parent - 1], e.length});
        }
        std::shuffle(renamed.begin(), renamed.end(), rng);
        CHECK(Tree::build(edges).height() == doctest::Approx(Tree::build(renamed).height()));
        CHECK(Tree::build(edges).num_internal() == Tree::build(renamed).num_internal());
    }
}
