#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "treedamp/basis.hpp"
#include "treedamp/config.hpp"

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(TREEDAMP_TEST_DATA) / name;
}

inline treedamp::ProblemConfig fixture(const std::string& name) {
    return treedamp::load_config(data_path(name + ".json"));
}

inline std::shared_ptr<const treedamp::Tree> make_tree(const std::vector<treedamp::EdgeSpec>& edges) {
    return std::make_shared<const treedamp::Tree>(treedamp::Tree::build(edges));
}

/// Random piecewise polynomial with uneven breakpoints on [a, b].
inline treedamp::PiecewisePoly random_piecewise(std::mt19937_64& rng, double a, double b, int pieces, int degree) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> breaks{a};
    for (int i = 1; i < pieces; ++i) breaks.push_back(a + (b - a) * (i + 0.3 * u(rng)) / pieces);
    breaks.push_back(b);
    std::vector<std::vector<treedamp::cplx>> data(pieces);
    for (auto& c : data) {
        for (int k = 0; k <= degree; ++k) c.emplace_back(u(rng), u(rng));
    }
    return {breaks, data};
}

/// Arbitrary (not necessarily admissible) function on the tree, history included.
inline treedamp::TreeFunction random_tree_function(std::shared_ptr<const treedamp::Tree> tree, int order, double tau,
                                                   std::mt19937_64& rng, int pieces = 3, int degree = 4) {
    std::vector<treedamp::PiecewisePoly> edges;
    for (treedamp::EdgeId e = 0; e < tree->num_edges(); ++e) {
        edges.push_back(random_piecewise(rng, 0.0, tree->length(e), pieces, degree));
    }
    auto history = random_piecewise(rng, -tau, 0.0, 2, degree);
    return {tree, order, tau, std::move(edges), std::move(history)};
}

/// Random element of the discrete space of `basis`.
inline treedamp::TreeFunction random_member(const treedamp::Basis& basis, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<treedamp::cplx> c(basis.size());
    for (auto& x : c) x = {g(rng), g(rng)};
    return basis.function(c);
}
