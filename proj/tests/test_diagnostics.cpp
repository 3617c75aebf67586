#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "treedamp/damping.hpp"
#include "treedamp/diagnostics.hpp"
#include "treedamp/expressions.hpp"

using namespace treedamp;

namespace {

// y^(k)(t) on the root edge with the history in front, any k.
cplx raw(const TreeFunction& y, double t, int k) {
    return t < 0.0 ? y.history().derivative_at(t, k) : y.edge(0).derivative_at(t, k);
}

// Points well inside the pieces of a random function on [0, 3].
const double kProbe[] = {0.137, 0.452, 0.861, 1.318, 1.594, 1.777};

DampingSolution solve_fixture(const ProblemConfig& cfg, int q, int degree) {
    auto options = cfg.solver;
    options.q = q;
    options.degree = degree;
    return solve_damping(cfg.tree, cfg.coeffs, cfg.history, options);
}

}  // namespace

TEST_CASE("first-order neutral case: y<1> = Ay + By, y<2> = -(Ay)' + Cy") {
    const double a = 0.5, b = 1.0, c = 0.25, tau = 1.0;
    // One smooth piece per delay interval keeps every probe away from breaks.
    auto tree = make_tree({{1, 0, 3.0}});
    std::mt19937_64 rng(6);
    auto piece = [&](double lo, double hi) { return random_piecewise(rng, lo, hi, 1, 5); };
    const TreeFunction y(tree, 1, tau,
                         {PiecewisePoly::concat(PiecewisePoly::concat(piece(0.0, 1.0), piece(1.0, 2.0)), piece(2.0, 3.0))},
                         piece(-1.0, 0.0));
    const auto coeffs = CoefficientSet::constant(*tree, 1, tau, {b, 1.0}, {c, a});
    const auto qd = quasi_derivatives(y, coeffs);
    for (double t : kProbe) {
        const cplx Ay = (1 + a * a) * raw(y, t, 1) + a * raw(y, t - tau, 1) + a * raw(y, t + tau, 1);
        const cplx dAy = (1 + a * a) * raw(y, t, 2) + a * raw(y, t - tau, 2) + a * raw(y, t + tau, 2);
        const cplx By = (a * c + b) * raw(y, t, 0) + c * raw(y, t - tau, 0) + a * b * raw(y, t + tau, 0);
        const cplx Cy = (a * b - c) * (raw(y, t - tau, 1) - raw(y, t + tau, 1)) + (b * b + c * c) * raw(y, t, 0) +
                        b * c * (raw(y, t - tau, 0) + raw(y, t + tau, 0));
        CHECK(std::abs(qd.at(0, 1)(t) - (Ay + By)) < 1e-11);
        CHECK(std::abs(qd.at(0, 2)(t) - (Cy - dAy)) < 1e-11);
    }
}

TEST_CASE("second-order delay case: y<2> and y<3> in closed form") {
    const double tau = 1.0;
    auto tree = make_tree({{1, 0, 4.0}});
    std::mt19937_64 rng(10);
    auto piece = [&](double lo, double hi) { return random_piecewise(rng, lo, hi, 1, 6); };
    auto edge = piece(0.0, 1.0);
    for (double lo : {1.0, 2.0, 3.0}) edge = PiecewisePoly::concat(edge, piece(lo, lo + 1.0));
    const TreeFunction y(tree, 2, tau, {edge}, piece(-1.0, 0.0));
    const auto coeffs = CoefficientSet::constant(*tree, 2, tau, {0.0, 0.0, 1.0}, {0.0, 1.0, 0.0});
    const auto qd = quasi_derivatives(y, coeffs);
    for (double t : {0.2, 0.7, 1.4, 2.3, 2.9}) {
        CHECK(std::abs(qd.at(0, 2)(t) - (raw(y, t, 2) + raw(y, t - tau, 1))) < 1e-11);
        const cplx y3 = -raw(y, t, 3) + raw(y, t + tau, 2) - raw(y, t - tau, 2) + raw(y, t, 1);
        CHECK(std::abs(qd.at(0, 3)(t) - y3) < 1e-10);
    }
}

TEST_CASE("zero function has zero quasi-derivatives") {
    const auto cfg = fixture("star");
    const auto qd = quasi_derivatives(TreeFunction::zero(cfg.tree, 1, cfg.tau), cfg.coeffs);
    for (EdgeId e = 0; e < 3; ++e) {
        for (int k = 1; k <= 2; ++k) CHECK(qd.at(e, k).max_abs() == 0.0);
    }
    for (const auto& j : qd.jumps) CHECK(j.value == cplx{0.0});
    CHECK(max_residual(kirchhoff_residual(qd, *cfg.tree)) == 0.0);
}

TEST_CASE("an interval has no vertex conditions") {
    const auto cfg = fixture("interval");
    const auto sol = solve_fixture(cfg, 4, -1);
    CHECK(kirchhoff_residual(quasi_derivatives(sol.y, cfg.coeffs), *cfg.tree).empty());
}

TEST_CASE("Kirchhoff balance for y' + b0 y + c0 y(t - tau) reduces to the explicit vertex formula") {
    std::mt19937_64 rng(15);
    auto tree = make_tree({{1, 0, 2.0}, {2, 1, 1.5}, {3, 1, 2.5}, {4, 1, 1.8}});
    const double tau = 0.6;
    auto coeffs = CoefficientSet::zeros(*tree, 1, tau);
    for (EdgeId e = 0; e < tree->num_edges(); ++e) {
        const double T = tree->length(e);
        coeffs.b[1][e] = PiecewisePoly::constant(0.0, T, 1.0);
        coeffs.b[0][e] = random_piecewise(rng, 0.0, T, 1, 2);
        coeffs.c[0][e] = random_piecewise(rng, 0.0, T, 1, 2);
    }
    auto mesh = std::make_shared<const DelayMesh>(DelayMesh::build(tree, tau, 3));
    const auto basis = Basis::build(mesh, 1, 3);
    for (int trial = 0; trial < 5; ++trial) {
        const auto y = random_member(basis, rng);
        const auto entries = kirchhoff_residual(quasi_derivatives(y, coeffs, mesh.get()), *tree);
        REQUIRE(entries.size() == 1);
        const double T1 = tree->length(0);
        const auto& y1 = y.edge(0);
        cplx b_sum = 0.0, c_sum = 0.0, dy_sum = 0.0;
        for (EdgeId v : tree->children(0)) {
            b_sum += coeffs.b[0][v](0.0);
            c_sum += coeffs.c[0][v](0.0);
            dy_sum += y.edge(v).derivative_at(0.0, 1);
        }
        const cplx lhs = y1.derivative_at(T1, 1, Side::Left) + (coeffs.b[0][0](T1, Side::Left) - b_sum) * y1(T1, Side::Left) +
                         (coeffs.c[0][0](T1, Side::Left) - c_sum) * y1(T1 - tau);
        CHECK(std::abs((entries[0].incoming - entries[0].outgoing) - (lhs - dy_sum)) < 1e-11);
    }
}

TEST_CASE("Kirchhoff residual of the minimizer shrinks under refinement") {
    const auto cfg = fixture("star");
    std::vector<double> residual;
    for (int q : {2, 4, 8}) {
        const auto sol = solve_fixture(cfg, q, 3);
        residual.push_back(max_residual(kirchhoff_residual(quasi_derivatives(sol.y, cfg.coeffs), *cfg.tree)));
    }
    for (std::size_t i = 1; i < residual.size(); ++i) CHECK(residual[i] < residual[i - 1] / 4);
}

TEST_CASE("the weak residual and the first variation agree") {
    std::mt19937_64 rng(25);
    for (const char* name : {"star", "interval", "smoothness_loss", "at_rest"}) {
        const auto cfg = fixture(name);
        const auto sol = solve_fixture(cfg, 3, cfg.solver.degree);
        const auto y = sol.y + random_member(*sol.basis, rng) * cplx{0.01};
        const auto direct = optimality_check(y, *sol.basis, cfg.coeffs);
        const auto moved = weak_bvp_residual(y, *sol.basis, cfg.coeffs);
        CAPTURE(name);
        CHECK(std::abs(direct.absolute - moved.absolute) <= 1e-12 * std::max(1.0, direct.absolute));
        CHECK(std::abs(direct.relative - moved.relative) <= 1e-10 * std::max(1.0, direct.relative));
        const auto at_min = weak_bvp_residual(sol.y, *sol.basis, cfg.coeffs);
        CHECK(at_min.relative <= 1e-8);
    }
}

TEST_CASE("recursive and unrolled quasi-derivatives coincide") {
    std::mt19937_64 rng(29);
    for (const char* name : {"star", "interval", "smoothness_loss", "at_rest", "degenerate"}) {
        const auto cfg = fixture(name);
        const auto sol = solve_fixture(cfg, 3, cfg.solver.degree);
        CAPTURE(name);
        CHECK(compare_g_paths(quasi_derivatives(sol.y, cfg.coeffs), g_unrolled(sol.y, cfg.coeffs)) <= 1e-12);
        const auto y = random_tree_function(cfg.tree, cfg.order, cfg.tau, rng);
        CHECK(compare_g_paths(quasi_derivatives(y, cfg.coeffs), g_unrolled(y, cfg.coeffs)) <= 1e-12);
    }
}

TEST_CASE("jumps are located and labelled") {
    const auto cfg = fixture("smoothness_loss");
    auto mesh = std::make_shared<const DelayMesh>(DelayMesh::build(cfg.tree, cfg.tau, 3));
    const auto sol = solve_fixture(cfg, 3, -1);
    const auto qd = quasi_derivatives(sol.y, cfg.coeffs, mesh.get());
    bool off_node_at_half = false;
    for (const auto& j : qd.jumps) {
        CHECK(j.t > 0.0);
        CHECK(j.t < cfg.tree->length(j.edge) - cfg.tau + 1e-12);
        CHECK(j.mesh_node == mesh->has_node(j.edge, j.t));
        if (std::abs(j.t - 0.5) < 1e-12 && j.order == 3) off_node_at_half = !j.mesh_node;
    }
    // The history kink at -tau/2 reappears at tau/2, which q = 3 keeps off the nodes.
    CHECK(off_node_at_half);
    const auto report = continuity_report(qd);
    REQUIRE(report.size() == 2);
    CHECK(report[0].order == 2);
    CHECK(report[1].order == 3);
    CHECK(report[1].max_jump >= 0.9);
}
