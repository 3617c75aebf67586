#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles/dense_assembly.hpp"
#include "oracles/fd_oracle.hpp"
#include "treedamp/damping.hpp"
#include "treedamp/errors.hpp"
#include "treedamp/expressions.hpp"

using namespace treedamp;

namespace {

DampingSolution solve_fixture(const ProblemConfig& cfg, int q, bool parallel = true) {
    auto options = cfg.solver;
    options.q = q;
    options.parallel = parallel;
    return solve_damping(cfg.tree, cfg.coeffs, cfg.history, options);
}

double max_entry(const Matrix& a) {
    double m = 0.0;
    for (const auto& v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("a system at rest needs no control") {
    const auto cfg = fixture("at_rest");
    const auto sol = solve_fixture(cfg, 2);
    CHECK(sol.energy == 0.0);
    for (const auto& f : sol.y.edges()) CHECK(f.max_abs() == 0.0);
    for (const auto& f : sol.u) CHECK(f.max_abs() == 0.0);
}

TEST_CASE("single unknown: hand-computed Gram entry and energy") {
    // y' alone on [0, 3] with tau = 1 and q = 1: the only free function is
    // the hat on [0, 2], so l w = +1 then -1 and G = 2. The lift 1 - t/2 has
    // l Phi = -1/2, which is orthogonal to l w, hence J = 1/2.
    const auto cfg = fixture("degenerate");
    auto mesh = std::make_shared<const DelayMesh>(DelayMesh::build(cfg.tree, cfg.tau, 1));
    const auto basis = Basis::build(mesh, 1);
    REQUIRE(basis.size() == 1);
    const auto lift = lift_history(*mesh, 1, cfg.history);
    const auto sys = assemble_serial(build_rows(basis, lift, cfg.coeffs));
    CHECK(std::abs(sys.G(0, 0) - cplx{2.0}) < 1e-14);
    CHECK(std::abs(sys.load[0]) < 1e-14);
    CHECK(solve_fixture(cfg, 1).energy == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("quadrature assembly matches the exact pairwise form") {
    for (const char* name : {"star", "smoothness_loss", "interval", "at_rest"}) {
        const auto cfg = fixture(name);
        auto mesh = std::make_shared<const DelayMesh>(DelayMesh::build(cfg.tree, cfg.tau, 2));
        const auto basis = Basis::build(mesh, cfg.order, cfg.solver.degree);
        const auto lift = lift_history(*mesh, cfg.order, cfg.history);
        const auto sys = assemble_serial(build_rows(basis, lift, cfg.coeffs));
        const auto dense = oracle::dense_gram(basis, lift, cfg.coeffs);
        const double scale = std::max(1.0, max_entry(dense.G));
        for (std::size_t p = 0; p < basis.size(); ++p) {
            for (std::size_t r = 0; r < basis.size(); ++r) CHECK(std::abs(sys.G(p, r) - dense.G(p, r)) < 1e-9 * scale);
            CHECK(std::abs(sys.load[p] - dense.load[p]) < 1e-9 * scale);
        }
        CAPTURE(name);
        CHECK(hermitian_defect(sys.G) < 1e-12 * scale);
    }
}

TEST_CASE("parallel and serial kernels agree") {
    const auto cfg = fixture("star");
    auto mesh = std::make_shared<const DelayMesh>(DelayMesh::build(cfg.tree, cfg.tau, 8));
    const auto basis = Basis::build(mesh, cfg.order, cfg.solver.degree);
    const auto lift = lift_history(*mesh, cfg.order, cfg.history);
    const auto rows = build_rows(basis, lift, cfg.coeffs);
    const auto serial = assemble_serial(rows);
    const auto parallel = assemble_parallel(rows);
    CHECK(serial.G.data() == parallel.G.data());
    CHECK(serial.load == parallel.load);

    const auto f1 = cholesky_serial(serial.G);
    const auto f2 = cholesky_parallel(serial.G);
    const double scale = max_entry(f1.lower);
    for (std::size_t i = 0; i < f1.lower.data().size(); ++i) {
        CHECK(std::abs(f1.lower.data()[i] - f2.lower.data()[i]) < 1e-12 * scale);
    }
    CHECK(f1.min_pivot == doctest::Approx(f2.min_pivot).epsilon(1e-10));

    const auto a = solve_fixture(cfg, 8, false);
    const auto b = solve_fixture(cfg, 8, true);
    CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-12));
}

TEST_CASE("Cholesky reconstructs the matrix and detects indefiniteness") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const std::size_t n = 12;
    Matrix m(n, n);
    for (auto& v : m.data()) v = {g(rng), g(rng)};
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) a(i, j) += m(i, k) * std::conj(m(j, k));
        }
    }
    for (auto factor : {cholesky_serial(a), cholesky_parallel(a)}) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += factor.lower(i, k) * std::conj(factor.lower(j, k));
                CHECK(std::abs(acc - a(i, j)) < 1e-10 * max_entry(a));
            }
        }
        std::vector<cplx> b(n);
        for (auto& v : b) v = {g(rng), g(rng)};
        const auto x = cholesky_solve(factor, b);
        const auto ax = a * x;
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ax[i] - b[i]) < 1e-9 * max_entry(a));
    }
    a(3, 3) = -1.0;
    CHECK_THROWS_AS(cholesky_serial(a), IndefiniteGramError);
    CHECK_THROWS_AS(cholesky_parallel(a), IndefiniteGramError);
}

TEST_CASE("the straight-line minimizer of the degenerate problem") {
    const auto cfg = fixture("degenerate");
    const double fd = oracle::interval_energy_fd(0.0, 0.0, 0.0, 1.0, 3.0, 256, [](double) { return 1.0; });
    for (int q : {1, 4, 16}) CHECK(solve_fixture(cfg, q).energy == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(fd - 0.5) < 1e-6);
}

TEST_CASE("interval energy agrees with the finite-difference minimizer") {
    const auto cfg = fixture("interval");
    const double fd = oracle::interval_energy_fd(0.5, 1.0, 0.25, 1.0, 3.0, 128, [](double t) { return 1.0 + t; });
    const double J = solve_fixture(cfg, 32).energy;
    CHECK(std::abs(J - fd) < 1e-3 * fd);
}

TEST_CASE("property: energy never increases under nested refinement") {
    for (const char* name : {"star", "interval", "smoothness_loss"}) {
        const auto cfg = fixture(name);
        double previous = INFINITY;
        for (int q : {1, 2, 4, 8}) {
            const double J = solve_fixture(cfg, q).energy;
            CAPTURE(name);
            CAPTURE(q);
            CHECK(J <= previous * (1.0 + 1e-12));
            previous = J;
        }
    }
}

TEST_CASE("property: the minimizer depends linearly on the history") {
    std::mt19937_64 rng(13);
    const auto cfg = fixture("star");
    auto options = cfg.solver;
    options.q = 4;
    const auto phi1 = random_piecewise(rng, -cfg.tau, 0.0, 1, 2);
    const auto phi2 = random_piecewise(rng, -cfg.tau, 0.0, 1, 2);
    const cplx alpha{-0.6, 1.3};
    const auto y1 = solve_damping(cfg.tree, cfg.coeffs, phi1, options).y;
    const auto y2 = solve_damping(cfg.tree, cfg.coeffs, phi2, options).y;
    const auto y = solve_damping(cfg.tree, cfg.coeffs, alpha * phi1 + phi2, options).y;
    const auto expected = alpha * y1 + y2;
    for (EdgeId e = 0; e < cfg.tree->num_edges(); ++e) {
        CHECK((y.edge(e) - expected.edge(e)).max_abs() < 1e-9 * std::max(1.0, expected.edge(e).max_abs()));
    }
}

TEST_CASE("the computed trajectory is stationary and minimal") {
    for (const char* name : {"star", "interval", "smoothness_loss", "degenerate"}) {
        const auto cfg = fixture(name);
        const auto sol = solve_fixture(cfg, 4);
        const auto opt = optimality_check(sol.y, *sol.basis, cfg.coeffs);
        CAPTURE(name);
        CHECK(opt.relative <= 1e-8);
        const auto dom = energy_dominance_check(sol.y, *sol.basis, cfg.coeffs, 50, 99);
        CHECK(dom.passed);
        CHECK_FALSE(dom.witness.has_value());
        CHECK(sol.energy == doctest::Approx(energy(sol.y, cfg.coeffs)).epsilon(1e-12));
        CHECK(check_membership(sol.y - sol.lift, 1e-10).ok);
    }
}

TEST_CASE("a corrupted trajectory is caught with a witness") {
    const auto cfg = fixture("star");
    const auto sol = solve_fixture(cfg, 4);
    const auto bad = sol.y + sol.basis->basis_function(sol.basis->size() / 2) * cplx{0.2};
    CHECK(optimality_check(bad, *sol.basis, cfg.coeffs).relative > 1e-3);
    const auto dom = energy_dominance_check(bad, *sol.basis, cfg.coeffs, 200, 5);
    CHECK_FALSE(dom.passed);
    REQUIRE(dom.witness.has_value());
    CHECK(dom.witness->energy_perturbed < dom.witness->energy_y);
}

TEST_CASE("a vanishing leading coefficient is refused") {
    const auto cfg = fixture("interval");
    SUBCASE("sign change is a validation error") {
        auto coeffs = cfg.coeffs;
        coeffs.b[1][0] = PiecewisePoly::from_monomial(0.0, 3.0, std::vector<cplx>{-1.5, 1.0});
        CHECK_THROWS_AS(solve_damping(cfg.tree, coeffs, cfg.history), ValidationError);
    }
    SUBCASE("an all-zero system is singular at assembly level") {
        const auto coeffs = CoefficientSet::zeros(*cfg.tree, 1, cfg.tau);
        auto mesh = std::make_shared<const DelayMesh>(DelayMesh::build(cfg.tree, cfg.tau, 4));
        const auto basis = Basis::build(mesh, 1);
        const auto lift = lift_history(*mesh, 1, cfg.history);
        const auto sys = assemble_serial(build_rows(basis, lift, coeffs));
        CHECK_THROWS_AS(cholesky_serial(sys.G), IndefiniteGramError);
        CHECK_THROWS_AS(solve_damping(cfg.tree, coeffs, cfg.history), ValidationError);
    }
}

TEST_CASE("too few quadrature points are reported") {
    const auto cfg = fixture("star");
    auto options = cfg.solver;
    options.q = 2;
    options.quadrature_points = 1;
    CHECK_THROWS_AS(solve_damping(cfg.tree, cfg.coeffs, cfg.history, options), NumericalError);
}

TEST_CASE("property: random admissible coefficients give a positive definite Gram matrix") {
    std::mt19937_64 rng(77);
    const auto cfg = fixture("star");
    for (int trial = 0; trial < 5; ++trial) {
        auto coeffs = CoefficientSet::zeros(*cfg.tree, 1, cfg.tau);
        for (EdgeId e = 0; e < cfg.tree->num_edges(); ++e) {
            const double T = cfg.tree->length(e);
            coeffs.b[1][e] = PiecewisePoly::constant(0.0, T, 1.0) + random_piecewise(rng, 0.0, T, 2, 1) * cplx{0.3};
            coeffs.c[1][e] = random_piecewise(rng, 0.0, T, 2, 1) * cplx{0.5};
            coeffs.b[0][e] = random_piecewise(rng, 0.0, T, 1, 2);
            coeffs.c[0][e] = random_piecewise(rng, 0.0, T, 1, 2);
        }
        SolverOptions options;
        options.q = 3;
        const auto sol = solve_damping(cfg.tree, coeffs, cfg.history, options);
        CHECK(sol.min_pivot > 0.0);
        CHECK(optimality_check(sol.y, *sol.basis, coeffs).relative <= 1e-8);
    }
}
