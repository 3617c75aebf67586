#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "treedamp/basis.hpp"
#include "treedamp/cauchy.hpp"
#include "treedamp/coefficients.hpp"
#include "treedamp/dense.hpp"

namespace treedamp {

/// Values of l_e w_p at every quadrature point of every edge, with their
/// weights. Each row holds the basis functions that are nonzero at t or at
/// t - tau (sparse), and the value of l_e Phi for the lift.
struct QuadratureRows {
    struct Row {
        EdgeId edge = 0;
        double t = 0.0;
        double weight = 0.0;
        cplx lift = 0.0;
        std::vector<std::pair<std::size_t, cplx>> entries;  // (dof, l_e w_dof(t))
    };
    std::vector<Row> rows;
    std::size_t dim = 0;
    int points_per_cell = 0;
};

/// Quadrature cells on each edge are bounded by mesh nodes, their images
/// under the delay shift, coefficient breakpoints and history breakpoints,
/// so every integrand is one polynomial per cell. points_per_cell <= 0
/// picks the Gauss order that integrates those polynomials exactly.
QuadratureRows build_rows(const Basis& basis, const TreeFunction& lift, const CoefficientSet& coeffs,
                          int points_per_cell = 0);

struct GramSystem {
    Matrix G;                // G(p, r) = B(w_r, w_p)
    std::vector<cplx> load;  // -B(Phi, w_p)
    std::size_t dim() const noexcept { return load.size(); }
};

/// Reference assembly: scatter every row into G.
GramSystem assemble_serial(const QuadratureRows& rows);
/// OpenMP assembly. Row p of G only depends on the quadrature rows that
/// touch dof p, so threads own disjoint rows of G and no reduction is needed.
GramSystem assemble_parallel(const QuadratureRows& rows);

/// G(p, p) = B(w_p, w_p) from the rows alone.
std::vector<double> gram_diagonal(const QuadratureRows& rows);

/// Recomputes the diagonal of G and the load with three extra Gauss points
/// per cell. Throws NumericalError when either moves by more than rel_tol.
void check_quadrature(const Basis& basis, const TreeFunction& lift, const CoefficientSet& coeffs,
                      const QuadratureRows& rows, double rel_tol = 1e-8);

struct SolverOptions {
    int q = 8;
    int degree = -1;             // element degree, -1 = 2n-1
    int quadrature_points = 0;   // per cell, 0 = exact for the integrands
    bool parallel = true;
    double pivot_floor = 1e-14;
    bool verify_quadrature = true;
};

struct DampingSolution {
    TreeFunction y;
    std::vector<PiecewisePoly> u;  // l_e y
    double energy = 0.0;
    std::shared_ptr<const Basis> basis;
    TreeFunction lift;
    std::vector<cplx> coefficients;  // y = lift + sum coefficients[p] w_p
    double min_pivot = 0.0;
    double hermitian_defect = 0.0;

    Control control() const { return Control{u}; }
};

/// Builds the mesh, basis and lift, assembles the Gram system of B on the
/// discrete space and solves it by Cholesky. Throws IndefiniteGramError if
/// positive definiteness fails.
DampingSolution solve_damping(std::shared_ptr<const Tree> tree, const CoefficientSet& coeffs,
                              const PiecewisePoly& phi, const SolverOptions& options = {});

struct OptimalityReport {
    double absolute = 0.0;  // max_p |B(y, w_p)|
    double relative = 0.0;  // max_p |B(y, w_p)| / (sqrt(B(w_p, w_p)) sqrt(J(y)))
    std::size_t worst_dof = 0;
};

/// First variation of J at y in every basis direction.
OptimalityReport optimality_check(const TreeFunction& y, const Basis& basis, const CoefficientSet& coeffs);

struct EnergyWitness {
    int trial = 0;
    double scale = 0.0;
    double energy_y = 0.0;
    double energy_perturbed = 0.0;
};

struct DominanceReport {
    bool passed = true;
    int trials = 0;
    double worst_margin = 0.0;  // min over trials of J(y+w) - J(y), relative to J(y) + J(w)
    std::optional<EnergyWitness> witness;
};

/// J(y + w) >= J(y) for random w in the discrete space at log-uniform
/// scales and random signs; the first violation is kept as a witness.
DominanceReport energy_dominance_check(const TreeFunction& y, const Basis& basis, const CoefficientSet& coeffs,
                                       int trials, std::uint64_t seed);

}  // namespace treedamp
