#include "treedamp/damping.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "treedamp/errors.hpp"
#include "treedamp/expressions.hpp"
#include "treedamp/quadrature.hpp"

namespace treedamp {

namespace {

double eval_real_derivative(const std::vector<double>& c, double s, int k) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > static_cast<std::size_t>(k);) {
        double f = 1.0;
        for (int r = 0; r < k; ++r) f *= static_cast<double>(i - r);
        acc = acc * s + f * c[i];
    }
    return acc;
}

void add_entry(std::vector<std::pair<std::size_t, cplx>>& entries, std::size_t dof, cplx v) {
    for (auto& [d, x] : entries) {
        if (d == dof) {
            x += v;
            return;
        }
    }
    entries.emplace_back(dof, v);
}

// sum_k weight_k(t) d^k/ds^k of every free shape of the element holding t on edge e.
void add_element(const Basis& basis, EdgeId e, double t, const std::vector<cplx>& weight,
                 std::vector<std::pair<std::size_t, cplx>>& entries) {
    const Element& el = basis.element(e, basis.locate(e, t));
    const double s = t - el.x0;
    for (std::size_t a = 0; a < el.dofs.size(); ++a) {
        if (el.dofs[a] < 0) continue;
        cplx v = 0.0;
        for (std::size_t k = 0; k < weight.size(); ++k) {
            if (weight[k] != cplx{0.0}) v += weight[k] * eval_real_derivative(el.shapes[a], s, static_cast<int>(k));
        }
        add_entry(entries, static_cast<std::size_t>(el.dofs[a]), v);
    }
}

int function_degree(const TreeFunction& y) {
    int d = y.history().degree();
    for (const auto& f : y.edges()) d = std::max(d, f.degree());
    return d;
}

std::vector<double> cell_breaks(const Basis& basis, const TreeFunction& lift, const CoefficientSet& coeffs, EdgeId e) {
    const Tree& tree = basis.tree();
    const double tau = coeffs.tau;
    const double T = tree.length(e);
    std::vector<double> pts = basis.mesh().nodes[e];
    auto add_shifted = [&](const std::vector<double>& src, double shift) {
        for (double x : src) {
            const double t = x + shift;
            if (t > 0.0 && t < T) pts.push_back(t);
        }
    };
    add_shifted(basis.mesh().nodes[e], tau);
    add_shifted(lift.edge(e).breakpoints(), 0.0);
    add_shifted(lift.edge(e).breakpoints(), tau);
    add_shifted(coeffs.breakpoints(e), 0.0);
    if (auto parent = tree.parent(e)) {
        const double shift = tau - tree.length(*parent);
        add_shifted(basis.mesh().nodes[*parent], shift);
        add_shifted(lift.edge(*parent).breakpoints(), shift);
    } else {
        add_shifted(lift.history().breakpoints(), tau);
    }
    std::sort(pts.begin(), pts.end());
    auto merged = merge_breakpoints(pts, {});
    merged.front() = 0.0;
    merged.back() = T;
    return merged;
}

std::vector<cplx> projected_lift(const QuadratureRows& rows) {
    std::vector<cplx> f(rows.dim, cplx{0.0});
    for (const auto& row : rows.rows) {
        for (const auto& [p, v] : row.entries) f[p] += row.weight * row.lift * std::conj(v);
    }
    return f;
}

}  // namespace

std::vector<double> gram_diagonal(const QuadratureRows& rows) {
    std::vector<double> d(rows.dim, 0.0);
    for (const auto& row : rows.rows) {
        for (const auto& [p, v] : row.entries) d[p] += row.weight * std::norm(v);
    }
    return d;
}

QuadratureRows build_rows(const Basis& basis, const TreeFunction& lift, const CoefficientSet& coeffs,
                          int points_per_cell) {
    const Tree& tree = basis.tree();
    const int n = coeffs.order;
    const double tau = coeffs.tau;
    QuadratureRows out;
    out.dim = basis.size();
    out.points_per_cell = points_per_cell > 0
                              ? points_per_cell
                              : std::max(basis.degree(), function_degree(lift)) + coeffs.max_degree() + 1;
    const auto& rule = gauss_legendre(out.points_per_cell);

    std::vector<cplx> bk(n + 1), ck(n + 1);
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        const auto cells = cell_breaks(basis, lift, coeffs, e);
        for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
            const double a = cells[c];
            const double h = cells[c + 1] - a;
            for (std::size_t r = 0; r < rule.nodes.size(); ++r) {
                QuadratureRows::Row row;
                row.edge = e;
                row.t = a + rule.nodes[r] * h;
                row.weight = rule.weights[r] * h;
                for (int k = 0; k <= n; ++k) {
                    bk[k] = coeffs.b[k][e](row.t);
                    ck[k] = coeffs.c[k][e](row.t);
                }
                add_element(basis, e, row.t, bk, row.entries);
                const double td = row.t - tau;
                if (td >= 0.0) {
                    add_element(basis, e, td, ck, row.entries);
                } else if (auto parent = tree.parent(e)) {
                    add_element(basis, *parent, td + tree.length(*parent), ck, row.entries);
                }
                row.lift = ell_at(lift, coeffs, e, row.t);
                out.rows.push_back(std::move(row));
            }
        }
    }
    return out;
}

GramSystem assemble_serial(const QuadratureRows& rows) {
    GramSystem sys{Matrix(rows.dim, rows.dim), std::vector<cplx>(rows.dim, cplx{0.0})};
    for (const auto& row : rows.rows) {
        for (const auto& [p, lp] : row.entries) {
            const cplx cp = row.weight * std::conj(lp);
            for (const auto& [r, lr] : row.entries) sys.G(p, r) += lr * cp;
            sys.load[p] -= row.lift * cp;
        }
    }
    return sys;
}

GramSystem assemble_parallel(const QuadratureRows& rows) {
    const std::size_t dim = rows.dim;
    GramSystem sys{Matrix(dim, dim), std::vector<cplx>(dim, cplx{0.0})};
    // touching[p] = (row, position of p in that row), in row order.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> touching(dim);
    for (std::size_t i = 0; i < rows.rows.size(); ++i) {
        const auto& entries = rows.rows[i].entries;
        for (std::size_t j = 0; j < entries.size(); ++j) touching[entries[j].first].emplace_back(i, j);
    }
    const auto count = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t pi = 0; pi < count; ++pi) {
        const auto p = static_cast<std::size_t>(pi);
        auto g = sys.G.row(p);
        cplx f = 0.0;
        for (const auto& [i, j] : touching[p]) {
            const auto& row = rows.rows[i];
            const cplx cp = row.weight * std::conj(row.entries[j].second);
            for (const auto& [r, lr] : row.entries) g[r] += lr * cp;
            f -= row.lift * cp;
        }
        sys.load[p] = f;
    }
    return sys;
}

void check_quadrature(const Basis& basis, const TreeFunction& lift, const CoefficientSet& coeffs,
                      const QuadratureRows& rows, double rel_tol) {
    const auto finer = build_rows(basis, lift, coeffs, rows.points_per_cell + 3);
    const auto d0 = gram_diagonal(rows);
    const auto d1 = gram_diagonal(finer);
    const auto f0 = projected_lift(rows);
    const auto f1 = projected_lift(finer);
    // |B(Phi, w_p)| <= sqrt(J(Phi) G_pp) bounds the load.
    double lift_energy = 0.0;
    for (const auto& row : finer.rows) lift_energy += row.weight * std::norm(row.lift);
    for (std::size_t p = 0; p < rows.dim; ++p) {
        const bool diag_off = std::abs(d0[p] - d1[p]) > rel_tol * std::max(d1[p], 1e-300);
        const bool load_off = std::abs(f0[p] - f1[p]) > rel_tol * std::max(std::sqrt(lift_energy * d1[p]), 1e-300);
        if (diag_off || load_off) {
            throw NumericalError("quadrature degree insufficient: " + std::to_string(rows.points_per_cell) +
                                 " points per cell disagree with " + std::to_string(finer.points_per_cell) +
                                 " at dof " + std::to_string(p));
        }
    }
}

DampingSolution solve_damping(std::shared_ptr<const Tree> tree, const CoefficientSet& coeffs,
                              const PiecewisePoly& phi, const SolverOptions& options) {
    coeffs.validate(*tree);
    for (EdgeId e = tree->num_internal(); e < tree->num_edges(); ++e) {
        if (tree->length(e) < 2 * coeffs.tau) {
            warn("boundary edge " + std::to_string(tree->original_id(e)) +
                 " is shorter than 2 tau; the damping window leaves less than tau of free motion");
        }
    }
    auto mesh = std::make_shared<const DelayMesh>(DelayMesh::build(tree, coeffs.tau, options.q));
    auto basis = std::make_shared<const Basis>(Basis::build(mesh, coeffs.order, options.degree));
    TreeFunction lift = lift_history(*mesh, coeffs.order, phi);

    const auto rows = build_rows(*basis, lift, coeffs, options.quadrature_points);
    if (options.verify_quadrature) check_quadrature(*basis, lift, coeffs, rows);
    const GramSystem sys = options.parallel ? assemble_parallel(rows) : assemble_serial(rows);

    std::vector<cplx> x;
    double min_pivot = 0.0;
    if (sys.dim() > 0) {
        const auto factor = options.parallel ? cholesky_parallel(sys.G, options.pivot_floor)
                                             : cholesky_serial(sys.G, options.pivot_floor);
        min_pivot = factor.min_pivot;
        x = cholesky_solve(factor, sys.load);
    }

    TreeFunction y = lift + basis->function(x);
    auto u = apply_ell_all(y, coeffs);
    double J = 0.0;
    for (const auto& f : u) J += inner_product(f, f).real();
    return DampingSolution{std::move(y), std::move(u), J, basis, std::move(lift), std::move(x), min_pivot,
                           hermitian_defect(sys.G)};
}

OptimalityReport optimality_check(const TreeFunction& y, const Basis& basis, const CoefficientSet& coeffs) {
    const auto rows = build_rows(basis, y, coeffs);
    const auto d = gram_diagonal(rows);
    const auto r = projected_lift(rows);
    const double J = energy(y, coeffs);
    OptimalityReport report;
    for (std::size_t p = 0; p < rows.dim; ++p) {
        const double abs_r = std::abs(r[p]);
        const double denom = std::sqrt(d[p]) * std::sqrt(J);
        const double rel = abs_r == 0.0 ? 0.0 : (denom > 0.0 ? abs_r / denom : INFINITY);
        if (abs_r > report.absolute) {
            report.absolute = abs_r;
            report.worst_dof = p;
        }
        report.relative = std::max(report.relative, rel);
    }
    return report;
}

DominanceReport energy_dominance_check(const TreeFunction& y, const Basis& basis, const CoefficientSet& coeffs,
                                       int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> exponent(-6.0, 1.0);
    std::bernoulli_distribution flip;
    DominanceReport report;
    report.trials = trials;
    const double Jy = energy(y, coeffs);
    if (basis.size() == 0) return report;
    report.worst_margin = INFINITY;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<cplx> c(basis.size());
        for (auto& v : c) v = cplx{normal(rng), normal(rng)};
        TreeFunction w = basis.function(c);
        const double Jw = energy(w, coeffs);
        if (!(Jw > 0.0)) continue;
        double scale = std::sqrt(std::max(Jy, 1e-300) / Jw) * std::pow(10.0, exponent(rng));
        if (flip(rng)) scale = -scale;
        const double Jperturbed = energy(y + w * cplx{scale}, coeffs);
        const double budget = Jy + scale * scale * Jw;
        const double margin = (Jperturbed - Jy) / budget;
        report.worst_margin = std::min(report.worst_margin, margin);
        if (margin < -1e-10 && report.passed) {
            report.passed = false;
            report.witness = EnergyWitness{trial, scale, Jy, Jperturbed};
        }
    }
    return report;
}

}  // namespace treedamp
