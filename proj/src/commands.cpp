#include "treedamp/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "treedamp/config.hpp"
#include "treedamp/damping.hpp"
#include "treedamp/diagnostics.hpp"
#include "treedamp/errors.hpp"
#include "treedamp/expressions.hpp"

namespace treedamp {

namespace {

struct Diagnosis {
    OptimalityReport optimality;
    OptimalityReport weak;
    std::vector<KirchhoffEntry> kirchhoff;
    std::vector<OrderJump> continuity;
    double lemma2_gap = 0.0;
};

Diagnosis diagnose(const TreeFunction& y, const Basis& basis, const CoefficientSet& coeffs) {
    Diagnosis d;
    d.optimality = optimality_check(y, basis, coeffs);
    d.weak = weak_bvp_residual(y, basis, coeffs);
    const auto qd = quasi_derivatives(y, coeffs, &basis.mesh());
    d.kirchhoff = kirchhoff_residual(qd, y.tree());
    d.continuity = continuity_report(qd);
    d.lemma2_gap = compare_g_paths(qd, g_unrolled(y, coeffs));
    return d;
}

json diagnosis_json(const Diagnosis& d, const Tree& tree) {
    json kirchhoff = json::array();
    for (const auto& k : d.kirchhoff) {
        kirchhoff.push_back({{"edge", tree.original_id(k.edge)},
                             {"order", k.order},
                             {"incoming", complex_to_json(k.incoming)},
                             {"outgoing", complex_to_json(k.outgoing)},
                             {"residual", k.residual()}});
    }
    json continuity = json::array();
    for (const auto& c : d.continuity) {
        continuity.push_back(
            {{"order", c.order}, {"max_jump", c.max_jump}, {"edge", tree.original_id(c.edge)}, {"t", c.t}});
    }
    return {{"optimality", {{"absolute", d.optimality.absolute}, {"relative", d.optimality.relative}}},
            {"weak_bvp", {{"absolute", d.weak.absolute}, {"relative", d.weak.relative}}},
            {"kirchhoff", std::move(kirchhoff)},
            {"max_kirchhoff", max_residual(d.kirchhoff)},
            {"continuity", std::move(continuity)},
            {"lemma2_gap", d.lemma2_gap}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << std::setw(2) << doc << '\n';
}

std::vector<double> sample_points(const PiecewisePoly& f, int per_piece) {
    std::vector<double> t;
    const auto& br = f.breakpoints();
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        for (int s = 0; s < per_piece; ++s) t.push_back(br[i] + (br[i + 1] - br[i]) * s / per_piece);
    }
    t.push_back(br.back());
    return t;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << std::setprecision(17);
    return out;
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const TreeFunction& y, int samples_per_piece) {
    auto out = open_csv(path);
    out << "edge,t";
    for (int k = 0; k < y.order(); ++k) out << ",re_y" << k << ",im_y" << k;
    out << '\n';
    for (EdgeId e = 0; e < y.tree().num_edges(); ++e) {
        const auto& f = y.edge(e);
        for (double t : sample_points(f, samples_per_piece)) {
            out << y.tree().original_id(e) << ',' << t;
            for (int k = 0; k < y.order(); ++k) {
                const cplx v = f.derivative_at(t, k);
                out << ',' << v.real() << ',' << v.imag();
            }
            out << '\n';
        }
    }
}

void write_control_csv(const std::filesystem::path& path, const Control& control, const Tree& tree,
                       int samples_per_piece) {
    auto out = open_csv(path);
    out << "edge,t,re_u,im_u\n";
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        const auto& f = control.u.at(e);
        for (double t : sample_points(f, samples_per_piece)) {
            const cplx v = f(t);
            out << tree.original_id(e) << ',' << t << ',' << v.real() << ',' << v.imag() << '\n';
        }
    }
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
    const auto cfg = load_config(args.config);
    const Control control = parse_control(read_json(args.control), *cfg.tree);
    const auto mesh = DelayMesh::build(cfg.tree, cfg.tau, cfg.solver.q);
    const auto y = solve_cauchy(*cfg.tree, cfg.coeffs, cfg.history, control, mesh, cfg.solver.degree);
    const auto residual = residual_ell(y, cfg.coeffs, control);

    std::filesystem::create_directories(args.out);
    write_trajectory_csv(args.out / "trajectory.csv", y);
    write_json(args.out / "solution.json", solution_to_json(y, cfg.solver.q, cfg.solver.degree));
    json per_edge = json::array();
    double total = 0.0;
    for (EdgeId e = 0; e < residual.size(); ++e) {
        per_edge.push_back({{"edge", cfg.tree->original_id(e)}, {"residual", residual[e]}});
        total += residual[e] * residual[e];
    }
    double terminal = 0.0;
    for (EdgeId e = cfg.tree->num_internal(); e < cfg.tree->num_edges(); ++e) {
        const double T = cfg.tree->length(e);
        terminal = std::max(terminal, y.edge(e).restricted(T - cfg.tau, T).max_abs());
    }
    const json summary{{"residual_ell", std::move(per_edge)},
                       {"residual_total", std::sqrt(total)},
                       {"terminal_window_max", terminal}};
    write_json(args.out / "summary.json", summary);
    out << "simulate: residual " << std::sqrt(total) << ", max |y| on terminal windows " << terminal << '\n';
    return exit_code::ok;
}

int cmd_damp(const DampArgs& args, std::ostream& out) {
    auto cfg = load_config(args.config);
    if (args.q) cfg.solver.q = *args.q;
    if (args.tol) cfg.tolerance = *args.tol;
    if (cfg.solver.q < 1) throw ValidationError("--q must be >= 1");
    if (!(cfg.tolerance > 0.0)) throw ValidationError("--tol must be positive");

    const auto sol = solve_damping(cfg.tree, cfg.coeffs, cfg.history, cfg.solver);
    const auto diag = diagnose(sol.y, *sol.basis, cfg.coeffs);

    std::filesystem::create_directories(args.out);
    write_trajectory_csv(args.out / "trajectory.csv", sol.y);
    write_control_csv(args.out / "control.csv", sol.control(), *cfg.tree);
    write_json(args.out / "control.json", control_to_json(sol.control(), *cfg.tree));
    write_json(args.out / "solution.json", solution_to_json(sol.y, cfg.solver.q, sol.basis->degree()));
    json summary = diagnosis_json(diag, *cfg.tree);
    summary["energy"] = sol.energy;
    summary["q"] = cfg.solver.q;
    summary["degree"] = sol.basis->degree();
    summary["dimension"] = sol.basis->size();
    summary["min_pivot"] = sol.min_pivot;
    summary["hermitian_defect"] = sol.hermitian_defect;
    write_json(args.out / "summary.json", summary);

    out << std::setprecision(17) << "damp: J = " << sol.energy << " (dim " << sol.basis->size() << ", q "
        << cfg.solver.q << ")\n"
        << std::setprecision(6) << "optimality residual " << diag.optimality.relative << ", max Kirchhoff residual "
        << max_residual(diag.kirchhoff) << '\n';
    if (diag.optimality.relative > cfg.tolerance) {
        throw NumericalError("optimality residual " + std::to_string(diag.optimality.relative) +
                             " exceeds the tolerance");
    }
    return exit_code::ok;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
    const auto cfg = load_config(args.config);
    const json doc = read_json(args.solution / "solution.json");
    if (!doc.contains("q") || !doc.at("q").is_number_integer()) {
        throw ValidationError("solution.json: field 'q' missing");
    }
    const int q = doc.at("q").get<int>();
    const int degree = doc.value("degree", -1);
    const auto y = parse_solution(doc, cfg.tree, cfg.order, cfg.tau);
    auto mesh = std::make_shared<const DelayMesh>(DelayMesh::build(cfg.tree, cfg.tau, q));
    const auto basis = Basis::build(mesh, cfg.order, degree);
    const auto lift = lift_history(*mesh, cfg.order, cfg.history);
    const auto membership = check_membership(y - lift, 1e-9);
    const auto diag = diagnose(y, basis, cfg.coeffs);

    json report = diagnosis_json(diag, *cfg.tree);
    report["energy"] = energy(y, cfg.coeffs);
    report["membership"] = {{"ok", membership.ok}, {"violations", membership.violations}};
    const bool optimal = diag.optimality.relative <= cfg.tolerance;
    report["optimal"] = optimal;
    out << std::setw(2) << report << '\n';
    return optimal && membership.ok ? exit_code::ok : exit_code::assertion;
}

int cmd_convergence(const ConvergenceArgs& args, std::ostream& out) {
    const auto cfg = load_config(args.config);
    if (args.q.empty()) throw ValidationError("--q needs at least one level");
    for (int q : args.q) {
        if (q < 1) throw ValidationError("--q levels must be >= 1");
    }
    const int n = cfg.order;

    struct Level {
        int q;
        std::size_t dim;
        double energy;
        Diagnosis diag;
    };
    std::vector<Level> levels;
    out << "q,dim,energy,optimality,max_kirchhoff";
    for (int k = n; k < 2 * n; ++k) out << ",max_jump_" << k;
    out << '\n';
    for (int q : args.q) {
        auto options = cfg.solver;
        options.q = q;
        const auto sol = solve_damping(cfg.tree, cfg.coeffs, cfg.history, options);
        Level level{q, sol.basis->size(), sol.energy, diagnose(sol.y, *sol.basis, cfg.coeffs)};
        out << std::setprecision(17) << q << ',' << level.dim << ',' << level.energy << std::setprecision(6) << ','
            << level.diag.optimality.relative << ',' << max_residual(level.diag.kirchhoff);
        for (const auto& c : level.diag.continuity) out << ',' << c.max_jump;
        out << '\n';
        levels.push_back(std::move(level));
    }
    if (levels.size() < 2) return exit_code::ok;

    bool ok = true;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const auto& a = levels[i - 1];
        const auto& b = levels[i];
        if (b.q % a.q != 0) {
            out << "note: q = " << b.q << " does not refine q = " << a.q << ", energy monotonicity not asserted\n";
            continue;
        }
        if (b.energy > a.energy + 1e-10 * std::max(1.0, a.energy)) {
            out << "FAIL: energy increased from q = " << a.q << " to q = " << b.q << '\n';
            ok = false;
        }
    }
    for (const auto& level : levels) {
        if (level.diag.optimality.relative > cfg.tolerance) {
            out << "FAIL: optimality residual " << level.diag.optimality.relative << " at q = " << level.q << '\n';
            ok = false;
        }
    }
    const double k_first = max_residual(levels.front().diag.kirchhoff);
    const double k_last = max_residual(levels.back().diag.kirchhoff);
    if (k_first > 1e-10 && !(k_last < k_first)) {
        out << "FAIL: Kirchhoff residual did not decay (" << k_first << " -> " << k_last << ")\n";
        ok = false;
    }
    const auto& prev = levels[levels.size() - 2].diag.continuity;
    const auto& last = levels.back().diag.continuity;
    for (std::size_t i = 0; i < last.size(); ++i) {
        const double a = prev[i].max_jump;
        const double b = last[i].max_jump;
        if (b > 1e-6 && std::abs(b - a) < 0.1 * a) {
            out << "smoothness loss detected: y^<" << last[i].order << "> keeps a jump of " << b << " at t = "
                << last[i].t << " on edge " << cfg.tree->original_id(last[i].edge) << '\n';
        }
    }
    return ok ? exit_code::ok : exit_code::assertion;
}

int run_guarded(const std::function<int()>& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return exit_code::validation;
    } catch (const json::exception& e) {
        err << "validation error: " << e.what() << '\n';
        return exit_code::validation;
    } catch (const IndefiniteGramError& e) {
        err << "numerical error: " << e.what() << '\n';
        return exit_code::numerical;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return exit_code::numerical;
    }
}

}  // namespace treedamp
