#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include <json.hpp>

#include "treedamp/cauchy.hpp"
#include "treedamp/coefficients.hpp"
#include "treedamp/damping.hpp"
#include "treedamp/tree.hpp"
#include "treedamp/tree_function.hpp"

namespace treedamp {

using json = nlohmann::json;

/// A problem read from a JSON config. Field layout (see README):
///   n, tau, edges[{id, parent, length}], coefficients[{term, k, edge, kind, data}],
///   history{kind, data}, solver{q, degree, quadrature_order, tolerance}.
/// Complex numbers are plain numbers or [re, im] pairs.
struct ProblemConfig {
    int order = 1;
    double tau = 0.0;
    std::vector<EdgeSpec> edges;
    std::shared_ptr<const Tree> tree;
    CoefficientSet coeffs;
    PiecewisePoly history;
    SolverOptions solver;
    double tolerance = 1e-8;
};

/// Throws ValidationError naming the offending field.
ProblemConfig parse_config(const json& doc);
ProblemConfig load_config(const std::filesystem::path& path);

/// Canonical form: every coefficient written per edge as a piecewise value,
/// zero coefficients other than b_n dropped. parse_config(to_json(c))
/// reproduces c and to_json is idempotent on its own output.
json to_json(const ProblemConfig& config);

cplx parse_complex(const json& v, const std::string& field);
json complex_to_json(cplx z);

/// {kind: constant | polynomial | piecewise, data} on [a, b]. Polynomial data
/// is in powers of the local variable; piecewise data is
/// {breakpoints, pieces} with each piece in powers of (t - breakpoint).
PiecewisePoly parse_value(const json& v, double a, double b, const std::string& field);
json value_to_json(const PiecewisePoly& f);

/// {"controls": [{edge, kind, data}]}; edges not listed get u = 0.
Control parse_control(const json& doc, const Tree& tree);
json control_to_json(const Control& control, const Tree& tree);

/// Exact piecewise data of a trajectory plus the mesh parameters it was
/// computed on.
json solution_to_json(const TreeFunction& y, int q, int degree);
TreeFunction parse_solution(const json& doc, std::shared_ptr<const Tree> tree, int order, double tau);

json read_json(const std::filesystem::path& path);

}  // namespace treedamp
