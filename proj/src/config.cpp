#include "treedamp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <tuple>

#include "treedamp/errors.hpp"

namespace treedamp {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw ValidationError("config field '" + field + "': " + why);
}

const json& require(const json& obj, const char* key, const std::string& field) {
    if (!obj.is_object() || !obj.contains(key)) bad(field + "." + key, "missing");
    return obj.at(key);
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) bad(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) bad(field, "not finite");
    return x;
}

int as_int(const json& v, const std::string& field) {
    if (!v.is_number_integer()) bad(field, "expected an integer");
    return v.get<int>();
}

std::vector<cplx> parse_coefficients(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) bad(field, "expected a nonempty array of coefficients");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_complex(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

double edge_tolerance(double a, double b) { return 10 * breakpoint_tolerance(std::max(std::abs(a), std::abs(b))); }

}  // namespace

cplx parse_complex(const json& v, const std::string& field) {
    if (v.is_number()) return {as_number(v, field), 0.0};
    if (v.is_array() && v.size() == 2) return {as_number(v[0], field + "[0]"), as_number(v[1], field + "[1]")};
    bad(field, "expected a number or an [re, im] pair");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

PiecewisePoly parse_value(const json& v, double a, double b, const std::string& field) {
    if (!v.is_object()) bad(field, "expected an object with 'kind' and 'data'");
    const json& kind_v = require(v, "kind", field);
    if (!kind_v.is_string()) bad(field + ".kind", "expected a string");
    const std::string kind = kind_v.get<std::string>();
    const json& data = require(v, "data", field);
    if (kind == "constant") return PiecewisePoly::constant(a, b, parse_complex(data, field + ".data"));
    if (kind == "polynomial") {
        const auto c = parse_coefficients(data, field + ".data");
        return PiecewisePoly::from_monomial(a, b, c);
    }
    if (kind == "piecewise") {
        const std::string f = field + ".data";
        const json& br = require(data, "breakpoints", f);
        const json& pc = require(data, "pieces", f);
        if (!br.is_array() || br.size() < 2) bad(f + ".breakpoints", "expected at least two breakpoints");
        std::vector<double> breaks;
        for (std::size_t i = 0; i < br.size(); ++i) {
            breaks.push_back(as_number(br[i], f + ".breakpoints[" + std::to_string(i) + "]"));
            if (i > 0 && !(breaks[i] > breaks[i - 1])) bad(f + ".breakpoints", "must be strictly increasing");
        }
        const double tol = edge_tolerance(a, b);
        if (std::abs(breaks.front() - a) > tol || std::abs(breaks.back() - b) > tol) {
            bad(f + ".breakpoints", "must run from " + std::to_string(a) + " to " + std::to_string(b));
        }
        breaks.front() = a;
        breaks.back() = b;
        if (!pc.is_array() || pc.size() + 1 != breaks.size()) bad(f + ".pieces", "need one piece per interval");
        std::vector<std::vector<cplx>> pieces;
        for (std::size_t i = 0; i < pc.size(); ++i) {
            pieces.push_back(parse_coefficients(pc[i], f + ".pieces[" + std::to_string(i) + "]"));
        }
        return PiecewisePoly(std::move(breaks), std::move(pieces));
    }
    bad(field + ".kind", "unknown kind '" + kind + "' (constant, polynomial or piecewise)");
}

json value_to_json(const PiecewisePoly& f) {
    json pieces = json::array();
    for (std::size_t i = 0; i < f.num_pieces(); ++i) {
        json piece = json::array();
        for (const auto& c : f.piece(i)) piece.push_back(complex_to_json(c));
        pieces.push_back(std::move(piece));
    }
    return {{"kind", "piecewise"}, {"data", {{"breakpoints", f.breakpoints()}, {"pieces", std::move(pieces)}}}};
}

ProblemConfig parse_config(const json& doc) {
    if (!doc.is_object()) bad("<root>", "expected an object");
    ProblemConfig cfg;
    cfg.order = as_int(require(doc, "n", "<root>"), "n");
    if (cfg.order < 1) bad("n", "must be >= 1");
    cfg.tau = as_number(require(doc, "tau", "<root>"), "tau");

    const json& edges = require(doc, "edges", "<root>");
    if (!edges.is_array() || edges.empty()) bad("edges", "expected a nonempty array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string f = "edges[" + std::to_string(i) + "]";
        EdgeSpec spec;
        spec.id = as_int(require(edges[i], "id", f), f + ".id");
        spec.parent = as_int(require(edges[i], "parent", f), f + ".parent");
        spec.length = as_number(require(edges[i], "length", f), f + ".length");
        cfg.edges.push_back(spec);
    }
    cfg.tree = std::make_shared<const Tree>(Tree::build(cfg.edges));
    const Tree& tree = *cfg.tree;
    if (!(cfg.tau > 0.0)) bad("tau", "must be positive");
    if (!(cfg.tau < tree.min_length())) bad("tau", "must be smaller than every edge length");

    cfg.coeffs = CoefficientSet::zeros(tree, cfg.order, cfg.tau);
    std::set<std::tuple<char, int, EdgeId>> seen;
    if (doc.contains("coefficients")) {
        const json& list = doc.at("coefficients");
        if (!list.is_array()) bad("coefficients", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string f = "coefficients[" + std::to_string(i) + "]";
            const json& entry = list[i];
            const json& term_v = require(entry, "term", f);
            if (!term_v.is_string() || (term_v != "b" && term_v != "c")) bad(f + ".term", "expected \"b\" or \"c\"");
            const char term = term_v.get<std::string>()[0];
            const int k = as_int(require(entry, "k", f), f + ".k");
            if (k < 0 || k > cfg.order) bad(f + ".k", "must lie in 0..n");
            std::vector<EdgeId> targets;
            if (!entry.contains("edge") || entry.at("edge") == "all") {
                for (EdgeId e = 0; e < tree.num_edges(); ++e) targets.push_back(e);
            } else {
                const int id = as_int(entry.at("edge"), f + ".edge");
                try {
                    targets.push_back(tree.canonical(id));
                } catch (const std::exception&) {
                    bad(f + ".edge", "unknown edge id " + std::to_string(id));
                }
            }
            for (EdgeId e : targets) {
                if (!seen.emplace(term, k, e).second) {
                    bad(f, std::string("duplicate entry for ") + term + "[" + std::to_string(k) + "] on edge " +
                               std::to_string(tree.original_id(e)));
                }
                auto value = parse_value(entry, 0.0, tree.length(e), f);
                (term == 'b' ? cfg.coeffs.b : cfg.coeffs.c)[k][e] = std::move(value);
            }
        }
    }
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        if (!seen.count({'b', cfg.order, e})) {
            bad("coefficients", "b[n] (term \"b\", k = " + std::to_string(cfg.order) + ") is mandatory; missing on edge " +
                                    std::to_string(tree.original_id(e)));
        }
    }
    cfg.coeffs.validate(tree);

    cfg.history = doc.contains("history") ? parse_value(doc.at("history"), -cfg.tau, 0.0, "history")
                                          : PiecewisePoly::zero(-cfg.tau, 0.0);

    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        if (!s.is_object()) bad("solver", "expected an object");
        if (s.contains("q")) cfg.solver.q = as_int(s.at("q"), "solver.q");
        if (s.contains("degree")) cfg.solver.degree = as_int(s.at("degree"), "solver.degree");
        if (s.contains("quadrature_order")) {
            cfg.solver.quadrature_points = as_int(s.at("quadrature_order"), "solver.quadrature_order");
        }
        if (s.contains("tolerance")) cfg.tolerance = as_number(s.at("tolerance"), "solver.tolerance");
        if (s.contains("parallel")) {
            if (!s.at("parallel").is_boolean()) bad("solver.parallel", "expected true or false");
            cfg.solver.parallel = s.at("parallel").get<bool>();
        }
    }
    if (cfg.solver.q < 1) bad("solver.q", "must be >= 1");
    if (cfg.solver.quadrature_points < 0 || cfg.solver.quadrature_points > 200) {
        bad("solver.quadrature_order", "must lie in 0..200 (0 = automatic)");
    }
    if (!(cfg.tolerance > 0.0)) bad("solver.tolerance", "must be positive");
    return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) { return parse_config(read_json(path)); }

json to_json(const ProblemConfig& config) {
    const Tree& tree = *config.tree;
    json doc;
    doc["n"] = config.order;
    doc["tau"] = config.tau;
    json edges = json::array();
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        const auto parent = tree.parent(e);
        edges.push_back({{"id", tree.original_id(e)},
                         {"parent", parent ? tree.original_id(*parent) : 0},
                         {"length", tree.length(e)}});
    }
    doc["edges"] = std::move(edges);
    json coeffs = json::array();
    for (const char term : {'b', 'c'}) {
        const auto& family = term == 'b' ? config.coeffs.b : config.coeffs.c;
        for (int k = 0; k <= config.order; ++k) {
            for (EdgeId e = 0; e < tree.num_edges(); ++e) {
                const auto& f = family[k][e];
                const bool mandatory = term == 'b' && k == config.order;
                if (!mandatory && config.coeffs.is_zero(f)) continue;
                json entry = value_to_json(f);
                entry["term"] = std::string(1, term);
                entry["k"] = k;
                entry["edge"] = tree.original_id(e);
                coeffs.push_back(std::move(entry));
            }
        }
    }
    doc["coefficients"] = std::move(coeffs);
    doc["history"] = value_to_json(config.history);
    doc["solver"] = {{"q", config.solver.q},
                     {"degree", config.solver.degree},
                     {"quadrature_order", config.solver.quadrature_points},
                     {"tolerance", config.tolerance},
                     {"parallel", config.solver.parallel}};
    return doc;
}

Control parse_control(const json& doc, const Tree& tree) {
    Control control = Control::zero(tree);
    const json& list = require(doc, "controls", "<root>");
    if (!list.is_array()) bad("controls", "expected an array");
    std::set<EdgeId> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string f = "controls[" + std::to_string(i) + "]";
        const int id = as_int(require(list[i], "edge", f), f + ".edge");
        EdgeId e = 0;
        try {
            e = tree.canonical(id);
        } catch (const std::exception&) {
            bad(f + ".edge", "unknown edge id " + std::to_string(id));
        }
        if (!seen.insert(e).second) bad(f + ".edge", "duplicate control for edge " + std::to_string(id));
        control.u[e] = parse_value(list[i], 0.0, tree.length(e), f);
    }
    return control;
}

json control_to_json(const Control& control, const Tree& tree) {
    json list = json::array();
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
        json entry = value_to_json(control.u.at(e));
        entry["edge"] = tree.original_id(e);
        list.push_back(std::move(entry));
    }
    return {{"controls", std::move(list)}};
}

json solution_to_json(const TreeFunction& y, int q, int degree) {
    json edges = json::array();
    for (EdgeId e = 0; e < y.tree().num_edges(); ++e) {
        json entry = value_to_json(y.edge(e));
        entry["edge"] = y.tree().original_id(e);
        edges.push_back(std::move(entry));
    }
    return {{"q", q}, {"degree", degree}, {"history", value_to_json(y.history())}, {"edges", std::move(edges)}};
}

TreeFunction parse_solution(const json& doc, std::shared_ptr<const Tree> tree, int order, double tau) {
    const json& list = require(doc, "edges", "<root>");
    if (!list.is_array() || list.size() != tree->num_edges()) bad("edges", "expected one entry per edge");
    std::vector<PiecewisePoly> edges(tree->num_edges());
    std::vector<bool> filled(tree->num_edges(), false);
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string f = "edges[" + std::to_string(i) + "]";
        const int id = as_int(require(list[i], "edge", f), f + ".edge");
        EdgeId e = 0;
        try {
            e = tree->canonical(id);
        } catch (const std::exception&) {
            bad(f + ".edge", "unknown edge id " + std::to_string(id));
        }
        if (filled[e]) bad(f + ".edge", "duplicate edge " + std::to_string(id));
        filled[e] = true;
        edges[e] = parse_value(list[i], 0.0, tree->length(e), f);
    }
    auto history = parse_value(require(doc, "history", "<root>"), -tau, 0.0, "history");
    return TreeFunction(std::move(tree), order, tau, std::move(edges), std::move(history));
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& err) {
        throw ValidationError(path.string() + ": " + err.what());
    }
}

}  // namespace treedamp
