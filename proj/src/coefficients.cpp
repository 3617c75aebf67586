#include "treedamp/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "treedamp/errors.hpp"

namespace treedamp {

namespace {

// Relative floor for |b_n|: anything below is treated as a zero crossing.
constexpr double kLeadingFloor = 1e-8;

}  // namespace

CoefficientSet CoefficientSet::zeros(const Tree& tree, int order, double tau) {
    CoefficientSet cs;
    cs.order = order;
    cs.tau = tau;
    cs.b.assign(order + 1, {});
    cs.c.assign(order + 1, {});
    for (int k = 0; k <= order; ++k) {
        for (EdgeId e = 0; e < tree.num_edges(); ++e) {
            cs.b[k].push_back(PiecewisePoly::zero(0.0, tree.length(e)));
            cs.c[k].push_back(PiecewisePoly::zero(0.0, tree.length(e)));
        }
    }
    return cs;
}

CoefficientSet CoefficientSet::constant(const Tree& tree, int order, double tau,
                                        const std::vector<cplx>& b_values, const std::vector<cplx>& c_values) {
    auto cs = zeros(tree, order, tau);
    for (int k = 0; k <= order; ++k) {
        for (EdgeId e = 0; e < tree.num_edges(); ++e) {
            if (k < static_cast<int>(b_values.size())) cs.b[k][e] = PiecewisePoly::constant(0.0, tree.length(e), b_values[k]);
            if (k < static_cast<int>(c_values.size())) cs.c[k][e] = PiecewisePoly::constant(0.0, tree.length(e), c_values[k]);
        }
    }
    return cs;
}

void CoefficientSet::validate(const Tree& tree) const {
    if (order < 1) throw ValidationError("coefficients: order n must be >= 1");
    if (!(tau > 0.0)) throw ValidationError("coefficients: delay tau must be positive");
    if (!(tau < tree.min_length())) {
        throw ValidationError("coefficients: delay tau must be smaller than every edge length");
    }
    if (b.size() != static_cast<std::size_t>(order + 1) || c.size() != static_cast<std::size_t>(order + 1)) {
        throw ValidationError("coefficients: need b_k and c_k for k = 0..n");
    }
    for (int k = 0; k <= order; ++k) {
        if (b[k].size() != tree.num_edges() || c[k].size() != tree.num_edges()) {
            throw ValidationError("coefficients: one entry per edge required for order " + std::to_string(k));
        }
        for (EdgeId e = 0; e < tree.num_edges(); ++e) {
            const double tol = 10 * breakpoint_tolerance(tree.length(e));
            for (const auto* f : {&b[k][e], &c[k][e]}) {
                if (f->empty() || std::abs(f->lower()) > tol || std::abs(f->upper() - tree.length(e)) > tol) {
                    throw ValidationError("coefficients: b/c[" + std::to_string(k) + "] on edge " +
                                          std::to_string(tree.original_id(e)) + " must be defined on [0, T]");
                }
                for (std::size_t i = 0; i < f->num_pieces(); ++i) {
                    for (const auto& v : f->piece(i)) {
                        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                            throw ValidationError("coefficients: non-finite value on edge " +
                                                  std::to_string(tree.original_id(e)));
                        }
                    }
                }
            }
        }
    }
    double scale = 0.0;
    for (const auto& f : b[order]) scale = std::max(scale, f.max_abs(64));
    const double low = leading_lower_bound();
    if (!(low > kLeadingFloor * std::max(1.0, scale))) {
        throw ValidationError("coefficients: leading coefficient b_n vanishes (min |b_n| = " + std::to_string(low) +
                              "); the system must have 1/b_n bounded");
    }
}

double CoefficientSet::leading_lower_bound(int samples_per_piece) const {
    double low = std::numeric_limits<double>::infinity();
    std::vector<double> values(samples_per_piece + 1);
    for (const auto& f : b.at(order)) {
        for (std::size_t i = 0; i < f.num_pieces(); ++i) {
            const auto& c = f.piece(i);
            const double h = (f.breakpoints()[i + 1] - f.breakpoints()[i]) / samples_per_piece;
            for (int s = 0; s <= samples_per_piece; ++s) values[s] = std::abs(poly::eval(c, h * s));
            for (int s = 0; s <= samples_per_piece; ++s) {
                low = std::min(low, values[s]);
                const bool local_min = (s == 0 || values[s] <= values[s - 1]) &&
                                       (s == samples_per_piece || values[s] <= values[s + 1]);
                if (!local_min) continue;
                // Golden-section polish: a zero between samples must not slip through.
                double lo = h * std::max(0, s - 1), hi = h * std::min(samples_per_piece, s + 1);
                const double g = 0.5 * (std::sqrt(5.0) - 1.0);
                for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
                    const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
                    if (std::abs(poly::eval(c, x1)) <= std::abs(poly::eval(c, x2))) {
                        hi = x2;
                    } else {
                        lo = x1;
                    }
                }
                low = std::min(low, std::abs(poly::eval(c, 0.5 * (lo + hi))));
            }
        }
    }
    return low;
}

int CoefficientSet::max_degree() const {
    int d = 0;
    for (const auto* family : {&b, &c}) {
        for (const auto& per_edge : *family) {
            for (const auto& f : per_edge) d = std::max(d, f.degree());
        }
    }
    return d;
}

std::vector<double> CoefficientSet::breakpoints(EdgeId e) const {
    std::vector<double> out;
    for (int k = 0; k <= order; ++k) {
        out = merge_breakpoints(out, b[k][e].breakpoints());
        out = merge_breakpoints(out, c[k][e].breakpoints());
    }
    return out;
}

bool CoefficientSet::is_zero(const PiecewisePoly& f) const {
    for (std::size_t i = 0; i < f.num_pieces(); ++i) {
        for (const auto& v : f.piece(i)) {
            if (v != cplx{0.0}) return false;
        }
    }
    return true;
}

}  // namespace treedamp
