#include "treedamp/piecewise_poly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treedamp/errors.hpp"

namespace treedamp {

namespace poly {

cplx eval(std::span<const cplx> c, double s) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
    return acc;
}

cplx eval_derivative(std::span<const cplx> c, double s, int k) {
    const int size = static_cast<int>(c.size());
    cplx acc = 0.0;
    for (int i = size - 1; i >= k; --i) {
        double falling = 1.0;
        for (int r = 0; r < k; ++r) falling *= static_cast<double>(i - r);
        acc = acc * s + falling * c[i];
    }
    return acc;
}

std::vector<cplx> derivative(std::span<const cplx> c, int k) {
    const int size = static_cast<int>(c.size());
    if (size <= k) return {cplx{0.0}};
    std::vector<cplx> out(size - k);
    for (int i = k; i < size; ++i) {
        double falling = 1.0;
        for (int r = 0; r < k; ++r) falling *= static_cast<double>(i - r);
        out[i - k] = falling * c[i];
    }
    return out;
}

std::vector<cplx> multiply(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.empty() || b.empty()) return {cplx{0.0}};
    std::vector<cplx> out(a.size() + b.size() - 1, cplx{0.0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == cplx{0.0}) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

std::vector<cplx> taylor_shift(std::span<const cplx> c, double delta) {
    std::vector<cplx> d(c.begin(), c.end());
    if (delta == 0.0 || d.size() < 2) return d;
    const std::size_t deg = d.size() - 1;
    for (std::size_t k = 0; k < deg; ++k) {
        for (std::size_t j = deg - 1;; --j) {
            d[j] += delta * d[j + 1];
            if (j == k) break;
        }
    }
    return d;
}

cplx integrate(std::span<const cplx> c, double h) {
    cplx acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * h + c[i] / static_cast<double>(i + 1);
    return acc * h;
}

int degree(std::span<const cplx> c) {
    for (int i = static_cast<int>(c.size()) - 1; i > 0; --i) {
        if (c[i] != cplx{0.0}) return i;
    }
    return 0;
}

}  // namespace poly

double breakpoint_tolerance(double scale) { return 1e-11 * std::max(1.0, std::abs(scale)); }

std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b) {
    std::vector<double> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    if (all.empty()) return all;
    double scale = std::max(std::abs(all.front()), std::abs(all.back()));
    const double tol = breakpoint_tolerance(scale);
    std::vector<double> out;
    out.reserve(all.size());
    for (double x : all) {
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    }
    return out;
}

namespace {

constexpr int kDegreeWarning = 40;

double domain_tol(const std::vector<double>& breaks) {
    return breakpoint_tolerance(std::max(std::abs(breaks.front()), std::abs(breaks.back())));
}

// Re-express `f` on the target breakpoints, which must refine f's own.
std::vector<std::vector<cplx>> align(const PiecewisePoly& f, const std::vector<double>& target) {
    std::vector<std::vector<cplx>> out(target.size() - 1);
    for (std::size_t i = 0; i + 1 < target.size(); ++i) {
        const double mid = 0.5 * (target[i] + target[i + 1]);
        const std::size_t src = f.locate(mid);
        out[i] = poly::taylor_shift(f.piece(src), target[i] - f.breakpoints()[src]);
    }
    return out;
}

void check_same_domain(const PiecewisePoly& a, const PiecewisePoly& b, const char* op) {
    const double tol = breakpoint_tolerance(std::max(std::abs(a.lower()), std::abs(a.upper()))) * 10;
    if (std::abs(a.lower() - b.lower()) > tol || std::abs(a.upper() - b.upper()) > tol) {
        throw std::invalid_argument(std::string("PiecewisePoly ") + op + ": domain mismatch [" +
                                    std::to_string(a.lower()) + ", " + std::to_string(a.upper()) +
                                    "] vs [" + std::to_string(b.lower()) + ", " +
                                    std::to_string(b.upper()) + "]");
    }
}

std::vector<double> merged_domain(const PiecewisePoly& a, const PiecewisePoly& b) {
    auto merged = merge_breakpoints(a.breakpoints(), b.breakpoints());
    // Keep a's endpoints so the result domain is exactly a's.
    merged.front() = a.lower();
    merged.back() = a.upper();
    return merged;
}

}  // namespace

PiecewisePoly::PiecewisePoly(std::vector<double> breaks, std::vector<std::vector<cplx>> pieces)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
    if (breaks_.size() < 2 || pieces_.size() + 1 != breaks_.size()) {
        throw std::invalid_argument("PiecewisePoly: need k+1 breakpoints for k pieces (k >= 1)");
    }
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
        if (!(breaks_[i] < breaks_[i + 1])) {
            throw std::invalid_argument("PiecewisePoly: breakpoints must be strictly increasing");
        }
    }
    for (auto& p : pieces_) {
        if (p.empty()) p.push_back(0.0);
    }
}

PiecewisePoly PiecewisePoly::zero(double a, double b) { return constant(a, b, 0.0); }

PiecewisePoly PiecewisePoly::constant(double a, double b, cplx value) {
    return PiecewisePoly({a, b}, {{value}});
}

PiecewisePoly PiecewisePoly::from_monomial(double a, double b, std::span<const cplx> coeffs) {
    std::vector<cplx> c(coeffs.begin(), coeffs.end());
    if (c.empty()) c.push_back(0.0);
    return PiecewisePoly({a, b}, {poly::taylor_shift(c, a)});
}

int PiecewisePoly::degree() const {
    int d = 0;
    for (const auto& p : pieces_) d = std::max(d, poly::degree(p));
    return d;
}

std::size_t PiecewisePoly::locate(double t, Side side) const {
    const double tol = domain_tol(breaks_);
    const std::size_t last = pieces_.size() - 1;
    if (side == Side::Right) {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t + tol);
        std::size_t idx = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
        return std::min(idx, last);
    }
    auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t - tol);
    std::size_t idx = static_cast<std::size_t>(it - breaks_.begin());
    return idx == 0 ? 0 : std::min(idx - 1, last);
}

cplx PiecewisePoly::derivative_at(double t, int k, Side side) const {
    const std::size_t i = locate(t, side);
    return poly::eval_derivative(pieces_[i], t - breaks_[i], k);
}

PiecewisePoly PiecewisePoly::derivative(int k) const {
    PiecewisePoly out = *this;
    for (auto& p : out.pieces_) p = poly::derivative(p, k);
    return out;
}

PiecewisePoly PiecewisePoly::restricted(double a, double b) const {
    const double tol = domain_tol(breaks_);
    if (a < lower() - tol || b > upper() + tol || !(a < b)) {
        throw std::invalid_argument("PiecewisePoly::restricted: interval outside domain");
    }
    std::vector<double> target{a};
    for (double x : breaks_) {
        if (x > a + tol && x < b - tol) target.push_back(x);
    }
    target.push_back(b);
    return PiecewisePoly(target, align(*this, target));
}

PiecewisePoly PiecewisePoly::shifted(double delta) const {
    PiecewisePoly out = *this;
    for (double& x : out.breaks_) x += delta;
    return out;
}

PiecewisePoly PiecewisePoly::relocated(double a, double b) const {
    const double tol = 10 * breakpoint_tolerance(std::max({std::abs(a), std::abs(b), std::abs(lower()),
                                                           std::abs(upper())}));
    if (std::abs((upper() - lower()) - (b - a)) > tol) {
        throw std::invalid_argument("PiecewisePoly::relocated: width mismatch");
    }
    const PiecewisePoly moved = shifted(a - lower());
    std::vector<double> target{a};
    for (double x : moved.breaks_) {
        if (x > a + tol && x < b - tol) target.push_back(x);
    }
    target.push_back(b);
    return PiecewisePoly(target, align(moved, target));
}

PiecewisePoly PiecewisePoly::conjugated() const {
    PiecewisePoly out = *this;
    for (auto& p : out.pieces_) {
        for (auto& c : p) c = std::conj(c);
    }
    return out;
}

PiecewisePoly PiecewisePoly::refined(std::span<const double> extra) const {
    const double tol = domain_tol(breaks_);
    std::vector<double> inside;
    for (double x : extra) {
        if (x > lower() + tol && x < upper() - tol) inside.push_back(x);
    }
    auto target = merge_breakpoints(breaks_, inside);
    target.front() = lower();
    target.back() = upper();
    return PiecewisePoly(target, align(*this, target));
}

PiecewisePoly PiecewisePoly::concat(const PiecewisePoly& a, const PiecewisePoly& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    const double tol = domain_tol(a.breaks_) * 10;
    if (std::abs(a.upper() - b.lower()) > tol) {
        throw std::invalid_argument("PiecewisePoly::concat: domains do not abut");
    }
    std::vector<double> breaks = a.breaks_;
    std::vector<std::vector<cplx>> pieces = a.pieces_;
    breaks.insert(breaks.end(), b.breaks_.begin() + 1, b.breaks_.end());
    pieces.insert(pieces.end(), b.pieces_.begin(), b.pieces_.end());
    return PiecewisePoly(std::move(breaks), std::move(pieces));
}

cplx PiecewisePoly::integral() const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        acc += poly::integrate(pieces_[i], breaks_[i + 1] - breaks_[i]);
    }
    return acc;
}

double PiecewisePoly::max_abs(int samples_per_piece) const {
    double m = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const double h = breaks_[i + 1] - breaks_[i];
        for (int s = 0; s <= samples_per_piece; ++s) {
            m = std::max(m, std::abs(poly::eval(pieces_[i], h * s / samples_per_piece)));
        }
    }
    return m;
}

PiecewisePoly& PiecewisePoly::operator+=(const PiecewisePoly& other) {
    if (empty()) return *this = other;
    check_same_domain(*this, other, "+");
    const auto target = merged_domain(*this, other);
    auto lhs = align(*this, target);
    const auto rhs = align(other, target);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (lhs[i].size() < rhs[i].size()) lhs[i].resize(rhs[i].size(), 0.0);
        for (std::size_t j = 0; j < rhs[i].size(); ++j) lhs[i][j] += rhs[i][j];
    }
    breaks_ = target;
    pieces_ = std::move(lhs);
    return *this;
}

PiecewisePoly& PiecewisePoly::operator-=(const PiecewisePoly& other) { return *this += other * cplx{-1.0}; }

PiecewisePoly& PiecewisePoly::operator*=(cplx scale) {
    for (auto& p : pieces_) {
        for (auto& c : p) c *= scale;
    }
    return *this;
}

PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b) {
    check_same_domain(a, b, "*");
    const auto target = merged_domain(a, b);
    const auto lhs = align(a, target);
    const auto rhs = align(b, target);
    std::vector<std::vector<cplx>> pieces(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) pieces[i] = poly::multiply(lhs[i], rhs[i]);
    PiecewisePoly out(target, std::move(pieces));
    if (out.degree() > kDegreeWarning) {
        warn("piecewise polynomial product exceeds degree " + std::to_string(kDegreeWarning) +
             "; expect loss of accuracy");
    }
    return out;
}

cplx inner_product(const PiecewisePoly& f, const PiecewisePoly& g) {
    check_same_domain(f, g, "inner_product");
    const auto target = merged_domain(f, g);
    const auto lhs = align(f, target);
    const auto rhs = align(g, target);
    cplx acc = 0.0;
    std::vector<cplx> conj_rhs;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        conj_rhs.assign(rhs[i].begin(), rhs[i].end());
        for (auto& c : conj_rhs) c = std::conj(c);
        acc += poly::integrate(poly::multiply(lhs[i], conj_rhs), target[i + 1] - target[i]);
    }
    return acc;
}

}  // namespace treedamp
