#pragma once

#include <complex>
#include <span>
#include <vector>

namespace treedamp {

using cplx = std::complex<double>;

/// Which one-sided limit to take at a breakpoint.
enum class Side { Left, Right };

/// Dense polynomial helpers. Coefficients are stored lowest power first.
namespace poly {

cplx eval(std::span<const cplx> c, double s);
/// k-th derivative evaluated at s.
cplx eval_derivative(std::span<const cplx> c, double s, int k);
std::vector<cplx> derivative(std::span<const cplx> c, int k = 1);
std::vector<cplx> multiply(std::span<const cplx> a, std::span<const cplx> b);
/// Re-expand c(s) around s = delta, i.e. return d with d(r) = c(r + delta).
std::vector<cplx> taylor_shift(std::span<const cplx> c, double delta);
/// Integral of c(s) over [0, h].
cplx integrate(std::span<const cplx> c, double h);
int degree(std::span<const cplx> c);

}  // namespace poly

/// Complex piecewise polynomial on [breaks.front(), breaks.back()].
///
/// Each piece i covers [breaks[i], breaks[i+1]] and stores its coefficients
/// in powers of the local offset (t - breaks[i]). Shifting the domain
/// therefore leaves coefficients untouched. Values at a breakpoint are
/// one-sided; the default is right-continuous except at the upper end.
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    PiecewisePoly(std::vector<double> breaks, std::vector<std::vector<cplx>> pieces);

    static PiecewisePoly zero(double a, double b);
    static PiecewisePoly constant(double a, double b, cplx value);
    /// Single piece on [a, b] given coefficients in powers of t (not t - a).
    static PiecewisePoly from_monomial(double a, double b, std::span<const cplx> coeffs);

    bool empty() const noexcept { return pieces_.empty(); }
    double lower() const { return breaks_.front(); }
    double upper() const { return breaks_.back(); }
    std::size_t num_pieces() const noexcept { return pieces_.size(); }
    const std::vector<double>& breakpoints() const noexcept { return breaks_; }
    const std::vector<cplx>& piece(std::size_t i) const { return pieces_[i]; }
    int degree() const;

    /// Index of the piece holding t for the requested side.
    std::size_t locate(double t, Side side = Side::Right) const;

    cplx operator()(double t, Side side = Side::Right) const { return derivative_at(t, 0, side); }
    cplx derivative_at(double t, int k, Side side = Side::Right) const;

    PiecewisePoly derivative(int k = 1) const;
    PiecewisePoly restricted(double a, double b) const;
    PiecewisePoly shifted(double delta) const;
    /// Shift so the domain becomes exactly [a, b]; b - a must match the
    /// current width up to breakpoint tolerance.
    PiecewisePoly relocated(double a, double b) const;
    PiecewisePoly conjugated() const;
    /// Same function with every point of `extra` (inside the domain) made a breakpoint.
    PiecewisePoly refined(std::span<const double> extra) const;

    /// Join two functions with a.upper() == b.lower().
    static PiecewisePoly concat(const PiecewisePoly& a, const PiecewisePoly& b);

    cplx integral() const;
    /// max |coefficient-evaluated value| over a sample grid of each piece.
    double max_abs(int samples_per_piece = 8) const;

    PiecewisePoly& operator+=(const PiecewisePoly& other);
    PiecewisePoly& operator-=(const PiecewisePoly& other);
    PiecewisePoly& operator*=(cplx scale);

    friend PiecewisePoly operator+(PiecewisePoly a, const PiecewisePoly& b) { return a += b; }
    friend PiecewisePoly operator-(PiecewisePoly a, const PiecewisePoly& b) { return a -= b; }
    friend PiecewisePoly operator*(PiecewisePoly a, cplx s) { return a *= s; }
    friend PiecewisePoly operator*(cplx s, PiecewisePoly a) { return a *= s; }
    friend PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b);

private:
    std::vector<double> breaks_;
    std::vector<std::vector<cplx>> pieces_;
};

/// Integral of f * conj(g) over the common domain.
cplx inner_product(const PiecewisePoly& f, const PiecewisePoly& g);

/// Sorted union of breakpoint sets with near-duplicates collapsed.
std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b);

/// Tolerance used to identify coincident breakpoints on a domain of size `scale`.
double breakpoint_tolerance(double scale);

}  // namespace treedamp
