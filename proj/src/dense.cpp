#include "treedamp/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "treedamp/errors.hpp"

namespace treedamp {

std::vector<cplx> Matrix::operator*(std::span<const cplx> x) const {
    if (x.size() != cols_) throw std::invalid_argument("Matrix * vector: size mismatch");
    std::vector<cplx> y(rows_, cplx{0.0});
    for (std::size_t i = 0; i < rows_; ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

double hermitian_defect(const Matrix& a) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
    }
    return d;
}

namespace {

double max_diagonal(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, i).real()));
    return m;
}

// sum_{k<len} x[k] * conj(y[k])
cplx dot_conj(const cplx* x, const cplx* y, std::size_t len) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < len; ++k) acc += x[k] * std::conj(y[k]);
    return acc;
}

void check_square(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: matrix not square");
}

[[noreturn]] void throw_indefinite(std::size_t j, double pivot) {
    throw IndefiniteGramError("Gram matrix is not positive definite (pivot " + std::to_string(j) + " = " +
                                  std::to_string(pivot) + "); check that b_n stays away from zero",
                              j, pivot);
}

}  // namespace

CholeskyFactor cholesky_serial(const Matrix& a, double pivot_floor) {
    check_square(a);
    const std::size_t n = a.rows();
    CholeskyFactor f{Matrix(n, n), std::numeric_limits<double>::infinity(), 0};
    Matrix& L = f.lower;
    const double floor = pivot_floor * max_diagonal(a);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx* Lj = &L(j, 0);
        const double pivot = a(j, j).real() - dot_conj(Lj, Lj, j).real();
        if (!(pivot > floor)) throw_indefinite(j, pivot);
        if (pivot < f.min_pivot) {
            f.min_pivot = pivot;
            f.min_pivot_index = j;
        }
        const double d = std::sqrt(pivot);
        L(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) L(i, j) = (a(i, j) - dot_conj(&L(i, 0), Lj, j)) / d;
    }
    return f;
}

CholeskyFactor cholesky_parallel(const Matrix& a, double pivot_floor) {
    check_square(a);
    const std::size_t n = a.rows();
    CholeskyFactor f{Matrix(n, n), std::numeric_limits<double>::infinity(), 0};
    Matrix& L = f.lower;
    const double floor = pivot_floor * max_diagonal(a);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx* Lj = &L(j, 0);
        const double pivot = a(j, j).real() - dot_conj(Lj, Lj, j).real();
        if (!(pivot > floor)) throw_indefinite(j, pivot);
        if (pivot < f.min_pivot) {
            f.min_pivot = pivot;
            f.min_pivot_index = j;
        }
        const double d = std::sqrt(pivot);
        L(j, j) = d;
        const auto first = static_cast<std::ptrdiff_t>(j + 1);
        const auto last = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n - j > 64)
        for (std::ptrdiff_t i = first; i < last; ++i) {
            const auto row = static_cast<std::size_t>(i);
            L(row, j) = (a(row, j) - dot_conj(&L(row, 0), Lj, j)) / d;
        }
    }
    return f;
}

std::vector<cplx> cholesky_solve(const CholeskyFactor& f, std::span<const cplx> b) {
    const Matrix& L = f.lower;
    const std::size_t n = L.rows();
    if (b.size() != n) throw std::invalid_argument("cholesky_solve: size mismatch");
    std::vector<cplx> z(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc = z[i];
        for (std::size_t k = 0; k < i; ++k) acc -= L(i, k) * z[k];
        z[i] = acc / L(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        cplx acc = z[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= std::conj(L(k, i)) * z[k];
        z[i] = acc / std::conj(L(i, i));
    }
    return z;
}

std::vector<cplx> solve_linear(Matrix a, std::vector<cplx> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_linear: size mismatch");
    double scale = 0.0;
    for (const auto& v : a.data()) scale = std::max(scale, std::abs(v));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        }
        if (!(std::abs(a(piv, col)) > 1e-14 * scale)) throw NumericalError("solve_linear: singular system");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx factor = a(r, col) / a(col, col);
            if (factor == cplx{0.0}) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
            b[r] -= factor * b[col];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return x;
}

}  // namespace treedamp
