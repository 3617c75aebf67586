#pragma once

#include <complex>
#include <span>
#include <vector>

namespace treedamp {

using cplx = std::complex<double>;

/// Row-major dense complex matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0}) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<cplx> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const cplx> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::vector<cplx>& data() noexcept { return data_; }
    const std::vector<cplx>& data() const noexcept { return data_; }

    std::vector<cplx> operator*(std::span<const cplx> x) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// max |A - A^H| entrywise.
double hermitian_defect(const Matrix& a);

/// Lower factor L with A = L L^H. Only the lower triangle of A is read.
struct CholeskyFactor {
    Matrix lower;
    double min_pivot = 0.0;  // smallest squared diagonal of L
    std::size_t min_pivot_index = 0;
};

/// Reference implementation. Throws IndefiniteGramError if a pivot drops
/// to or below pivot_floor * max diagonal.
CholeskyFactor cholesky_serial(const Matrix& a, double pivot_floor = 1e-14);
/// OpenMP version of the same left-looking recurrence; bitwise equal
/// pivots are not guaranteed but agree to rounding.
CholeskyFactor cholesky_parallel(const Matrix& a, double pivot_floor = 1e-14);

std::vector<cplx> cholesky_solve(const CholeskyFactor& f, std::span<const cplx> b);

/// Gaussian elimination with partial pivoting. Throws NumericalError when singular.
std::vector<cplx> solve_linear(Matrix a, std::vector<cplx> b);

}  // namespace treedamp
