#pragma once

#include <stdexcept>
#include <string>

namespace treedamp {

/// Invalid input: malformed tree, coefficient set violating the leading
/// coefficient bound, bad configuration field.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown: indefinite or singular Gram matrix, singular
/// collocation system, insufficient quadrature.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The assembled Gram matrix lost positive definiteness during factorization.
class IndefiniteGramError : public NumericalError {
public:
    IndefiniteGramError(const std::string& what, std::size_t pivot_index, double pivot)
        : NumericalError(what), pivot_index_(pivot_index), pivot_(pivot) {}

    std::size_t pivot_index() const noexcept { return pivot_index_; }
    double pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_index_;
    double pivot_;
};

void warn(const std::string& message);

}  // namespace treedamp
