#pragma once

// Small dense linear algebra used by the network and the optimizers.
//
// All reductions run left to right in index order, so results are
// bit-reproducible regardless of how many workers share the data.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cardionn {

using Vector = std::vector<double>;

class DimensionMismatch : public std::invalid_argument {
public:
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised by the Cholesky solver when a pivot is not strictly positive.
/// Levenberg-Marquardt uses it as its signal to raise the damping.
class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(std::size_t pivot)
        : std::runtime_error("matrix is not positive definite (pivot " + std::to_string(pivot) + ")"),
          pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
bool all_finite(std::span<const double> a);

/// y <- y + alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector scaled(std::span<const double> x, double alpha);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);

Vector matvec(const Matrix& m, std::span<const double> v);
/// Mᵀ·v without forming the transpose.
Vector matvec_transposed(const Matrix& m, std::span<const double> v);

/// JᵀJ. The upper triangle is computed and mirrored, so the result is
/// exactly symmetric.
Matrix gram(const Matrix& j);

/// Lower-triangular L with A = L·Lᵀ. Throws NotPositiveDefinite.
Matrix cholesky(const Matrix& a);

/// Solves A·x = b for symmetric positive definite A via Cholesky.
Vector solve_spd(const Matrix& a, std::span<const double> b);

} // namespace cardionn
