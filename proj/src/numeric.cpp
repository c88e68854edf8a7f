#include "cardionn/numeric.hpp"

#include <cmath>

namespace cardionn {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* op) {
    if (a != b) {
        throw DimensionMismatch(std::string(op) + ": length " + std::to_string(a) + " vs " +
                                std::to_string(b));
    }
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionMismatch("Matrix: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                                " needs " + std::to_string(rows_ * cols_) + " elements, got " +
                                std::to_string(data_.size()));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionMismatch("Matrix::from_rows: ragged rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_length(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector scaled(std::span<const double> x, double alpha) {
    Vector out(x.begin(), x.end());
    for (double& v : out) v *= alpha;
    return out;
}

Vector add(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "add");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "subtract");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector matvec(const Matrix& m, std::span<const double> v) {
    require_same_length(m.cols(), v.size(), "matvec");
    Vector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out[r] = dot(m.row(r), v);
    return out;
}

Vector matvec_transposed(const Matrix& m, std::span<const double> v) {
    require_same_length(m.rows(), v.size(), "matvec_transposed");
    Vector out(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) axpy(v[r], m.row(r), out);
    return out;
}

Matrix gram(const Matrix& j) {
    if (j.empty()) throw DimensionMismatch("gram: empty matrix");
    const std::size_t n = j.cols();
    Matrix g(n, n);
    // Accumulate row by row; each entry still sums over rows in index order.
    for (std::size_t r = 0; r < j.rows(); ++r) {
        const auto row = j.row(r);
        for (std::size_t a = 0; a < n; ++a) {
            const double ra = row[a];
            if (ra == 0.0) continue;
            double* out = &g(a, 0);
            for (std::size_t b = a; b < n; ++b) out[b] += ra * row[b];
        }
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) g(b, a) = g(a, b);
    return g;
}

Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("cholesky: matrix not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw NotPositiveDefinite(j);
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

Vector solve_spd(const Matrix& a, std::span<const double> b) {
    require_same_length(a.rows(), b.size(), "solve_spd");
    const Matrix l = cholesky(a);
    const std::size_t n = a.rows();
    Vector x(b.begin(), b.end());
    // L·y = b
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    // Lᵀ·x = y
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

} // namespace cardionn
