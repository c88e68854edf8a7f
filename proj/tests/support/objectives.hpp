#pragma once

// Analytic objectives and independent reference computations for tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "cardionn/numeric.hpp"
#include "cardionn/objective.hpp"
#include "cardionn/random.hpp"

namespace cardionn::testing {

/// f(w) = ½ (w − w*)ᵀ A (w − w*), gradient A (w − w*).
class Quadratic final : public Objective {
public:
    Quadratic(Matrix a, Vector minimizer) : a_(std::move(a)), min_(std::move(minimizer)) {}

    std::size_t dimension() const override { return min_.size(); }
    const Matrix& hessian() const { return a_; }
    const Vector& minimizer() const { return min_; }

protected:
    double compute_value(std::span<const double> w) const override {
        const Vector d = subtract(w, min_);
        return 0.5 * dot(d, matvec(a_, d));
    }
    Vector compute_gradient(std::span<const double> w) const override { return matvec(a_, subtract(w, min_)); }

private:
    Matrix a_;
    Vector min_;
};

/// 2-D Rosenbrock, minimum 0 at (1, 1).
class Rosenbrock final : public Objective {
public:
    std::size_t dimension() const override { return 2; }

protected:
    double compute_value(std::span<const double> w) const override {
        const double a = 1.0 - w[0];
        const double b = w[1] - w[0] * w[0];
        return a * a + 100.0 * b * b;
    }
    Vector compute_gradient(std::span<const double> w) const override {
        const double b = w[1] - w[0] * w[0];
        return {-2.0 * (1.0 - w[0]) - 400.0 * w[0] * b, 200.0 * b};
    }
};

/// Linear least squares E = (1/M)‖t − Xw‖², residual form with J = X.
class LinearLeastSquares final : public Objective {
public:
    LinearLeastSquares(Matrix x, Vector t) : x_(std::move(x)), t_(std::move(t)) {}

    std::size_t dimension() const override { return x_.cols(); }
    bool has_residuals() const override { return true; }

protected:
    double compute_value(std::span<const double> w) const override {
        const Vector e = subtract(t_, matvec(x_, w));
        return dot(e, e) / static_cast<double>(t_.size());
    }
    Vector compute_gradient(std::span<const double> w) const override {
        const Vector e = subtract(t_, matvec(x_, w));
        return scaled(matvec_transposed(x_, e), -2.0 / static_cast<double>(t_.size()));
    }
    Residuals compute_residuals(std::span<const double> w) const override {
        return {x_, subtract(t_, matvec(x_, w))};
    }

private:
    Matrix x_;
    Vector t_;
};

/// One-dimensional f(x) = sqrt(1 + x²): convex, with curvature that decays
/// away from 0, so local quadratic models overshoot.
class SoftAbs final : public Objective {
public:
    std::size_t dimension() const override { return 1; }

protected:
    double compute_value(std::span<const double> w) const override { return std::sqrt(1.0 + w[0] * w[0]); }
    Vector compute_gradient(std::span<const double> w) const override {
        return {w[0] / std::sqrt(1.0 + w[0] * w[0])};
    }
};

inline Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

inline Vector random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

/// Random orthogonal matrix from modified Gram-Schmidt on a random matrix.
inline Matrix random_orthogonal(Rng& rng, std::size_t n) {
    Matrix q = random_matrix(rng, n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += q(i, j) * q(i, k);
            for (std::size_t i = 0; i < n; ++i) q(i, j) -= d * q(i, k);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
    }
    return q;
}

/// Q·diag(eigenvalues)·Qᵀ, symmetrized.
inline Matrix spd_with_spectrum(Rng& rng, const Vector& eigenvalues) {
    const std::size_t n = eigenvalues.size();
    const Matrix q = random_orthogonal(rng, n);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += q(i, k) * eigenvalues[k] * q(j, k);
            a(i, j) = s;
            a(j, i) = s;
        }
    return a;
}

/// Random SPD quadratic of dimension n with eigenvalues log-uniform in
/// [1, cond].
inline Quadratic random_quadratic(Rng& rng, std::size_t n, double cond = 100.0) {
    Vector eig(n);
    for (double& e : eig) e = std::exp(rng.uniform(0.0, std::log(cond)));
    return Quadratic(spd_with_spectrum(rng, eig), random_vector(rng, n, -2.0, 2.0));
}

inline bool is_spd(const Matrix& m) {
    try {
        cholesky(m);
        return true;
    } catch (const NotPositiveDefinite&) {
        return false;
    }
}

} // namespace cardionn::testing
