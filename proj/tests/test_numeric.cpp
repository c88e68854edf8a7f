#include <cmath>

#include "doctest.h"

#include "cardionn/numeric.hpp"
#include "cardionn/random.hpp"
#include "support/objectives.hpp"

using namespace cardionn;
using cardionn::testing::random_matrix;
using cardionn::testing::random_vector;
using cardionn::testing::spd_with_spectrum;

TEST_CASE("dot") {
    CHECK(dot(Vector{1, 0}, Vector{0, 1}) == 0.0);
    CHECK(dot(Vector{2, 3}, Vector{2, 3}) == 13.0);

    Rng rng(11);
    const Vector a = random_vector(rng, 5);
    const Vector b = random_vector(rng, 5);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += a[i] * b[i];
    CHECK(dot(a, b) == s);

    CHECK_THROWS_AS(dot(Vector{1, 2}, Vector{1}), DimensionMismatch);
}

TEST_CASE("norm and finiteness") {
    CHECK(norm(Vector{3, 4}) == 5.0);
    CHECK(all_finite(Vector{1, -2, 0}));
    CHECK_FALSE(all_finite(Vector{1, NAN}));
    CHECK_FALSE(all_finite(Vector{INFINITY}));
}

TEST_CASE("vector arithmetic") {
    Vector y{1, 1, 1};
    axpy(2.0, Vector{1, 2, 3}, y);
    CHECK(y == Vector{3, 5, 7});
    CHECK(scaled(Vector{1, -2}, -0.5) == Vector{-0.5, 1.0});
    CHECK(add(Vector{1, 2}, Vector{3, 4}) == Vector{4, 6});
    CHECK(subtract(Vector{1, 2}, Vector{3, 5}) == Vector{-2, -3});
    CHECK_THROWS_AS(add(Vector{1}, Vector{1, 2}), DimensionMismatch);
}

TEST_CASE("matvec") {
    CHECK(matvec(Matrix::identity(3), Vector{1, 2, 3}) == Vector{1, 2, 3});
    CHECK(matvec(Matrix(2, 3), Vector{4, 5, 6}) == Vector{0, 0});

    Rng rng(12);
    const Matrix m = random_matrix(rng, 3, 2);
    const Vector v = random_vector(rng, 2);
    const Vector got = matvec(m, v);
    for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 2; ++j) s += m(i, j) * v[j];
        CHECK(got[i] == doctest::Approx(s).epsilon(1e-15));
    }

    const Vector u = random_vector(rng, 3);
    const Vector gt = matvec_transposed(m, u);
    for (std::size_t j = 0; j < 2; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) s += m(i, j) * u[i];
        CHECK(gt[j] == doctest::Approx(s).epsilon(1e-15));
    }

    CHECK_THROWS_AS(matvec(m, Vector{1, 2, 3}), DimensionMismatch);
    CHECK_THROWS_AS(matvec_transposed(m, Vector{1, 2}), DimensionMismatch);
}

TEST_CASE("gram") {
    CHECK(gram(Matrix::identity(2)) == Matrix::identity(2));
    CHECK(gram(Matrix::from_rows({{1}, {2}})) == Matrix::from_rows({{5}}));

    Rng rng(13);
    const Matrix j = random_matrix(rng, 4, 3);
    const Matrix g = gram(j);
    REQUIRE(g.rows() == 3);
    REQUIRE(g.cols() == 3);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            double s = 0.0;
            for (std::size_t m = 0; m < 4; ++m) s += j(m, a) * j(m, b);
            CHECK(g(a, b) == doctest::Approx(s).epsilon(1e-15));
        }
}

TEST_CASE("gram is exactly symmetric") {
    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rows = 1 + rng.below(30);
        const std::size_t cols = 1 + rng.below(12);
        const Matrix g = gram(random_matrix(rng, rows, cols, -10.0, 10.0));
        for (std::size_t a = 0; a < cols; ++a)
            for (std::size_t b = 0; b < a; ++b) REQUIRE(g(a, b) == g(b, a));
    }
}

TEST_CASE("solve_spd small systems") {
    CHECK(solve_spd(Matrix::identity(2), Vector{3, 4}) == Vector{3, 4});

    const Vector d = solve_spd(Matrix::from_rows({{4, 0}, {0, 9}}), Vector{8, 27});
    CHECK(d[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(d[1] == doctest::Approx(3.0).epsilon(1e-15));

    const Vector x = solve_spd(Matrix::from_rows({{2, 1}, {1, 2}}), Vector{3, 3});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cholesky factor reproduces the matrix") {
    const Matrix a = Matrix::from_rows({{4, 2, 2}, {2, 5, 3}, {2, 3, 6}});
    const Matrix l = cholesky(a);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            if (j > i) CHECK(l(i, j) == 0.0);
            double s = 0.0;
            for (std::size_t k = 0; k < 3; ++k) s += l(i, k) * l(j, k);
            CHECK(s == doctest::Approx(a(i, j)).epsilon(1e-14));
        }
}

TEST_CASE("solve_spd recovers x on random SPD systems up to condition 1e6") {
    Rng rng(15);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng.below(20);
        const double cond = std::pow(10.0, rng.uniform(0.0, 6.0));
        Vector eig(n);
        for (std::size_t i = 0; i < n; ++i)
            eig[i] = n == 1 ? 1.0 : std::pow(cond, static_cast<double>(i) / static_cast<double>(n - 1));
        const Matrix a = spd_with_spectrum(rng, eig);
        const Vector x = random_vector(rng, n);
        const Vector got = solve_spd(a, matvec(a, x));
        REQUIRE(norm(subtract(got, x)) <= 1e-8 * norm(x));
    }
}

TEST_CASE("solve_spd residual on well-conditioned systems") {
    Rng rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(15);
        Vector eig(n);
        for (double& e : eig) e = rng.uniform(1.0, 10.0);
        const Matrix a = spd_with_spectrum(rng, eig);
        const Vector b = random_vector(rng, n, -5.0, 5.0);
        const Vector x = solve_spd(a, b);
        CHECK(norm(subtract(matvec(a, x), b)) <= 1e-10 * (1.0 + norm(b)));
    }
}

TEST_CASE("solve_spd rejects indefinite matrices") {
    CHECK_THROWS_AS(solve_spd(Matrix::from_rows({{1, 2}, {2, 1}}), Vector{1, 1}), NotPositiveDefinite);
    CHECK_THROWS_AS(solve_spd(Matrix::from_rows({{0, 0}, {0, 1}}), Vector{1, 1}), NotPositiveDefinite);

    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(10);
        Vector eig(n);
        for (double& e : eig) e = rng.uniform(0.5, 5.0);
        eig[rng.below(n)] = -rng.uniform(0.1, 2.0);
        CHECK_THROWS_AS(solve_spd(spd_with_spectrum(rng, eig), random_vector(rng, n)), NotPositiveDefinite);
    }
}

TEST_CASE("solve_spd dimension checks") {
    CHECK_THROWS_AS(solve_spd(Matrix(2, 3), Vector{1, 1}), DimensionMismatch);
    CHECK_THROWS_AS(solve_spd(Matrix::identity(2), Vector{1, 1, 1}), DimensionMismatch);
}

TEST_CASE("rng is reproducible and in range") {
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform01();
        CHECK(u == b.uniform01());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const std::size_t k = a.below(7);
        CHECK(k == b.below(7));
        CHECK(k < 7);
    }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}
