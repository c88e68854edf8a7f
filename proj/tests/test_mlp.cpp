#include <cmath>

#include "doctest.h"

#include "cardionn/mlp.hpp"
#include "support/reference_net.hpp"

using namespace cardionn;
using namespace cardionn::testing;

namespace {

Samples one_sample(std::initializer_list<double> x, double t) {
    Samples s{Matrix(1, x.size(), std::vector<double>(x)), Vector{t}};
    return s;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

TEST_CASE("topology") {
    Topology t;
    CHECK(t.parameter_count() == 106);
    CHECK(t.inputs() == 13);
    CHECK_NOTHROW(t.validate());

    CHECK(Topology{{2, 2, 1}}.parameter_count() == 2 * 2 + 2 + 2 + 1);
    CHECK(Topology{{1, 1}}.parameter_count() == 2);

    CHECK_THROWS_AS(Topology{{13}}.validate(), std::invalid_argument);
    CHECK_THROWS_AS((Topology{{13, 0, 1}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((Topology{{13, 7, 2}}.validate()), std::invalid_argument);

    const Topology p = parse_layers("13,5,3,1", Activation::logistic, Activation::tanh);
    CHECK(p.layers == std::vector<std::size_t>{13, 5, 3, 1});
    CHECK(p.hidden == Activation::logistic);
    CHECK(format_layers(p) == "13,5,3,1");
    CHECK(parse_layers("13-7-1", Activation::tanh, Activation::tanh).layers == std::vector<std::size_t>{13, 7, 1});
    CHECK_THROWS_AS(parse_layers("13,,1", Activation::tanh, Activation::tanh), std::invalid_argument);
    CHECK_THROWS_AS(parse_layers("a,1", Activation::tanh, Activation::tanh), std::invalid_argument);

    CHECK(parse_activation("tanh") == Activation::tanh);
    CHECK(parse_activation("logistic") == Activation::logistic);
    CHECK_FALSE(parse_activation("relu"));
}

TEST_CASE("activations") {
    CHECK(activate(Activation::tanh, 0.0) == 0.0);
    CHECK(activate(Activation::logistic, 0.0) == 0.5);
    for (double z : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
        const double h = 1e-6;
        for (Activation a : {Activation::tanh, Activation::logistic}) {
            const double fd = (activate(a, z + h) - activate(a, z - h)) / (2 * h);
            CHECK(activation_slope(a, activate(a, z)) == doctest::Approx(fd).epsilon(1e-8));
        }
    }
}

TEST_CASE("init_params") {
    const Topology t;
    const Vector a = init_params(t, 5);
    CHECK(a.size() == 106);
    CHECK(a == init_params(t, 5));
    for (double v : a) {
        CHECK(v >= -0.5);
        CHECK(v <= 0.5);
    }
    CHECK(a != init_params(t, 6));

    const Vector nw = init_params(t, 5, InitScheme::nguyen_widrow);
    const double beta = 0.7 * std::pow(7.0, 1.0 / 13.0);
    const auto layers = unflatten(t, nw);
    for (std::size_t j = 0; j < 7; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 13; ++i) s += layers[0].weights[j * 13 + i] * layers[0].weights[j * 13 + i];
        CHECK(std::sqrt(s) == doctest::Approx(beta).epsilon(1e-12));
        CHECK(std::abs(layers[0].biases[j]) <= beta);
    }
    CHECK(nw == init_params(t, 5, InitScheme::nguyen_widrow));
}

TEST_CASE("flatten and unflatten round-trip exactly") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const RandomNet net = random_net(rng);
        const auto views = unflatten(net.topology, net.params);
        CHECK(views.size() == net.topology.layers.size() - 1);
        CHECK(flatten(net.topology, views) == net.params);
    }
    CHECK_THROWS_AS(unflatten(Topology{}, Vector(105)), DimensionMismatch);
}

TEST_CASE("forward with zero parameters") {
    Topology t;
    const Vector w(t.parameter_count(), 0.0);
    const Vector x(13, 0.4);
    CHECK(forward(t, w, x) == 0.0);
    t.output = Activation::logistic;
    CHECK(forward(t, w, x) == 0.5);
}

TEST_CASE("forward on a 1-1-1 net matches the hand-composed chain") {
    const Topology t{{1, 1, 1}, Activation::tanh, Activation::logistic};
    const Vector w{0.8, -0.3, 1.7, 0.2}; // w1, b1, w2, b2
    const double x = 0.6;
    const double expected = logistic(1.7 * std::tanh(0.8 * x - 0.3) + 0.2);
    CHECK(forward(t, w, Vector{x}) == doctest::Approx(expected).epsilon(1e-15));

    CHECK_THROWS_AS(forward(t, w, Vector{1.0, 2.0}), DimensionMismatch);
    CHECK_THROWS_AS(forward(t, Vector{1.0}, Vector{x}), DimensionMismatch);
}

TEST_CASE("forward matches the reference network and stays in range") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const RandomNet net = random_net(rng);
        for (std::size_t m = 0; m < net.samples.size(); ++m) {
            const double y = forward(net.topology, net.params, net.samples.features.row(m));
            const double ref =
                static_cast<double>(ref_output(net.topology, widen(net.params), net.samples.features.row(m)));
            CHECK(y == doctest::Approx(ref).epsilon(1e-14));
            if (net.topology.output == Activation::tanh) {
                CHECK(y > -1.0);
                CHECK(y < 1.0);
            } else {
                CHECK(y > 0.0);
                CHECK(y < 1.0);
            }
        }
    }
}

TEST_CASE("forward saturates without NaN for huge parameters") {
    Topology t;
    Vector w(t.parameter_count());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = (i % 2 ? -1.0 : 1.0) * 1e200;
    const double y = forward(t, w, Vector(13, 0.5));
    CHECK(std::isfinite(y));
    CHECK(std::abs(y) <= 1.0);
    t.hidden = Activation::logistic;
    t.output = Activation::logistic;
    const double z = forward(t, w, Vector(13, -0.5));
    CHECK(std::isfinite(z));
    CHECK(z >= 0.0);
    CHECK(z <= 1.0);
}

TEST_CASE("predict evaluates every row") {
    Rng rng(5);
    const RandomNet net = random_net(rng);
    const Vector y = predict(net.topology, net.params, net.samples.features);
    REQUIRE(y.size() == net.samples.size());
    for (std::size_t m = 0; m < y.size(); ++m)
        CHECK(y[m] == forward(net.topology, net.params, net.samples.features.row(m)));
}

TEST_CASE("mse_loss") {
    const Topology single{{1, 1}, Activation::tanh, Activation::tanh};
    CHECK(mse_loss(single, Vector{0.0, 0.0}, one_sample({0.3}, 1.0)) == 1.0);

    Rng rng(6);
    RandomNet net = random_net(rng);
    net.samples.targets = predict(net.topology, net.params, net.samples.features);
    CHECK(mse_loss(net.topology, net.params, net.samples) == 0.0);

    for (int trial = 0; trial < 20; ++trial) {
        const RandomNet r = random_net(rng);
        double sum = 0.0;
        for (std::size_t m = 0; m < r.samples.size(); ++m) {
            const double e = r.samples.targets[m] - forward(r.topology, r.params, r.samples.features.row(m));
            sum += e * e;
        }
        CHECK(mse_loss(r.topology, r.params, r.samples) ==
              doctest::Approx(sum / static_cast<double>(r.samples.size())).epsilon(1e-14));
    }

    CHECK_THROWS_AS(mse_loss(single, Vector{0.0, 0.0}, Samples{}), std::invalid_argument);
}

TEST_CASE("gradient of a single logistic neuron") {
    const Topology t{{1, 1}, Activation::tanh, Activation::logistic};
    const Samples s = one_sample({1.0}, 1.0);
    const Vector g = gradient(t, Vector{0.0, 0.0}, s);
    CHECK(g[0] == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(-0.25).epsilon(1e-15));
    const Vector fd = fd_gradient(t, Vector{0.0, 0.0}, s);
    CHECK(g[0] == doctest::Approx(fd[0]).epsilon(1e-9));
}

TEST_CASE("gradient vanishes where the loss is zero") {
    Rng rng(7);
    RandomNet net = random_net(rng);
    net.samples.targets = predict(net.topology, net.params, net.samples.features);
    for (double v : gradient(net.topology, net.params, net.samples)) CHECK(v == 0.0);
    for (double v : jacobian(net.topology, net.params, net.samples).errors) CHECK(v == 0.0);
}

TEST_CASE("gradient matches central finite differences") {
    Rng rng(8);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const RandomNet net = random_net(rng);
        const Vector g = gradient(net.topology, net.params, net.samples);
        const Vector fd = fd_gradient(net.topology, net.params, net.samples);
        for (std::size_t n = 0; n < g.size(); ++n) worst = std::max(worst, relative_error(g[n], fd[n]));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("jacobian entries match finite differences of the outputs") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const RandomNet net = random_net(rng);
        const Residuals r = jacobian(net.topology, net.params, net.samples);
        const Matrix fd = fd_output_jacobian(net.topology, net.params, net.samples);
        REQUIRE(r.jacobian.rows() == net.samples.size());
        REQUIRE(r.jacobian.cols() == net.params.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < fd.data().size(); ++i)
            worst = std::max(worst, relative_error(r.jacobian.data()[i], fd.data()[i]));
        CHECK(worst <= 1e-6);
        const Vector y = predict(net.topology, net.params, net.samples.features);
        for (std::size_t m = 0; m < y.size(); ++m) CHECK(r.errors[m] == net.samples.targets[m] - y[m]);
    }
}

TEST_CASE("-(2/M) J^T e reproduces the gradient") {
    Rng rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        const RandomNet net = random_net(rng);
        const Residuals r = jacobian(net.topology, net.params, net.samples);
        const Vector g = gradient(net.topology, net.params, net.samples);
        const double m = static_cast<double>(net.samples.size());
        const Vector jte = matvec_transposed(r.jacobian, r.errors);
        for (std::size_t n = 0; n < g.size(); ++n) CHECK(std::abs(-2.0 / m * jte[n] - g[n]) <= 1e-10);
    }
}

TEST_CASE("MlpObjective counts evaluations and agrees with the free functions") {
    Rng rng(11);
    const RandomNet net = random_net(rng);
    const MlpObjective f(net.topology, net.samples);
    CHECK(f.dimension() == net.params.size());
    CHECK(f.has_residuals());

    CHECK(f.value(net.params) == mse_loss(net.topology, net.params, net.samples));
    CHECK(f.gradient(net.params) == gradient(net.topology, net.params, net.samples));
    Vector g;
    const double v = f.value_and_gradient(net.params, g);
    CHECK(v == doctest::Approx(mse_loss(net.topology, net.params, net.samples)).epsilon(1e-15));
    const Vector ref = gradient(net.topology, net.params, net.samples);
    for (std::size_t n = 0; n < g.size(); ++n) CHECK(g[n] == doctest::Approx(ref[n]).epsilon(1e-13));
    const Residuals r = f.residuals(net.params);
    CHECK(r.errors.size() == net.samples.size());

    CHECK(f.counts() == EvalCounts{2, 2, 1});
    f.reset_counts();
    CHECK(f.counts() == EvalCounts{});
}

TEST_CASE("subset picks rows in the given order") {
    Samples s{Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}}), Vector{1, -1, 1}};
    const std::vector<std::size_t> rows{2, 0};
    const Samples sub = subset(s, rows);
    CHECK(sub.features == Matrix::from_rows({{5, 6}, {1, 2}}));
    CHECK(sub.targets == Vector{1, 1});
}
