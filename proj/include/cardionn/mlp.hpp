#pragma once

// Fully connected feedforward network with a single output neuron.
//
// Parameter layout: for each layer transition l -> l+1 (input side first),
// the weight matrix of shape size[l+1] x size[l] in row-major order
// (one row per receiving neuron), followed by its size[l+1] biases.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cardionn/numeric.hpp"
#include "cardionn/objective.hpp"

namespace cardionn {

enum class Activation { logistic, tanh };

std::string_view to_string(Activation a);
std::optional<Activation> parse_activation(std::string_view s);

/// Activation value at z.
double activate(Activation a, double z);
/// Derivative expressed through the activation output y = f(z).
double activation_slope(Activation a, double y);

struct Topology {
    std::vector<std::size_t> layers{13, 7, 1};
    Activation hidden = Activation::tanh;
    Activation output = Activation::tanh;

    std::size_t inputs() const { return layers.front(); }
    std::size_t parameter_count() const;

    /// Throws std::invalid_argument unless there are at least two layers,
    /// every layer is nonempty and the output layer has exactly one neuron.
    void validate() const;

    bool operator==(const Topology&) const = default;
};

Topology parse_layers(std::string_view spec, Activation hidden, Activation output);
std::string format_layers(const Topology& t);

/// Feature rows paired with scalar targets.
struct Samples {
    Matrix features;
    Vector targets;

    std::size_t size() const { return targets.size(); }
};

Samples subset(const Samples& s, std::span<const std::size_t> rows);

enum class InitScheme { uniform, nguyen_widrow };

std::string_view to_string(InitScheme s);
std::optional<InitScheme> parse_init_scheme(std::string_view s);

/// Deterministic for a given seed. `uniform` draws every parameter from
/// [-0.5, 0.5]; `nguyen_widrow` rescales each hidden neuron's incoming
/// weights to norm 0.7·H^(1/n) and draws its bias from the same range.
Vector init_params(const Topology& t, std::uint64_t seed, InitScheme scheme = InitScheme::uniform);

/// Views of one layer's weights and biases inside a flat parameter vector.
struct LayerView {
    std::span<const double> weights; // rows = size[l+1], cols = size[l]
    std::span<const double> biases;
    std::size_t fan_in;
    std::size_t fan_out;
};
std::vector<LayerView> unflatten(const Topology& t, std::span<const double> params);
Vector flatten(const Topology& t, std::span<const LayerView> layers);

double forward(const Topology& t, std::span<const double> params, std::span<const double> features);

/// Network outputs for every row of `features`.
Vector predict(const Topology& t, std::span<const double> params, const Matrix& features);

/// E = (1/M)·Σ (tₘ − yₘ)².
double mse_loss(const Topology& t, std::span<const double> params, const Samples& samples);

/// ∂E/∂w in parameter layout.
Vector gradient(const Topology& t, std::span<const double> params, const Samples& samples);

/// J = ∂y/∂w (M×N) together with e = t − y. Satisfies g = −(2/M)·Jᵀe.
Residuals jacobian(const Topology& t, std::span<const double> params, const Samples& samples);

/// Training objective over a fixed sample set.
class MlpObjective final : public Objective {
public:
    MlpObjective(Topology topology, const Samples& samples);

    std::size_t dimension() const override { return topology_.parameter_count(); }
    bool has_residuals() const override { return true; }

    const Topology& topology() const { return topology_; }

protected:
    double compute_value(std::span<const double> w) const override;
    Vector compute_gradient(std::span<const double> w) const override;
    double compute_value_and_gradient(std::span<const double> w, Vector& grad) const override;
    Residuals compute_residuals(std::span<const double> w) const override;

private:
    Topology topology_;
    const Samples& samples_;
};

} // namespace cardionn
