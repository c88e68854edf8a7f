#include "cardionn/mlp.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "cardionn/random.hpp"

namespace cardionn {

std::string_view to_string(Activation a) {
    return a == Activation::tanh ? "tanh" : "logistic";
}

std::optional<Activation> parse_activation(std::string_view s) {
    if (s == "tanh") return Activation::tanh;
    if (s == "logistic" || s == "sigmoid") return Activation::logistic;
    return std::nullopt;
}

double activate(Activation a, double z) {
    if (a == Activation::tanh) return std::tanh(z);
    return 1.0 / (1.0 + std::exp(-z));
}

double activation_slope(Activation a, double y) {
    if (a == Activation::tanh) return 1.0 - y * y;
    return y * (1.0 - y);
}

std::size_t Topology::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) n += layers[l] * layers[l + 1] + layers[l + 1];
    return n;
}

void Topology::validate() const {
    if (layers.size() < 2) throw std::invalid_argument("topology needs at least two layers");
    for (std::size_t s : layers)
        if (s == 0) throw std::invalid_argument("topology layer sizes must be >= 1");
    if (layers.back() != 1) throw std::invalid_argument("topology must end in a single output neuron");
}

Topology parse_layers(std::string_view spec, Activation hidden, Activation output) {
    Topology t;
    t.layers.clear();
    t.hidden = hidden;
    t.output = output;
    while (!spec.empty()) {
        const auto cut = spec.find_first_of(",-x");
        const auto token = spec.substr(0, cut);
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
            throw std::invalid_argument("bad layer list: '" + std::string(spec) + "'");
        }
        t.layers.push_back(v);
        if (cut == std::string_view::npos) break;
        spec.remove_prefix(cut + 1);
    }
    t.validate();
    return t;
}

std::string format_layers(const Topology& t) {
    std::string out;
    for (std::size_t i = 0; i < t.layers.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(t.layers[i]);
    }
    return out;
}

Samples subset(const Samples& s, std::span<const std::size_t> rows) {
    Samples out{Matrix(rows.size(), s.features.cols()), Vector(rows.size())};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = s.features.row(rows[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.targets[i] = s.targets[rows[i]];
    }
    return out;
}

std::string_view to_string(InitScheme s) {
    return s == InitScheme::uniform ? "uniform" : "nguyen_widrow";
}

std::optional<InitScheme> parse_init_scheme(std::string_view s) {
    if (s == "uniform") return InitScheme::uniform;
    if (s == "nguyen_widrow" || s == "nguyen-widrow") return InitScheme::nguyen_widrow;
    return std::nullopt;
}

Vector init_params(const Topology& t, std::uint64_t seed, InitScheme scheme) {
    t.validate();
    Rng rng(seed);
    Vector w(t.parameter_count());
    for (double& v : w) v = rng.uniform(-0.5, 0.5);
    if (scheme == InitScheme::uniform) return w;

    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < t.layers.size(); ++l) {
        const std::size_t in = t.layers[l];
        const std::size_t out = t.layers[l + 1];
        const bool hidden = l + 2 < t.layers.size();
        if (hidden) {
            const double beta = 0.7 * std::pow(static_cast<double>(out), 1.0 / static_cast<double>(in));
            for (std::size_t j = 0; j < out; ++j) {
                std::span<double> row(w.data() + offset + j * in, in);
                const double n = norm(row);
                if (n > 0.0)
                    for (double& v : row) v *= beta / n;
            }
            for (std::size_t j = 0; j < out; ++j) w[offset + out * in + j] = rng.uniform(-beta, beta);
        }
        offset += out * in + out;
    }
    return w;
}

std::vector<LayerView> unflatten(const Topology& t, std::span<const double> params) {
    if (params.size() != t.parameter_count()) {
        throw DimensionMismatch("parameter vector has " + std::to_string(params.size()) +
                                " entries, topology needs " + std::to_string(t.parameter_count()));
    }
    std::vector<LayerView> views;
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < t.layers.size(); ++l) {
        const std::size_t in = t.layers[l];
        const std::size_t out = t.layers[l + 1];
        views.push_back({params.subspan(offset, in * out), params.subspan(offset + in * out, out), in, out});
        offset += in * out + out;
    }
    return views;
}

Vector flatten(const Topology& t, std::span<const LayerView> layers) {
    Vector out;
    out.reserve(t.parameter_count());
    for (const auto& l : layers) {
        out.insert(out.end(), l.weights.begin(), l.weights.end());
        out.insert(out.end(), l.biases.begin(), l.biases.end());
    }
    if (out.size() != t.parameter_count()) throw DimensionMismatch("flatten: layer views do not match topology");
    return out;
}

namespace {

/// Per-sample activations; acts[0] is the input, acts[l+1] the output of
/// layer transition l.
struct Workspace {
    std::vector<Vector> acts;
    std::vector<Vector> deltas;

    explicit Workspace(const Topology& t) {
        for (std::size_t s : t.layers) {
            acts.emplace_back(s);
            deltas.emplace_back(s);
        }
    }
};

Activation layer_activation(const Topology& t, std::size_t transition) {
    return transition + 2 == t.layers.size() ? t.output : t.hidden;
}

double run_forward(const Topology& t, std::span<const LayerView> views, std::span<const double> x,
                   Workspace& ws) {
    if (x.size() != t.inputs()) {
        throw DimensionMismatch("sample has " + std::to_string(x.size()) + " features, network expects " +
                                std::to_string(t.inputs()));
    }
    std::copy(x.begin(), x.end(), ws.acts[0].begin());
    for (std::size_t l = 0; l < views.size(); ++l) {
        const auto& v = views[l];
        const Activation act = layer_activation(t, l);
        const Vector& in = ws.acts[l];
        Vector& out = ws.acts[l + 1];
        for (std::size_t j = 0; j < v.fan_out; ++j) {
            const double z = dot(v.weights.subspan(j * v.fan_in, v.fan_in), in) + v.biases[j];
            out[j] = activate(act, z);
        }
    }
    return ws.acts.back()[0];
}

/// Writes ∂y/∂w for the sample last run through run_forward into `row`.
void output_sensitivity(const Topology& t, std::span<const LayerView> views, Workspace& ws,
                        std::span<double> row) {
    const std::size_t last = views.size() - 1;
    ws.deltas[last + 1][0] = activation_slope(t.output, ws.acts[last + 1][0]);

    std::size_t offset = row.size();
    for (std::size_t l = views.size(); l-- > 0;) {
        const auto& v = views[l];
        offset -= v.fan_in * v.fan_out + v.fan_out;
        const Vector& in = ws.acts[l];
        const Vector& delta = ws.deltas[l + 1];
        for (std::size_t j = 0; j < v.fan_out; ++j) {
            double* wrow = row.data() + offset + j * v.fan_in;
            for (std::size_t i = 0; i < v.fan_in; ++i) wrow[i] = delta[j] * in[i];
            row[offset + v.fan_in * v.fan_out + j] = delta[j];
        }
        if (l == 0) break;
        const Activation below = layer_activation(t, l - 1);
        Vector& prev = ws.deltas[l];
        for (std::size_t i = 0; i < v.fan_in; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < v.fan_out; ++j) s += v.weights[j * v.fan_in + i] * delta[j];
            prev[i] = s * activation_slope(below, in[i]);
        }
    }
}

void require_samples(const Topology& t, const Samples& s) {
    if (s.size() == 0) throw std::invalid_argument("empty sample set");
    if (s.features.rows() != s.size()) throw DimensionMismatch("feature rows do not match target count");
    if (s.features.cols() != t.inputs()) {
        throw DimensionMismatch("samples have " + std::to_string(s.features.cols()) +
                                " features, network expects " + std::to_string(t.inputs()));
    }
}

} // namespace

double forward(const Topology& t, std::span<const double> params, std::span<const double> features) {
    const auto views = unflatten(t, params);
    Workspace ws(t);
    return run_forward(t, views, features, ws);
}

Vector predict(const Topology& t, std::span<const double> params, const Matrix& features) {
    const auto views = unflatten(t, params);
    Workspace ws(t);
    Vector out(features.rows());
    for (std::size_t m = 0; m < features.rows(); ++m) out[m] = run_forward(t, views, features.row(m), ws);
    return out;
}

double mse_loss(const Topology& t, std::span<const double> params, const Samples& samples) {
    require_samples(t, samples);
    const auto views = unflatten(t, params);
    Workspace ws(t);
    double sum = 0.0;
    for (std::size_t m = 0; m < samples.size(); ++m) {
        const double e = samples.targets[m] - run_forward(t, views, samples.features.row(m), ws);
        sum += e * e;
    }
    return sum / static_cast<double>(samples.size());
}

namespace {

double loss_and_gradient(const Topology& t, std::span<const double> params, const Samples& samples,
                         Vector& grad) {
    require_samples(t, samples);
    const auto views = unflatten(t, params);
    Workspace ws(t);
    const std::size_t n = t.parameter_count();
    const double inv_m = 1.0 / static_cast<double>(samples.size());
    grad.assign(n, 0.0);
    Vector row(n);
    double sum = 0.0;
    for (std::size_t m = 0; m < samples.size(); ++m) {
        const double e = samples.targets[m] - run_forward(t, views, samples.features.row(m), ws);
        sum += e * e;
        output_sensitivity(t, views, ws, row);
        axpy(-2.0 * inv_m * e, row, grad);
    }
    return sum * inv_m;
}

} // namespace

Vector gradient(const Topology& t, std::span<const double> params, const Samples& samples) {
    Vector g;
    loss_and_gradient(t, params, samples, g);
    return g;
}

Residuals jacobian(const Topology& t, std::span<const double> params, const Samples& samples) {
    require_samples(t, samples);
    const auto views = unflatten(t, params);
    Workspace ws(t);
    Residuals r{Matrix(samples.size(), t.parameter_count()), Vector(samples.size())};
    for (std::size_t m = 0; m < samples.size(); ++m) {
        r.errors[m] = samples.targets[m] - run_forward(t, views, samples.features.row(m), ws);
        output_sensitivity(t, views, ws, r.jacobian.row(m));
    }
    return r;
}

MlpObjective::MlpObjective(Topology topology, const Samples& samples)
    : topology_(std::move(topology)), samples_(samples) {
    topology_.validate();
    require_samples(topology_, samples_);
}

double MlpObjective::compute_value(std::span<const double> w) const { return mse_loss(topology_, w, samples_); }

Vector MlpObjective::compute_gradient(std::span<const double> w) const {
    return cardionn::gradient(topology_, w, samples_);
}

double MlpObjective::compute_value_and_gradient(std::span<const double> w, Vector& grad) const {
    return loss_and_gradient(topology_, w, samples_, grad);
}

Residuals MlpObjective::compute_residuals(std::span<const double> w) const {
    return jacobian(topology_, w, samples_);
}

} // namespace cardionn
