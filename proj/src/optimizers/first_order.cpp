#include <algorithm>
#include <cmath>

#include "cardionn/optimizers.hpp"

namespace cardionn {

Vector step_gd(std::span<const double> w, std::span<const double> g, double lr) {
    Vector out(w.begin(), w.end());
    axpy(-lr, g, out);
    return out;
}

StepOutcome step_gdx(GdxState& s, const Objective& f, Point& pt, const TrainConfig& cfg) {
    if (!s.initialized) {
        s.initialized = true;
        s.lr = cfg.lr0;
        s.velocity.assign(pt.w.size(), 0.0);
    }
    Vector dw(pt.w.size());
    for (std::size_t i = 0; i < dw.size(); ++i) {
        dw[i] = cfg.momentum * s.velocity[i] - (1.0 - cfg.momentum) * s.lr * pt.grad[i];
    }
    Vector w = add(pt.w, dw);
    Vector g;
    const double value = f.value_and_gradient(w, g);

    if (!std::isfinite(value) || value > cfg.max_perf_inc * pt.value) {
        s.lr *= cfg.lr_dec;
        std::fill(s.velocity.begin(), s.velocity.end(), 0.0);
        return {StepStatus::rejected, "error ratio above max_perf_inc"};
    }
    if (value < pt.value) s.lr *= cfg.lr_inc;
    s.velocity = std::move(dw);
    pt = {std::move(w), value, std::move(g)};
    return {};
}

void rprop_update(RpropState& s, std::span<double> w, std::span<const double> g, const TrainConfig& cfg) {
    if (!s.initialized) {
        s.initialized = true;
        s.delta.assign(w.size(), cfg.rp_delta0);
        s.prev_grad.assign(w.size(), 0.0);
        s.prev_step.assign(w.size(), 0.0);
    }
    auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double agreement = s.prev_grad[i] * g[i];
        if (agreement > 0.0) {
            s.delta[i] = std::min(s.delta[i] * cfg.rp_eta_plus, cfg.rp_delta_max);
            s.prev_step[i] = -sign(g[i]) * s.delta[i];
            w[i] += s.prev_step[i];
            s.prev_grad[i] = g[i];
        } else if (agreement < 0.0) {
            // Overshot a minimum along this weight: shrink and take the last
            // move back. The zeroed gradient makes the next visit neutral.
            s.delta[i] = std::max(s.delta[i] * cfg.rp_eta_minus, cfg.rp_delta_min);
            w[i] -= s.prev_step[i];
            s.prev_step[i] = 0.0;
            s.prev_grad[i] = 0.0;
        } else {
            s.prev_step[i] = -sign(g[i]) * s.delta[i];
            w[i] += s.prev_step[i];
            s.prev_grad[i] = g[i];
        }
    }
}

StepOutcome step_rprop(RpropState& s, const Objective& f, Point& pt, const TrainConfig& cfg) {
    Vector w = pt.w;
    rprop_update(s, w, pt.grad, cfg);
    Vector g;
    const double value = f.value_and_gradient(w, g);
    pt = {std::move(w), value, std::move(g)};
    return {};
}

} // namespace cardionn
