#include <algorithm>
#include <cmath>

#include "cardionn/optimizers.hpp"

namespace cardionn {

double beta_fr(std::span<const double> g, std::span<const double> g_prev) {
    const double den = dot(g_prev, g_prev);
    if (den == 0.0) throw ZeroPreviousGradient();
    return dot(g, g) / den;
}

double beta_pr(std::span<const double> g, std::span<const double> g_prev, bool clamp) {
    const double den = dot(g_prev, g_prev);
    if (den == 0.0) throw ZeroPreviousGradient();
    const double beta = dot(subtract(g, g_prev), g) / den;
    return clamp ? std::max(beta, 0.0) : beta;
}

namespace {

Vector combine(std::span<const double> g, double beta, std::span<const double> p_prev) {
    Vector p = scaled(g, -1.0);
    axpy(beta, p_prev, p);
    return p;
}

} // namespace

Vector direction_fr(std::span<const double> g, std::span<const double> g_prev, std::span<const double> p_prev) {
    if (g_prev.empty()) return scaled(g, -1.0);
    return combine(g, beta_fr(g, g_prev), p_prev);
}

Vector direction_pr(std::span<const double> g, std::span<const double> g_prev, std::span<const double> p_prev,
                    bool clamp) {
    if (g_prev.empty()) return scaled(g, -1.0);
    return combine(g, beta_pr(g, g_prev, clamp), p_prev);
}

bool restart_powell_beale(std::span<const double> g, std::span<const double> g_prev) {
    return std::abs(dot(g_prev, g)) >= 0.2 * dot(g, g);
}

StepOutcome step_cg(CgState& s, OptimizerKind kind, const Objective& f, Point& pt, const TrainConfig& cfg) {
    const std::size_t n = pt.w.size();
    const Vector& g = pt.grad;

    Vector p;
    bool restart = !s.initialized || s.since_restart >= n;
    if (!restart && kind == OptimizerKind::CGB && restart_powell_beale(g, s.prev_grad)) restart = true;
    if (!restart) {
        try {
            p = kind == OptimizerKind::CGF ? direction_fr(g, s.prev_grad, s.prev_dir)
                                           : direction_pr(g, s.prev_grad, s.prev_dir, cfg.pr_clamp);
        } catch (const ZeroPreviousGradient&) {
            restart = true;
        }
        if (!restart && !(dot(g, p) < 0.0)) restart = true;
    }
    if (restart) {
        p = scaled(g, -1.0);
        s.since_restart = 0;
        ++s.restarts;
    }

    const double slope = dot(g, p);
    double alpha0 = 1.0 / norm(p);
    if (s.initialized && s.prev_alpha > 0.0) {
        const double guess = s.prev_alpha * s.prev_slope / slope;
        if (std::isfinite(guess) && guess > 0.0) alpha0 = guess;
    }

    const auto params = line_search_params(kind, cfg.exact_line_search);
    LineSearchResult ls;
    try {
        ls = line_search(f, pt.w, p, pt.value, g, alpha0, params);
    } catch (const std::exception& e) {
        if (restart) return {StepStatus::failed, e.what()};
        p = scaled(g, -1.0);
        s.since_restart = 0;
        ++s.restarts;
        try {
            ls = line_search(f, pt.w, p, pt.value, g, 1.0 / norm(p), params);
        } catch (const std::exception& e2) {
            return {StepStatus::failed, e2.what()};
        }
    }

    s.initialized = true;
    s.prev_grad = g;
    s.prev_slope = dot(g, p);
    s.prev_dir = std::move(p);
    s.prev_alpha = ls.point.alpha;
    ++s.since_restart;
    pt = {std::move(ls.point.w), ls.point.value, std::move(ls.point.grad)};
    return {};
}

StepOutcome step_scg(ScgState& s, const Objective& f, Point& pt, const TrainConfig& cfg) {
    const std::size_t n = pt.w.size();
    if (!s.initialized) {
        s.initialized = true;
        s.success = true;
        s.k = 1;
        s.lambda = cfg.scg_lambda0;
        s.lambda_bar = 0.0;
        s.r = scaled(pt.grad, -1.0);
        s.p = s.r;
    }

    const double p2 = dot(s.p, s.p);
    if (!(p2 > 0.0)) return {StepStatus::failed, "zero search direction"};
    const double pnorm = std::sqrt(p2);

    // Curvature along p from a finite difference of gradients.
    if (s.success) {
        const double sigma = cfg.scg_sigma / pnorm;
        Vector probe = pt.w;
        axpy(sigma, s.p, probe);
        const Vector g_probe = f.gradient(probe);
        Vector hp = subtract(g_probe, pt.grad);
        for (double& v : hp) v /= sigma;
        s.delta = dot(s.p, hp);
    }

    s.delta += (s.lambda - s.lambda_bar) * p2;
    if (s.delta <= 0.0) {
        s.lambda_bar = 2.0 * (s.lambda - s.delta / p2);
        s.delta = -s.delta + s.lambda * p2;
        s.lambda = s.lambda_bar;
    }

    const double mu = dot(s.p, s.r);
    const double alpha = mu / s.delta;
    Vector w_new = pt.w;
    axpy(alpha, s.p, w_new);
    const double value_new = f.value(w_new);
    const double comparison =
        std::isfinite(value_new) ? 2.0 * s.delta * (pt.value - value_new) / (mu * mu) : -1.0;
    s.last_comparison = comparison;

    StepOutcome outcome;
    if (comparison >= 0.0) {
        Vector g_new = f.gradient(w_new);
        Vector r_new = scaled(g_new, -1.0);
        s.lambda_bar = 0.0;
        s.success = true;
        if (s.k % n == 0) {
            s.p = r_new;
        } else {
            const double beta = (dot(r_new, r_new) - dot(r_new, s.r)) / mu;
            Vector p_new = r_new;
            axpy(beta, s.p, p_new);
            s.p = std::move(p_new);
        }
        s.r = std::move(r_new);
        if (comparison >= 0.75) s.lambda *= 0.5;
        pt = {std::move(w_new), value_new, std::move(g_new)};
    } else {
        s.lambda_bar = s.lambda;
        s.success = false;
        outcome = {StepStatus::rejected, "no error reduction at trial step"};
    }
    if (comparison < 0.25) s.lambda += s.delta * (1.0 - comparison) / p2;
    ++s.k;

    if (!std::isfinite(s.lambda) || s.lambda > 1e300) return {StepStatus::failed, "scale parameter overflow"};
    return outcome;
}

} // namespace cardionn
