#include <algorithm>
#include <cmath>

#include "cardionn/optimizers.hpp"

namespace cardionn {

LineSearchParams line_search_params(OptimizerKind k, bool exact) {
    LineSearchParams p;
    if (exact) {
        p.c2 = 1e-9;
        return p;
    }
    switch (k) {
    case OptimizerKind::CGF:
    case OptimizerKind::CGP:
    case OptimizerKind::CGB: p.c2 = 0.1; break;
    default: p.c2 = 0.9; break;
    }
    return p;
}

std::optional<double> cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
    if (a == b) return std::nullopt;
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (!(disc >= 0.0)) return std::nullopt;
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom == 0.0) return std::nullopt;
    const double x = b - (b - a) * (db + d2 - d1) / denom;
    if (!std::isfinite(x)) return std::nullopt;
    return x;
}

LineSearchResult line_search(const Objective& f, std::span<const double> w, std::span<const double> p,
                             double f0, std::span<const double> g0, double alpha0,
                             const LineSearchParams& params) {
    const double d0 = dot(g0, p);
    if (!(d0 < 0.0)) throw NotDescentDirection();

    std::size_t trials = 0;
    auto eval = [&](double alpha) {
        RayPoint r;
        r.alpha = alpha;
        r.w.assign(w.begin(), w.end());
        axpy(alpha, p, r.w);
        r.value = f.value_and_gradient(r.w, r.grad);
        r.slope = dot(r.grad, p);
        ++trials;
        return r;
    };
    auto sufficient = [&](const RayPoint& r) {
        return std::isfinite(r.value) && r.value <= f0 + params.c1 * r.alpha * d0;
    };
    auto curvature = [&](const RayPoint& r) { return std::abs(r.slope) <= -params.c2 * d0; };

    std::optional<RayPoint> best;
    auto remember = [&](const RayPoint& r) {
        if (sufficient(r) && (!best || r.value < best->value)) best = r;
    };
    auto give_up = [&]() -> LineSearchResult {
        if (!best) throw LineSearchFailed();
        return {*best, trials, false};
    };

    RayPoint prev;
    prev.alpha = 0.0;
    prev.value = f0;
    prev.slope = d0;

    // Bracketing phase.
    RayPoint lo, hi;
    double alpha = alpha0;
    for (;;) {
        if (trials >= params.max_trials) return give_up();
        RayPoint cur = eval(alpha);
        remember(cur);
        if (!sufficient(cur) || (prev.alpha > 0.0 && cur.value >= prev.value)) {
            lo = std::move(prev);
            hi = std::move(cur);
            break;
        }
        if (curvature(cur)) return {std::move(cur), trials, true};
        if (cur.slope >= 0.0) {
            lo = std::move(cur);
            hi = std::move(prev);
            break;
        }
        const auto guess = cubic_minimizer(prev.alpha, prev.value, prev.slope, cur.alpha, cur.value, cur.slope);
        double next = 2.0 * alpha;
        if (guess && *guess > alpha) next = std::clamp(*guess, 1.1 * alpha, 4.0 * alpha);
        prev = std::move(cur);
        alpha = next;
    }

    // Zoom phase: lo always satisfies sufficient decrease and has the lowest
    // value seen in the bracket.
    for (;;) {
        if (trials >= params.max_trials) return give_up();
        const double a = std::min(lo.alpha, hi.alpha);
        const double b = std::max(lo.alpha, hi.alpha);
        const double width = b - a;
        if (width <= 1e-16 * std::max(1.0, b)) return give_up();

        double trial = 0.5 * (a + b);
        if (std::isfinite(hi.value)) {
            const auto guess = cubic_minimizer(lo.alpha, lo.value, lo.slope, hi.alpha, hi.value, hi.slope);
            if (guess && *guess > a && *guess < b) trial = std::clamp(*guess, a + 0.1 * width, b - 0.1 * width);
        }

        RayPoint cur = eval(trial);
        remember(cur);
        if (!sufficient(cur) || cur.value >= lo.value) {
            hi = std::move(cur);
            continue;
        }
        if (curvature(cur)) return {std::move(cur), trials, true};
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
    }
}

} // namespace cardionn
