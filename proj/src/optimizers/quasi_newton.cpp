#include <cmath>

#include "cardionn/optimizers.hpp"

namespace cardionn {

bool bfgs_update(Matrix& h, std::span<const double> s, std::span<const double> y) {
    const double sy = dot(s, y);
    if (!(sy > 1e-10 * norm(s) * norm(y))) return false;

    // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ, expanded:
    // H + ((sᵀy + yᵀHy)/(sᵀy)²) s sᵀ − (Hy sᵀ + s (Hy)ᵀ)/sᵀy
    const Vector hy = matvec(h, y);
    const double yhy = dot(y, hy);
    const double a = (sy + yhy) / (sy * sy);
    const double b = 1.0 / sy;
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = h(i, j) + a * s[i] * s[j] - b * (hy[i] * s[j] + s[i] * hy[j]);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return true;
}

StepOutcome step_bfgs(BfgsState& s, const Objective& f, Point& pt, const TrainConfig& cfg) {
    const std::size_t n = pt.w.size();
    if (!s.initialized) {
        s.initialized = true;
        s.inv_hessian = Matrix::identity(n);
    }
    Vector p = scaled(matvec(s.inv_hessian, pt.grad), -1.0);
    if (!(dot(p, pt.grad) < 0.0)) {
        s.inv_hessian = Matrix::identity(n);
        p = scaled(pt.grad, -1.0);
    }

    const auto params = line_search_params(OptimizerKind::BFG, cfg.exact_line_search);
    LineSearchResult ls;
    try {
        ls = line_search(f, pt.w, p, pt.value, pt.grad, 1.0, params);
    } catch (const std::exception&) {
        // Retry once from a fresh approximation before giving up.
        s.inv_hessian = Matrix::identity(n);
        p = scaled(pt.grad, -1.0);
        try {
            ls = line_search(f, pt.w, p, pt.value, pt.grad, 1.0 / norm(p), params);
        } catch (const std::exception& e) {
            return {StepStatus::failed, e.what()};
        }
    }

    const Vector step = subtract(ls.point.w, pt.w);
    const Vector grad_diff = subtract(ls.point.grad, pt.grad);
    if (!bfgs_update(s.inv_hessian, step, grad_diff)) ++s.skipped_updates;
    pt = {std::move(ls.point.w), ls.point.value, std::move(ls.point.grad)};
    return {};
}

std::optional<Vector> oss_direction(std::span<const double> s, std::span<const double> y,
                                    std::span<const double> g) {
    const double sy = dot(s, y);
    if (std::abs(sy) <= 1e-12) return std::nullopt;
    const double sg = dot(s, g);
    const double yg = dot(y, g);
    const double yy = dot(y, y);
    const double coef_s = -(1.0 + yy / sy) * (sg / sy) + yg / sy;
    const double coef_y = sg / sy;
    Vector p = scaled(g, -1.0);
    axpy(coef_s, s, p);
    axpy(coef_y, y, p);
    return p;
}

StepOutcome step_oss(OssState& s, const Objective& f, Point& pt, const TrainConfig& cfg) {
    Vector p;
    if (s.has_prev) {
        if (auto d = oss_direction(s.step, s.grad_diff, pt.grad); d && dot(*d, pt.grad) < 0.0) p = std::move(*d);
    }
    const bool secant = !p.empty();
    if (!secant) p = scaled(pt.grad, -1.0);

    const auto params = line_search_params(OptimizerKind::OSS, cfg.exact_line_search);
    LineSearchResult ls;
    try {
        ls = line_search(f, pt.w, p, pt.value, pt.grad, 1.0, params);
    } catch (const std::exception& e) {
        if (!secant) return {StepStatus::failed, e.what()};
        p = scaled(pt.grad, -1.0);
        try {
            ls = line_search(f, pt.w, p, pt.value, pt.grad, 1.0 / norm(p), params);
        } catch (const std::exception& e2) {
            return {StepStatus::failed, e2.what()};
        }
    }

    s.step = subtract(ls.point.w, pt.w);
    s.grad_diff = subtract(ls.point.grad, pt.grad);
    s.has_prev = true;
    pt = {std::move(ls.point.w), ls.point.value, std::move(ls.point.grad)};
    return {};
}

} // namespace cardionn
