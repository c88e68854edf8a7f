#include <algorithm>
#include <cmath>
#include <limits>

#include "cardionn/optimizers.hpp"

namespace cardionn {

Vector lm_increment(const Matrix& jacobian, std::span<const double> errors, double mu) {
    Matrix a = gram(jacobian);
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += mu;
    return solve_spd(a, matvec_transposed(jacobian, errors));
}

StepOutcome step_lm(LmState& s, const Objective& f, Point& pt, const TrainConfig& cfg) {
    if (!s.initialized) {
        s.initialized = true;
        s.mu = cfg.lm_mu0;
    }
    const Residuals res = f.residuals(pt.w);
    const Matrix normal = gram(res.jacobian);
    const Vector rhs = matvec_transposed(res.jacobian, res.errors);
    Matrix damped = normal;

    for (std::size_t attempt = 0; attempt <= cfg.lm_max_escalations; ++attempt) {
        if (s.mu > cfg.lm_mu_max) return {StepStatus::failed, MuOverflow().what()};
        for (std::size_t i = 0; i < damped.rows(); ++i) damped(i, i) = normal(i, i) + s.mu;

        Vector delta;
        try {
            delta = solve_spd(damped, rhs);
        } catch (const NotPositiveDefinite&) {
            s.mu *= cfg.lm_mu_inc;
            ++s.escalations;
            continue;
        }
        Vector w = add(pt.w, delta);
        const double value = all_finite(w) ? f.value(w) : std::numeric_limits<double>::infinity();
        if (value < pt.value) {
            s.mu = std::max(s.mu * cfg.lm_mu_dec, std::numeric_limits<double>::min());
            Vector g;
            f.value_and_gradient(w, g);
            pt = {std::move(w), value, std::move(g)};
            return {};
        }
        s.mu *= cfg.lm_mu_inc;
        ++s.escalations;
    }
    if (s.mu > cfg.lm_mu_max) return {StepStatus::failed, MuOverflow().what()};
    return {StepStatus::rejected, "no reduction within the escalation budget"};
}

} // namespace cardionn
