#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

#include "cardionn/numeric.hpp"

namespace cardionn {

struct EvalCounts {
    std::size_t values = 0;
    std::size_t gradients = 0;
    std::size_t jacobians = 0;

    bool operator==(const EvalCounts&) const = default;
};

/// Residual form of a least-squares objective E(w) = (1/M)·Σ eₘ², with
/// e = t − y and J = ∂y/∂w (Jacobian of the model outputs, M×N).
/// With this convention ∇E = −(2/M)·Jᵀe.
struct Residuals {
    Matrix jacobian;
    Vector errors;
};

/// A smooth objective over a flat parameter vector.
///
/// The public entry points count every evaluation; optimizers are judged on
/// those counts, so implementations override only the protected hooks.
class Objective {
public:
    virtual ~Objective() = default;

    virtual std::size_t dimension() const = 0;

    double value(std::span<const double> w) const {
        ++counts_.values;
        return compute_value(w);
    }

    Vector gradient(std::span<const double> w) const {
        ++counts_.gradients;
        return compute_gradient(w);
    }

    /// Counts as one value and one gradient evaluation.
    double value_and_gradient(std::span<const double> w, Vector& grad) const {
        ++counts_.values;
        ++counts_.gradients;
        return compute_value_and_gradient(w, grad);
    }

    virtual bool has_residuals() const { return false; }

    Residuals residuals(std::span<const double> w) const {
        if (!has_residuals()) throw std::logic_error("objective has no residual form");
        ++counts_.jacobians;
        return compute_residuals(w);
    }

    const EvalCounts& counts() const noexcept { return counts_; }
    void reset_counts() const noexcept { counts_ = {}; }

protected:
    virtual double compute_value(std::span<const double> w) const = 0;
    virtual Vector compute_gradient(std::span<const double> w) const = 0;
    virtual double compute_value_and_gradient(std::span<const double> w, Vector& grad) const {
        grad = compute_gradient(w);
        return compute_value(w);
    }
    virtual Residuals compute_residuals(std::span<const double>) const {
        throw std::logic_error("objective has no residual form");
    }

private:
    mutable EvalCounts counts_;
};

} // namespace cardionn
