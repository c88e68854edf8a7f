#pragma once

// Full-batch training algorithms: gradient descent (plain and adaptive),
// Rprop, three nonlinear conjugate-gradient variants, scaled conjugate
// gradient, BFGS, one-step secant and Levenberg-Marquardt.
//
// Every algorithm works on an Objective, so the same code trains the network
// and minimizes the analytic test functions in the test suite.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cardionn/mlp.hpp"
#include "cardionn/numeric.hpp"
#include "cardionn/objective.hpp"

namespace cardionn {

enum class OptimizerKind { LM, BFG, RP, SCG, CGB, CGF, CGP, OSS, GDX, GD };

std::string_view to_string(OptimizerKind k);
std::optional<OptimizerKind> parse_kind(std::string_view s);

/// The nine benchmarked algorithms, in table order (plain GD excluded).
std::span<const OptimizerKind> benchmark_kinds();

struct TrainConfig {
    std::size_t max_epochs = 500;
    double goal_mse = 0.02;
    double min_grad_norm = 1e-7;

    // GD / GDX
    double lr0 = 0.01;
    double momentum = 0.9;
    double lr_inc = 1.05;
    double lr_dec = 0.7;
    double max_perf_inc = 1.04;

    // Rprop
    double rp_delta0 = 0.07;
    double rp_delta_min = 1e-6;
    double rp_delta_max = 50.0;
    double rp_eta_plus = 1.2;
    double rp_eta_minus = 0.5;

    // Levenberg-Marquardt
    double lm_mu0 = 1e-3;
    double lm_mu_inc = 10.0;
    double lm_mu_dec = 0.1;
    double lm_mu_max = 1e10;
    std::size_t lm_max_escalations = 10;

    // Scaled conjugate gradient
    double scg_sigma = 5e-5;
    double scg_lambda0 = 5e-7;

    // Conjugate gradient family
    bool pr_clamp = true;
    /// Replace the Wolfe search of the CG kinds, BFGS and OSS with a search
    /// that drives the directional derivative to (numerically) zero.
    bool exact_line_search = false;

    std::uint64_t seed = 1;
    InitScheme init = InitScheme::uniform;

    /// Throws std::invalid_argument on the first violated constraint.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Line search

class NotDescentDirection : public std::invalid_argument {
public:
    NotDescentDirection() : std::invalid_argument("search direction is not a descent direction") {}
};

class LineSearchFailed : public std::runtime_error {
public:
    LineSearchFailed() : std::runtime_error("line search exhausted its trial budget") {}
};

struct LineSearchParams {
    double c1 = 1e-4;
    double c2 = 0.9;
    std::size_t max_trials = 25;
};

/// Curvature constant paired with each line-search kind.
LineSearchParams line_search_params(OptimizerKind k, bool exact);

/// Evaluated point along a ray w + α·p.
struct RayPoint {
    double alpha = 0.0;
    double value = 0.0;
    double slope = 0.0; // ∇f(w + αp)·p
    Vector w;
    Vector grad;
};

struct LineSearchResult {
    RayPoint point;
    std::size_t trials = 0;
    /// False when the budget ran out and the best sufficient-decrease point
    /// was returned instead of a strong-Wolfe point.
    bool wolfe = true;
};

/// Strong-Wolfe search (bracketing followed by cubic-interpolation zoom).
/// Throws NotDescentDirection if g0·p >= 0 and LineSearchFailed if no trial
/// achieves sufficient decrease within the budget.
LineSearchResult line_search(const Objective& f, std::span<const double> w, std::span<const double> p,
                             double f0, std::span<const double> g0, double alpha0,
                             const LineSearchParams& params);

/// Minimizer of the cubic Hermite interpolant through (a, fa, da), (b, fb, db),
/// or nullopt when the interpolant has no real local minimizer.
std::optional<double> cubic_minimizer(double a, double fa, double da, double b, double fb, double db);

// ---------------------------------------------------------------------------
// Steps

/// Current iterate with its objective value and gradient.
struct Point {
    Vector w;
    double value = 0.0;
    Vector grad;
};

Point evaluate(const Objective& f, Vector w);

enum class StepStatus { accepted, rejected, failed };

struct StepOutcome {
    StepStatus status = StepStatus::accepted;
    std::string detail;
};

/// W ← W − lr·g
Vector step_gd(std::span<const double> w, std::span<const double> g, double lr);

struct GdxState {
    bool initialized = false;
    double lr = 0.0;
    Vector velocity;
};
StepOutcome step_gdx(GdxState& s, const Objective& f, Point& pt, const TrainConfig& cfg);

struct RpropState {
    bool initialized = false;
    Vector delta;
    Vector prev_grad;
    Vector prev_step;
};
/// Rprop+ update of `w` from gradient `g`; no evaluations.
void rprop_update(RpropState& s, std::span<double> w, std::span<const double> g, const TrainConfig& cfg);
StepOutcome step_rprop(RpropState& s, const Objective& f, Point& pt, const TrainConfig& cfg);

class ZeroPreviousGradient : public std::invalid_argument {
public:
    ZeroPreviousGradient() : std::invalid_argument("previous gradient is zero") {}
};

/// Fletcher-Reeves: β = gₖᵀgₖ / gₖ₋₁ᵀgₖ₋₁, p = −gₖ + β·pₖ₋₁.
Vector direction_fr(std::span<const double> g, std::span<const double> g_prev, std::span<const double> p_prev);
/// Polak-Ribière: β = (gₖ − gₖ₋₁)ᵀgₖ / gₖ₋₁ᵀgₖ₋₁, optionally clamped at 0.
Vector direction_pr(std::span<const double> g, std::span<const double> g_prev, std::span<const double> p_prev,
                    bool clamp = true);
double beta_fr(std::span<const double> g, std::span<const double> g_prev);
double beta_pr(std::span<const double> g, std::span<const double> g_prev, bool clamp);

/// Powell-Beale restart test |gₖ₋₁ᵀgₖ| ≥ 0.2‖gₖ‖².
bool restart_powell_beale(std::span<const double> g, std::span<const double> g_prev);

struct CgState {
    bool initialized = false;
    Vector prev_grad;
    Vector prev_dir;
    double prev_alpha = 0.0;
    double prev_slope = 0.0;
    std::size_t since_restart = 0;
    std::size_t restarts = 0;
};
/// One CGF, CGP or CGB iteration.
StepOutcome step_cg(CgState& s, OptimizerKind kind, const Objective& f, Point& pt, const TrainConfig& cfg);

struct ScgState {
    bool initialized = false;
    bool success = true;
    std::size_t k = 0;
    double lambda = 0.0;
    double lambda_bar = 0.0;
    double delta = 0.0;
    Vector p;
    Vector r;
    /// Comparison parameter of the last iteration (for inspection).
    double last_comparison = 0.0;
};
StepOutcome step_scg(ScgState& s, const Objective& f, Point& pt, const TrainConfig& cfg);

struct BfgsState {
    bool initialized = false;
    Matrix inv_hessian;
    std::size_t skipped_updates = 0;
};
/// Symmetric rank-two inverse update with s = Δw, y = Δg. Returns false
/// (and leaves H unchanged) when sᵀy ≤ 1e-10·‖s‖‖y‖.
bool bfgs_update(Matrix& inv_hessian, std::span<const double> s, std::span<const double> y);
StepOutcome step_bfgs(BfgsState& s, const Objective& f, Point& pt, const TrainConfig& cfg);

struct OssState {
    bool has_prev = false;
    Vector step;      // previous Δw
    Vector grad_diff; // previous Δg
};
/// p = −g + A·s + B·y, the memoryless BFGS direction. Returns nullopt when
/// |sᵀy| ≤ 1e-12.
std::optional<Vector> oss_direction(std::span<const double> s, std::span<const double> y,
                                    std::span<const double> g);
StepOutcome step_oss(OssState& s, const Objective& f, Point& pt, const TrainConfig& cfg);

class MuOverflow : public std::runtime_error {
public:
    MuOverflow() : std::runtime_error("Levenberg-Marquardt damping exceeded its maximum") {}
};

/// δ solving (JᵀJ + μI)·δ = Jᵀe. With J = ∂y/∂w and e = t − y,
/// w + δ is the damped Gauss-Newton update. Throws NotPositiveDefinite.
Vector lm_increment(const Matrix& jacobian, std::span<const double> errors, double mu);

struct LmState {
    bool initialized = false;
    double mu = 0.0;
    std::size_t escalations = 0;
};
StepOutcome step_lm(LmState& s, const Objective& f, Point& pt, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Training loop

enum class StopReason { goal, max_epochs, min_grad, stagnation };
std::string_view to_string(StopReason r);

struct TrainTrace {
    double initial_mse = 0.0;
    std::vector<double> mse_per_epoch;
    std::vector<double> grad_norm_per_epoch;
    std::size_t function_evals = 0;
    std::size_t gradient_evals = 0;
    std::size_t jacobian_evals = 0;
    std::size_t rejected_steps = 0;
    StopReason stop_reason = StopReason::max_epochs;
    std::string stop_detail;

    std::size_t epochs() const { return mse_per_epoch.size(); }
    double final_mse() const { return mse_per_epoch.empty() ? initial_mse : mse_per_epoch.back(); }
};

struct TrainResult {
    Vector params;
    TrainTrace trace;
};

using OptState = std::variant<std::monostate, GdxState, RpropState, CgState, ScgState, BfgsState, OssState, LmState>;

/// Runs `kind` from `w0` until a stopping rule fires. Stop reasons are
/// checked after every epoch in the order goal, min_grad, stagnation,
/// max_epochs. Never throws for algorithmic failures; those end the run
/// with StopReason::stagnation.
TrainResult train(const Objective& f, Vector w0, OptimizerKind kind, const TrainConfig& cfg);

/// Initializes the network from cfg.seed / cfg.init and trains it.
TrainResult train(const Topology& t, const Samples& samples, OptimizerKind kind, const TrainConfig& cfg);

} // namespace cardionn
