#include <array>
#include <cmath>

#include "cardionn/optimizers.hpp"

namespace cardionn {

namespace {

constexpr std::array<std::pair<OptimizerKind, std::string_view>, 10> kKindNames{{
    {OptimizerKind::LM, "LM"},
    {OptimizerKind::BFG, "BFG"},
    {OptimizerKind::RP, "RP"},
    {OptimizerKind::SCG, "SCG"},
    {OptimizerKind::CGB, "CGB"},
    {OptimizerKind::CGF, "CGF"},
    {OptimizerKind::CGP, "CGP"},
    {OptimizerKind::OSS, "OSS"},
    {OptimizerKind::GDX, "GDX"},
    {OptimizerKind::GD, "GD"},
}};

constexpr std::array<OptimizerKind, 9> kBenchmarkKinds{
    OptimizerKind::LM,  OptimizerKind::BFG, OptimizerKind::RP,  OptimizerKind::SCG, OptimizerKind::CGB,
    OptimizerKind::CGF, OptimizerKind::CGP, OptimizerKind::OSS, OptimizerKind::GDX,
};

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid training config: ") + what);
}

} // namespace

std::string_view to_string(OptimizerKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "?";
}

std::optional<OptimizerKind> parse_kind(std::string_view s) {
    for (const auto& [kind, name] : kKindNames)
        if (name == s) return kind;
    return std::nullopt;
}

std::span<const OptimizerKind> benchmark_kinds() { return kBenchmarkKinds; }

std::string_view to_string(StopReason r) {
    switch (r) {
    case StopReason::goal: return "goal";
    case StopReason::max_epochs: return "max_epochs";
    case StopReason::min_grad: return "min_grad";
    case StopReason::stagnation: return "stagnation";
    }
    return "?";
}

void TrainConfig::validate() const {
    require(max_epochs >= 1, "max_epochs must be >= 1");
    require(goal_mse > 0.0, "goal_mse must be > 0");
    require(min_grad_norm >= 0.0, "min_grad_norm must be >= 0");
    require(lr0 > 0.0, "lr0 must be > 0");
    require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
    require(lr_inc > 1.0 && lr_dec > 0.0 && lr_dec < 1.0, "need lr_dec < 1 < lr_inc");
    require(max_perf_inc >= 1.0, "max_perf_inc must be >= 1");
    require(rp_delta0 > 0.0 && rp_delta_min > 0.0 && rp_delta_max >= rp_delta_min, "bad Rprop step bounds");
    require(rp_eta_minus > 0.0 && rp_eta_minus < 1.0 && rp_eta_plus > 1.0, "need eta- < 1 < eta+");
    require(lm_mu0 > 0.0 && lm_mu_max >= lm_mu0, "need 0 < mu0 <= mu_max");
    require(lm_mu_dec > 0.0 && lm_mu_dec < 1.0 && lm_mu_inc > 1.0, "need mu_dec < 1 < mu_inc");
    require(scg_sigma > 0.0 && scg_lambda0 > 0.0, "SCG sigma and lambda0 must be > 0");
}

Point evaluate(const Objective& f, Vector w) {
    Point pt;
    pt.value = f.value_and_gradient(w, pt.grad);
    pt.w = std::move(w);
    return pt;
}

namespace {

OptState make_state(OptimizerKind kind) {
    switch (kind) {
    case OptimizerKind::GD: return std::monostate{};
    case OptimizerKind::GDX: return GdxState{};
    case OptimizerKind::RP: return RpropState{};
    case OptimizerKind::CGF:
    case OptimizerKind::CGP:
    case OptimizerKind::CGB: return CgState{};
    case OptimizerKind::SCG: return ScgState{};
    case OptimizerKind::BFG: return BfgsState{};
    case OptimizerKind::OSS: return OssState{};
    case OptimizerKind::LM: return LmState{};
    }
    return std::monostate{};
}

StepOutcome step(OptState& state, OptimizerKind kind, const Objective& f, Point& pt, const TrainConfig& cfg) {
    switch (kind) {
    case OptimizerKind::GD: {
        Vector w = step_gd(pt.w, pt.grad, cfg.lr0);
        pt = evaluate(f, std::move(w));
        return {};
    }
    case OptimizerKind::GDX: return step_gdx(std::get<GdxState>(state), f, pt, cfg);
    case OptimizerKind::RP: return step_rprop(std::get<RpropState>(state), f, pt, cfg);
    case OptimizerKind::CGF:
    case OptimizerKind::CGP:
    case OptimizerKind::CGB: return step_cg(std::get<CgState>(state), kind, f, pt, cfg);
    case OptimizerKind::SCG: return step_scg(std::get<ScgState>(state), f, pt, cfg);
    case OptimizerKind::BFG: return step_bfgs(std::get<BfgsState>(state), f, pt, cfg);
    case OptimizerKind::OSS: return step_oss(std::get<OssState>(state), f, pt, cfg);
    case OptimizerKind::LM: return step_lm(std::get<LmState>(state), f, pt, cfg);
    }
    return {StepStatus::failed, "unknown optimizer"};
}

} // namespace

TrainResult train(const Objective& f, Vector w0, OptimizerKind kind, const TrainConfig& cfg) {
    cfg.validate();
    if (w0.size() != f.dimension()) throw DimensionMismatch("initial parameters do not match objective");
    if (kind == OptimizerKind::LM && !f.has_residuals()) {
        throw std::invalid_argument("Levenberg-Marquardt needs a least-squares objective");
    }

    const EvalCounts before = f.counts();
    TrainTrace trace;
    Point pt = evaluate(f, std::move(w0));
    trace.initial_mse = pt.value;
    OptState state = make_state(kind);

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        StepOutcome outcome;
        try {
            outcome = step(state, kind, f, pt, cfg);
        } catch (const std::exception& e) {
            outcome = {StepStatus::failed, e.what()};
        }
        if (outcome.status == StepStatus::rejected) ++trace.rejected_steps;

        const double gnorm = norm(pt.grad);
        trace.mse_per_epoch.push_back(pt.value);
        trace.grad_norm_per_epoch.push_back(gnorm);

        const bool diverged = !std::isfinite(pt.value) || !std::isfinite(gnorm);
        if (std::isfinite(pt.value) && pt.value <= cfg.goal_mse) {
            trace.stop_reason = StopReason::goal;
        } else if (!diverged && gnorm < cfg.min_grad_norm) {
            trace.stop_reason = StopReason::min_grad;
        } else if (outcome.status == StepStatus::failed || diverged) {
            trace.stop_reason = StopReason::stagnation;
            trace.stop_detail = diverged ? "non-finite objective" : outcome.detail;
        } else if (epoch == cfg.max_epochs) {
            trace.stop_reason = StopReason::max_epochs;
        } else {
            continue;
        }
        break;
    }

    const EvalCounts& after = f.counts();
    trace.function_evals = after.values - before.values;
    trace.gradient_evals = after.gradients - before.gradients;
    trace.jacobian_evals = after.jacobians - before.jacobians;
    return {std::move(pt.w), std::move(trace)};
}

TrainResult train(const Topology& t, const Samples& samples, OptimizerKind kind, const TrainConfig& cfg) {
    MlpObjective objective(t, samples);
    return train(objective, init_params(t, cfg.seed, cfg.init), kind, cfg);
}

} // namespace cardionn
