#include "cardionn/eval.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "cardionn/random.hpp"

namespace cardionn {

ConfusionCounts confusion(std::span<const double> scores, std::span<const double> labels, double threshold) {
    if (scores.size() != labels.size()) throw DimensionMismatch("confusion: scores and labels differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] > threshold;
        const bool actual = labels[i] > 0.0;
        if (predicted && actual) ++c.tp;
        else if (predicted) ++c.fp;
        else if (actual) ++c.fn;
        else ++c.tn;
    }
    return c;
}

Metrics metrics(const ConfusionCounts& c) {
    auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    return {ratio(c.tp, c.tp + c.fn), ratio(c.tn, c.tn + c.fp), ratio(c.tp + c.tn, c.total())};
}

double auc(std::span<const double> scores, std::span<const double> labels) {
    if (scores.size() != labels.size()) throw DimensionMismatch("auc: scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of (1-based, tie-averaged) ranks of the positives.
    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] > 0.0) {
                positive_rank_sum += rank;
                ++positives;
            }
        }
        i = j;
    }
    const std::size_t negatives = scores.size() - positives;
    if (positives == 0 || negatives == 0) throw OneClassOnly();
    const double p = static_cast<double>(positives);
    const double u = positive_rank_sum - 0.5 * p * (p + 1.0);
    return u / (p * static_cast<double>(negatives));
}

double default_threshold(Activation output) { return output == Activation::tanh ? 0.0 : 0.5; }

ConvergenceSummary convergence_summary(std::span<const TrainTrace> traces, double threshold) {
    if (traces.empty()) throw std::invalid_argument("convergence_summary: no traces");
    std::size_t len = 0;
    for (const auto& t : traces) len = std::max(len, t.epochs());
    ConvergenceSummary s;
    s.threshold = threshold;
    s.mean_curve.assign(len, 0.0);
    for (const auto& t : traces) {
        for (std::size_t e = 0; e < len; ++e) {
            s.mean_curve[e] += e < t.epochs() ? t.mse_per_epoch[e] : t.final_mse();
        }
    }
    for (double& v : s.mean_curve) v /= static_cast<double>(traces.size());
    for (std::size_t e = 0; e < len; ++e) {
        if (s.mean_curve[e] <= threshold) {
            s.epochs_to_threshold = e + 1;
            break;
        }
    }
    return s;
}

std::uint64_t fold_seed(std::uint64_t run_seed, std::size_t fold) { return derive_seed(run_seed, fold); }

const KindSummary* BenchmarkReport::find(OptimizerKind k) const {
    for (const auto& s : kinds)
        if (s.kind == k) return &s;
    return nullptr;
}

namespace {

PhaseResult assess(const Topology& t, std::span<const double> params, const Samples& s, double threshold) {
    PhaseResult r;
    const Vector scores = predict(t, params, s.features);
    r.counts = confusion(scores, s.targets, threshold);
    r.metrics = metrics(r.counts);
    try {
        r.auc = auc(scores, s.targets);
    } catch (const OneClassOnly&) {
    }
    return r;
}

FoldResult run_cell(const Dataset& data, const FoldPlan& plan, OptimizerKind kind, std::size_t fold,
                    const CvConfig& cfg, double threshold) {
    FoldResult cell;
    cell.kind = kind;
    cell.fold = fold;
    cell.init_seed = fold_seed(cfg.train.seed, fold);
    try {
        const auto train_idx = plan.train_indices(fold);
        const Samples train_set = subset(data.samples, train_idx);
        const Samples test_set = subset(data.samples, plan.test_indices(fold));

        TrainConfig tc = cfg.train;
        tc.seed = cell.init_seed;
        TrainResult result = train(cfg.topology, encode_targets(train_set, cfg.topology.output), kind, tc);

        cell.train = assess(cfg.topology, result.params, train_set, threshold);
        cell.test = assess(cfg.topology, result.params, test_set, threshold);
        cell.trace = std::move(result.trace);
        cell.ok = true;
    } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
    }
    return cell;
}

struct Mean {
    double sum = 0.0;
    std::size_t n = 0;
    void add(const std::optional<double>& v) {
        if (v) {
            sum += *v;
            ++n;
        }
    }
    std::optional<double> value() const {
        if (n == 0) return std::nullopt;
        return sum / static_cast<double>(n);
    }
};

MeanMetrics average(std::span<const FoldResult> cells, bool test) {
    Mean sen, spe, acc, area;
    for (const auto& c : cells) {
        if (!c.ok) continue;
        const PhaseResult& p = test ? c.test : c.train;
        sen.add(p.metrics.sen);
        spe.add(p.metrics.spe);
        acc.add(p.metrics.acc);
        area.add(p.auc);
    }
    return {sen.value(), spe.value(), acc.value(), area.value()};
}

KindSummary summarize(OptimizerKind kind, std::span<const FoldResult> cells, double convergence_threshold) {
    KindSummary s;
    s.kind = kind;
    s.train = average(cells, false);
    s.test = average(cells, true);
    std::vector<TrainTrace> traces;
    Mean goal_epochs, epochs, final_mse;
    for (const auto& c : cells) {
        if (!c.ok) {
            ++s.folds_failed;
            continue;
        }
        ++s.folds_ok;
        traces.push_back(c.trace);
        epochs.add(static_cast<double>(c.trace.epochs()));
        final_mse.add(c.trace.final_mse());
        if (c.trace.stop_reason == StopReason::goal) {
            ++s.goal_reached;
            goal_epochs.add(static_cast<double>(c.trace.epochs()));
        }
    }
    s.mean_epochs_to_goal = goal_epochs.value();
    s.mean_epochs = epochs.value().value_or(0.0);
    s.mean_final_mse = final_mse.value().value_or(0.0);
    if (!traces.empty()) s.convergence = convergence_summary(traces, convergence_threshold);
    return s;
}

} // namespace

BenchmarkReport run_cv(const Dataset& data, const FoldPlan& plan, std::span<const OptimizerKind> kinds,
                       const CvConfig& cfg) {
    if (kinds.empty()) throw std::invalid_argument("run_cv: no algorithms requested");
    if (plan.k() < 2) throw std::invalid_argument("run_cv: fold plan needs at least two folds");
    cfg.topology.validate();
    cfg.train.validate();

    const double threshold = cfg.threshold.value_or(default_threshold(cfg.topology.output));
    const std::size_t k = plan.k();
    const std::size_t total = kinds.size() * k;

    BenchmarkReport report;
    report.meta = {cfg.train.seed, k, data.size(), data.positives(), data.fingerprint(), threshold, cfg};
    report.cells.resize(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            report.cells[i] = run_cell(data, plan, kinds[i / k], i % k, cfg, threshold);
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(cfg.jobs, 1, total);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    for (std::size_t a = 0; a < kinds.size(); ++a) {
        report.kinds.push_back(
            summarize(kinds[a], std::span(report.cells).subspan(a * k, k), cfg.convergence_threshold));
    }
    return report;
}

} // namespace cardionn
