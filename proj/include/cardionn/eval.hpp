#pragma once

// Classification metrics, ROC area, cross-validated benchmarking and
// convergence aggregation.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardionn/data.hpp"
#include "cardionn/mlp.hpp"
#include "cardionn/optimizers.hpp"

namespace cardionn {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

/// score > threshold predicts the positive class; labels are ±1.
ConfusionCounts confusion(std::span<const double> scores, std::span<const double> labels, double threshold);

/// Ratios with a zero denominator are absent rather than 0/0.
struct Metrics {
    std::optional<double> sen;
    std::optional<double> spe;
    std::optional<double> acc;
};

Metrics metrics(const ConfusionCounts& c);

class OneClassOnly : public std::invalid_argument {
public:
    OneClassOnly() : std::invalid_argument("ROC area needs at least one positive and one negative label") {}
};

/// Mann-Whitney estimate of P(score⁺ > score⁻), ties counted as ½.
double auc(std::span<const double> scores, std::span<const double> labels);

/// Decision threshold that matches the output activation's midpoint.
double default_threshold(Activation output);

struct ConvergenceSummary {
    /// Mean objective per epoch; shorter traces are padded by their last value.
    std::vector<double> mean_curve;
    double threshold = 0.1;
    /// First epoch (1-based) at which the mean curve is at or below threshold.
    std::optional<std::size_t> epochs_to_threshold;
};

ConvergenceSummary convergence_summary(std::span<const TrainTrace> traces, double threshold = 0.1);

struct CvConfig {
    Topology topology;
    TrainConfig train;
    std::optional<double> threshold; // defaults to default_threshold(topology.output)
    double convergence_threshold = 0.1;
    std::size_t jobs = 1;
};

struct PhaseResult {
    ConfusionCounts counts;
    Metrics metrics;
    std::optional<double> auc;
};

struct FoldResult {
    OptimizerKind kind = OptimizerKind::LM;
    std::size_t fold = 0;
    std::uint64_t init_seed = 0;
    bool ok = false;
    std::string error;
    PhaseResult train;
    PhaseResult test;
    TrainTrace trace;
};

/// Fold-averaged (macro) metric; folds where the metric is absent are
/// skipped, and the whole value is absent if every fold lacks it.
struct MeanMetrics {
    std::optional<double> sen;
    std::optional<double> spe;
    std::optional<double> acc;
    std::optional<double> auc;
};

struct KindSummary {
    OptimizerKind kind = OptimizerKind::LM;
    MeanMetrics train;
    MeanMetrics test;
    std::size_t folds_ok = 0;
    std::size_t folds_failed = 0;
    std::size_t goal_reached = 0;
    std::optional<double> mean_epochs_to_goal;
    double mean_epochs = 0.0;
    double mean_final_mse = 0.0;
    ConvergenceSummary convergence;
};

struct ReportMetadata {
    std::uint64_t seed = 0;
    std::size_t folds = 0;
    std::size_t samples = 0;
    std::size_t positives = 0;
    std::uint64_t dataset_fingerprint = 0;
    double threshold = 0.0;
    CvConfig config;
};

struct BenchmarkReport {
    ReportMetadata meta;
    std::vector<KindSummary> kinds;
    /// Kind-major, fold-minor.
    std::vector<FoldResult> cells;

    const KindSummary* find(OptimizerKind k) const;
};

/// Trains every (kind, fold) cell from a fold-seeded initialization and
/// evaluates on both the training folds and the held-out fold. Cells run on
/// up to cfg.jobs threads; the result does not depend on the job count.
/// A cell that throws is recorded with ok == false.
BenchmarkReport run_cv(const Dataset& data, const FoldPlan& plan, std::span<const OptimizerKind> kinds,
                       const CvConfig& cfg);

/// Seed used to initialize the network for one fold.
std::uint64_t fold_seed(std::uint64_t run_seed, std::size_t fold);

// ---------------------------------------------------------------------------
// Export

/// algorithm, SEN/SPE/ACC train, SEN/SPE/ACC test, AROC train/test.
void write_report_csv(const BenchmarkReport& r, std::ostream& out);
/// Machine-readable document with metadata, summaries and per-fold results.
void write_report_json(const BenchmarkReport& r, std::ostream& out);
/// kind, epoch, mean_mse
void write_convergence_csv(const BenchmarkReport& r, std::ostream& out);
/// epoch, mse, grad_norm
void write_trace_csv(const TrainTrace& t, std::ostream& out);

} // namespace cardionn
