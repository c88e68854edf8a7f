#pragma once

// Heart-disease table ingestion: UCI processed-Cleveland rows
// (13 attributes + disease stage, "?" marks a missing value), cleaning,
// binary targets, [-1, 1] feature scaling and stratified k-fold plans.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cardionn/mlp.hpp"

namespace cardionn {

inline constexpr std::size_t kAttributeCount = 13;

class MalformedRow : public std::runtime_error {
public:
    MalformedRow(std::size_t line, const std::string& why)
        : std::runtime_error("line " + std::to_string(line) + ": " + why), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyAfterCleaning : public std::runtime_error {
public:
    EmptyAfterCleaning() : std::runtime_error("no records left after cleaning") {}
};

class TooFewSamples : public std::invalid_argument {
public:
    TooFewSamples(std::size_t n, std::size_t k)
        : std::invalid_argument("cannot split " + std::to_string(n) + " samples into " + std::to_string(k) +
                                " folds") {}
};

struct RawRecord {
    std::array<std::optional<double>, kAttributeCount> attributes;
    /// 0 = no disease, 1..4 = disease stage. A value of -1 is accepted for
    /// already-binarized snapshots.
    int stage = 0;
    std::size_t line = 0;

    bool has_missing() const;
};

std::vector<RawRecord> parse_heart_csv(std::string_view text);

enum class MissingPolicy { drop_missing };

std::vector<RawRecord> clean(std::vector<RawRecord> records, MissingPolicy policy = MissingPolicy::drop_missing);

struct FeatureRange {
    double min = 0.0;
    double max = 0.0;

    /// 2(f − min)/(max − min) − 1, or 0 for a constant feature.
    double normalize(double f) const;
};

struct Dataset {
    Samples samples; // targets are −1 / +1
    std::vector<FeatureRange> ranges;

    std::size_t size() const { return samples.size(); }
    std::size_t positives() const;
    std::vector<std::size_t> positive_indices() const;
    /// FNV-1a over the bit patterns of features and targets.
    std::uint64_t fingerprint() const;
};

Dataset binarize_and_normalize(std::span<const RawRecord> records);

/// Normalized rows followed by the ±1 target, one sample per line.
void write_snapshot(const Dataset& d, std::ostream& out);

struct FoldPlan {
    std::vector<std::vector<std::size_t>> folds;
    std::uint64_t seed = 0;

    std::size_t k() const { return folds.size(); }
    std::vector<std::size_t> train_indices(std::size_t fold) const;
    const std::vector<std::size_t>& test_indices(std::size_t fold) const { return folds.at(fold); }
};

/// Each class is shuffled with the seed and dealt round-robin into the
/// folds; negatives continue where positives stopped, so fold sizes and
/// per-fold positive counts each differ by at most one.
FoldPlan kfold_split(std::size_t n, std::size_t k, std::span<const std::size_t> positives, std::uint64_t seed);

/// Targets in the encoding expected by the output activation
/// (±1 for tanh, {0, 1} for logistic).
Samples encode_targets(const Samples& s, Activation output);

} // namespace cardionn
