#pragma once

// Command-line front end: ingest, train and benchmark.
//
// Configuration precedence, lowest to highest: built-in defaults, the
// key=value file given with --config, then individual flags (--set k=v,
// --seed, --folds, ...).

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cardionn/mlp.hpp"
#include "cardionn/optimizers.hpp"
#include "cardionn/settings.hpp"

namespace cardionn::app {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataError = 2, kStrictFailure = 3 };

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::string data_path = "data/processed.cleveland.data";
    std::vector<OptimizerKind> algorithms;
    std::size_t folds = 10;
    Topology topology;
    TrainConfig train;
    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};
    // Execution-only knobs; they never change results and are kept out of
    // the embedded config so reports compare byte for byte across them.
    std::size_t jobs = 1;
    bool strict = false;

    RunConfig();
    bool wants(std::string_view format) const;
};

std::vector<OptimizerKind> parse_kind_list(std::string_view list);

/// Applies one key=value setting (run-level or training). Throws UsageError.
void apply_run_setting(RunConfig& c, std::string_view key, std::string_view value);

/// Reads a flat key=value file; blank lines and '#' comments are ignored.
void load_config_file(RunConfig& c, const std::filesystem::path& path);

/// Resolved configuration, in a form load_config_file accepts.
Settings describe(const RunConfig& c);
void write_config(const RunConfig& c, std::ostream& out);

int cmd_ingest(const std::string& path, const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& c, OptimizerKind kind, std::ostream& out, std::ostream& err);
int cmd_benchmark(const RunConfig& c, std::ostream& out, std::ostream& err);

/// Full argument parsing and dispatch; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace cardionn::app
