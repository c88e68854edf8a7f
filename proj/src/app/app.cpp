#include "cardionn/app.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cardionn/data.hpp"
#include "cardionn/eval.hpp"

namespace cardionn::app {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto cut = s.find(sep);
        const auto token = trim(s.substr(0, cut));
        if (!token.empty()) out.push_back(token);
        if (cut == std::string_view::npos) break;
        s.remove_prefix(cut + 1);
    }
    return out;
}

std::string join_kinds(const std::vector<OptimizerKind>& kinds) {
    std::string s;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (i) s += ',';
        s += to_string(kinds[i]);
    }
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

struct LoadedData {
    std::size_t raw_rows = 0;
    Dataset dataset;
};

LoadedData load_dataset(const std::string& path) {
    auto records = parse_heart_csv(read_file(path));
    LoadedData d;
    d.raw_rows = records.size();
    d.dataset = binarize_and_normalize(clean(std::move(records)));
    return d;
}

std::string opt_text(const std::optional<double>& v) {
    if (!v) return "   -  ";
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(4) << *v;
    return ss.str();
}

} // namespace

RunConfig::RunConfig() : algorithms(benchmark_kinds().begin(), benchmark_kinds().end()) {}

bool RunConfig::wants(std::string_view format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

std::vector<OptimizerKind> parse_kind_list(std::string_view list) {
    std::vector<OptimizerKind> kinds;
    if (trim(list).empty()) throw UsageError("empty algorithm list");
    while (true) {
        const auto cut = list.find(',');
        const auto token = trim(list.substr(0, cut));
        if (token.empty()) throw UsageError("empty entry in algorithm list");
        if (cut != std::string_view::npos) list.remove_prefix(cut + 1);
        const auto k = parse_kind(token);
        if (!k) throw UsageError("unknown algorithm '" + std::string(token) + "'");
        if (std::find(kinds.begin(), kinds.end(), *k) == kinds.end()) kinds.push_back(*k);
        if (cut == std::string_view::npos) break;
    }
    return kinds;
}

void apply_run_setting(RunConfig& c, std::string_view key, std::string_view value) {
    try {
        if (key == "data") {
            c.data_path = std::string(value);
        } else if (key == "algorithms") {
            c.algorithms = parse_kind_list(value);
        } else if (key == "folds") {
            const auto n = std::stoul(std::string(value));
            if (n < 2) throw UsageError("folds must be >= 2");
            c.folds = n;
        } else if (key == "out") {
            c.out_dir = std::string(value);
        } else if (key == "formats") {
            c.formats.clear();
            for (auto f : split(value, ',')) {
                if (f != "csv" && f != "json") throw UsageError("unknown output format '" + std::string(f) + "'");
                c.formats.emplace_back(f);
            }
        } else if (!apply_setting(c.topology, c.train, key, value)) {
            throw UsageError("unknown setting '" + std::string(key) + "'");
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError("setting '" + std::string(key) + "': " + e.what());
    }
}

void load_config_file(RunConfig& c, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v = trim(line);
        if (v.empty() || v.front() == '#') continue;
        const auto eq = v.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        }
        apply_run_setting(c, trim(v.substr(0, eq)), trim(v.substr(eq + 1)));
    }
}

Settings describe(const RunConfig& c) {
    Settings s{
        {"data", c.data_path},
        {"algorithms", join_kinds(c.algorithms)},
        {"folds", std::to_string(c.folds)},
    };
    for (auto& kv : cardionn::describe(c.topology, c.train)) s.push_back(std::move(kv));
    return s;
}

void write_config(const RunConfig& c, std::ostream& out) {
    for (const auto& [k, v] : describe(c)) out << k << " = " << v << '\n';
}

int cmd_ingest(const std::string& path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    LoadedData d;
    try {
        d = load_dataset(path);
    } catch (const std::exception& e) {
        err << "ingest: " << e.what() << '\n';
        return kDataError;
    }
    const Dataset& ds = d.dataset;
    out << d.raw_rows << " raw, " << ds.size() << " clean\n";
    out << "class balance: " << ds.positives() << " positive, " << ds.size() - ds.positives() << " negative\n";
    out << "feature ranges:\n";
    for (std::size_t j = 0; j < ds.ranges.size(); ++j) {
        out << "  f" << (j + 1) << ": [" << format_number(ds.ranges[j].min) << ", "
            << format_number(ds.ranges[j].max) << "]\n";
    }
    try {
        fs::create_directories(out_dir);
        auto file = open_output(out_dir / "snapshot.csv");
        write_snapshot(ds, file);
    } catch (const std::exception& e) {
        err << "ingest: " << e.what() << '\n';
        return kDataError;
    }
    out << "snapshot: " << (out_dir / "snapshot.csv").string() << '\n';
    return kSuccess;
}

int cmd_train(const RunConfig& c, OptimizerKind kind, std::ostream& out, std::ostream& err) {
    LoadedData d;
    try {
        d = load_dataset(c.data_path);
    } catch (const std::exception& e) {
        err << "train: " << e.what() << '\n';
        return kDataError;
    }

    TrainResult result;
    try {
        result = train(c.topology, encode_targets(d.dataset.samples, c.topology.output), kind, c.train);
    } catch (const std::invalid_argument& e) {
        err << "train: " << e.what() << '\n';
        return kUsage;
    }

    const fs::path dir = c.out_dir;
    const std::string name(to_string(kind));
    try {
        fs::create_directories(dir);
        {
            auto f = open_output(dir / ("trace_" + name + ".csv"));
            write_trace_csv(result.trace, f);
        }
        {
            nlohmann::ordered_json model;
            nlohmann::ordered_json config = nlohmann::ordered_json::object();
            for (const auto& [k, v] : describe(c)) config[k] = v;
            model["algorithm"] = name;
            model["config"] = std::move(config);
            model["epochs"] = result.trace.epochs();
            model["final_mse"] = result.trace.final_mse();
            model["stop_reason"] = std::string(to_string(result.trace.stop_reason));
            model["parameters"] = result.params;
            auto f = open_output(dir / ("model_" + name + ".json"));
            f << model.dump(2) << '\n';
        }
        {
            auto f = open_output(dir / "config.txt");
            write_config(c, f);
        }
    } catch (const std::exception& e) {
        err << "train: " << e.what() << '\n';
        return kDataError;
    }

    const double threshold = default_threshold(c.topology.output);
    const Vector scores = predict(c.topology, result.params, d.dataset.samples.features);
    const Metrics m = metrics(confusion(scores, d.dataset.samples.targets, threshold));
    out << name << ": " << result.trace.epochs() << " epochs, final mse " << format_number(result.trace.final_mse())
        << ", stop " << to_string(result.trace.stop_reason) << ", train acc " << opt_text(m.acc) << '\n';

    if (c.strict && result.trace.stop_reason == StopReason::stagnation) {
        err << "train: stopped by stagnation (" << result.trace.stop_detail << ")\n";
        return kStrictFailure;
    }
    return kSuccess;
}

int cmd_benchmark(const RunConfig& c, std::ostream& out, std::ostream& err) {
    LoadedData d;
    try {
        d = load_dataset(c.data_path);
    } catch (const std::exception& e) {
        err << "benchmark: " << e.what() << '\n';
        return kDataError;
    }

    FoldPlan plan;
    try {
        plan = kfold_split(d.dataset.size(), c.folds, d.dataset.positive_indices(), c.train.seed);
    } catch (const std::exception& e) {
        err << "benchmark: " << e.what() << '\n';
        return kDataError;
    }

    CvConfig cv;
    cv.topology = c.topology;
    cv.train = c.train;
    cv.jobs = c.jobs;
    BenchmarkReport report;
    try {
        report = run_cv(d.dataset, plan, c.algorithms, cv);
    } catch (const std::invalid_argument& e) {
        err << "benchmark: " << e.what() << '\n';
        return kUsage;
    }

    const fs::path dir = c.out_dir;
    try {
        fs::create_directories(dir);
        if (c.wants("csv")) {
            auto f = open_output(dir / "report.csv");
            write_report_csv(report, f);
        }
        if (c.wants("json")) {
            auto f = open_output(dir / "report.json");
            write_report_json(report, f);
        }
        {
            auto f = open_output(dir / "convergence.csv");
            write_convergence_csv(report, f);
        }
        {
            auto f = open_output(dir / "config.txt");
            write_config(c, f);
        }
        for (const auto& cell : report.cells) {
            if (!cell.ok) continue;
            auto f = open_output(dir / ("trace_" + std::string(to_string(cell.kind)) + "_" +
                                        std::to_string(cell.fold) + ".csv"));
            write_trace_csv(cell.trace, f);
        }
    } catch (const std::exception& e) {
        err << "benchmark: " << e.what() << '\n';
        return kDataError;
    }

    std::vector<const KindSummary*> ranked;
    for (const auto& k : report.kinds) ranked.push_back(&k);
    std::stable_sort(ranked.begin(), ranked.end(), [](const KindSummary* a, const KindSummary* b) {
        return a->test.acc.value_or(-1.0) > b->test.acc.value_or(-1.0);
    });
    out << report.cells.size() << " training runs (" << report.kinds.size() << " algorithms x " << plan.k()
        << " folds)\n";
    out << "rank  algo   train SEN  SPE     ACC     AROC  |  test SEN   SPE     ACC     AROC   epochs\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& k = *ranked[i];
        out << std::setw(4) << (i + 1) << "  " << std::left << std::setw(5) << to_string(k.kind) << std::right
            << "  " << opt_text(k.train.sen) << "  " << opt_text(k.train.spe) << "  " << opt_text(k.train.acc)
            << "  " << opt_text(k.train.auc) << "  |  " << opt_text(k.test.sen) << "  " << opt_text(k.test.spe)
            << "  " << opt_text(k.test.acc) << "  " << opt_text(k.test.auc) << "  " << std::fixed
            << std::setprecision(1) << k.mean_epochs << '\n';
        out.unsetf(std::ios::fixed);
    }

    std::size_t failed = 0, stagnated = 0;
    for (const auto& cell : report.cells) {
        if (!cell.ok) {
            ++failed;
            err << "benchmark: " << to_string(cell.kind) << " fold " << cell.fold << " failed: " << cell.error << '\n';
        } else if (cell.trace.stop_reason == StopReason::stagnation) {
            ++stagnated;
        }
    }
    if (failed == report.cells.size()) return kStrictFailure;
    if (c.strict && (failed > 0 || stagnated > 0)) return kStrictFailure;
    return kSuccess;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Train small MLP classifiers with classical optimizers and cross-validate them"};
    cli.require_subcommand(1);

    std::string ingest_path, ingest_out = "out";
    auto* ingest = cli.add_subcommand("ingest", "Parse, clean and normalize a heart-disease table");
    ingest->add_option("path", ingest_path, "UCI processed-Cleveland style file")->required();
    ingest->add_option("--out", ingest_out, "Directory for snapshot.csv");

    struct Common {
        std::string config, data, out;
        std::vector<std::string> sets;
        std::uint64_t seed = 0;
        bool strict = false;
    };
    auto add_common = [](CLI::App* sub, Common& c) {
        sub->add_option("--config", c.config, "key = value configuration file");
        sub->add_option("--data", c.data, "Dataset path");
        sub->add_option("--out", c.out, "Output directory");
        sub->add_option("--seed", c.seed, "Run seed");
        sub->add_option("--set", c.sets, "Override a setting, key=value (repeatable)");
        sub->add_flag("--strict", c.strict, "Non-zero exit when training stagnates");
    };

    Common train_opts;
    std::string kind_name;
    auto* train_cmd = cli.add_subcommand("train", "Train one algorithm on the full dataset");
    train_cmd->add_option("--kind", kind_name, "Algorithm (LM, BFG, RP, SCG, CGB, CGF, CGP, OSS, GDX, GD)")->required();
    add_common(train_cmd, train_opts);

    Common bench_opts;
    std::string algorithms;
    std::size_t folds = 0, jobs = 1;
    auto* bench = cli.add_subcommand("benchmark", "Cross-validate a set of algorithms");
    bench->add_option("--algorithms", algorithms, "Comma-separated algorithm list");
    bench->add_option("--folds", folds, "Number of folds");
    bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    add_common(bench, bench_opts);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << cli.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << cli.help();
        return kUsage;
    }

    if (ingest->parsed()) return cmd_ingest(ingest_path, ingest_out, out, err);

    auto resolve = [](CLI::App* sub, const Common& opts) {
        RunConfig c;
        if (!opts.config.empty()) load_config_file(c, opts.config);
        if (!opts.data.empty()) c.data_path = opts.data;
        if (!opts.out.empty()) c.out_dir = opts.out;
        if (sub->count("--seed")) c.train.seed = opts.seed;
        for (const auto& kv : opts.sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
            apply_run_setting(c, trim(std::string_view(kv).substr(0, eq)), trim(std::string_view(kv).substr(eq + 1)));
        }
        c.strict = opts.strict;
        c.train.validate();
        return c;
    };

    try {
        if (train_cmd->parsed()) {
            const auto kind = parse_kind(kind_name);
            if (!kind) throw UsageError("unknown algorithm '" + kind_name + "'");
            return cmd_train(resolve(train_cmd, train_opts), *kind, out, err);
        }
        RunConfig c = resolve(bench, bench_opts);
        if (!algorithms.empty()) c.algorithms = parse_kind_list(algorithms);
        if (bench->count("--folds")) apply_run_setting(c, "folds", std::to_string(folds));
        c.jobs = jobs;
        return cmd_benchmark(c, out, err);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace cardionn::app
