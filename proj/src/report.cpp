#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "cardionn/eval.hpp"
#include "cardionn/settings.hpp"

namespace cardionn {

namespace {

using nlohmann::ordered_json;

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

ordered_json to_json(const MeanMetrics& m) {
    return {{"sen", opt(m.sen)}, {"spe", opt(m.spe)}, {"acc", opt(m.acc)}, {"aroc", opt(m.auc)}};
}

ordered_json to_json(const PhaseResult& p) {
    return {{"tp", p.counts.tp},         {"fp", p.counts.fp},         {"tn", p.counts.tn},
            {"fn", p.counts.fn},         {"sen", opt(p.metrics.sen)}, {"spe", opt(p.metrics.spe)},
            {"acc", opt(p.metrics.acc)}, {"aroc", opt(p.auc)}};
}

} // namespace

void write_report_csv(const BenchmarkReport& r, std::ostream& out) {
    out << "algorithm,sen_train,spe_train,acc_train,sen_test,spe_test,acc_test,aroc_train,aroc_test\n";
    for (const auto& k : r.kinds) {
        out << to_string(k.kind) << ',' << cell(k.train.sen) << ',' << cell(k.train.spe) << ','
            << cell(k.train.acc) << ',' << cell(k.test.sen) << ',' << cell(k.test.spe) << ',' << cell(k.test.acc)
            << ',' << cell(k.train.auc) << ',' << cell(k.test.auc) << '\n';
    }
}

void write_report_json(const BenchmarkReport& r, std::ostream& out) {
    ordered_json config = ordered_json::object();
    for (const auto& [key, value] : describe(r.meta.config.topology, r.meta.config.train)) config[key] = value;
    config["convergence_threshold"] = format_number(r.meta.config.convergence_threshold);

    ordered_json doc;
    doc["metadata"] = {
        {"seed", r.meta.seed},
        {"folds", r.meta.folds},
        {"fold_policy", "stratified round-robin"},
        {"samples", r.meta.samples},
        {"positives", r.meta.positives},
        {"dataset_fingerprint", hex64(r.meta.dataset_fingerprint)},
        {"normalization", "min-max to [-1,1] over the full cleaned dataset, before fold splitting"},
        {"averaging", "macro over folds"},
        {"threshold", r.meta.threshold},
        {"config", config},
    };

    ordered_json algorithms = ordered_json::array();
    for (const auto& k : r.kinds) {
        algorithms.push_back({
            {"algorithm", std::string(to_string(k.kind))},
            {"train", to_json(k.train)},
            {"test", to_json(k.test)},
            {"folds_ok", k.folds_ok},
            {"folds_failed", k.folds_failed},
            {"goal_reached", k.goal_reached},
            {"mean_epochs", k.mean_epochs},
            {"mean_epochs_to_goal", opt(k.mean_epochs_to_goal)},
            {"mean_final_mse", k.mean_final_mse},
            {"epochs_to_convergence_threshold",
             k.convergence.epochs_to_threshold ? ordered_json(*k.convergence.epochs_to_threshold)
                                               : ordered_json(nullptr)},
        });
    }
    doc["algorithms"] = std::move(algorithms);

    ordered_json cells = ordered_json::array();
    for (const auto& c : r.cells) {
        ordered_json j{
            {"algorithm", std::string(to_string(c.kind))},
            {"fold", c.fold},
            {"init_seed", c.init_seed},
            {"ok", c.ok},
        };
        if (c.ok) {
            j["train"] = to_json(c.train);
            j["test"] = to_json(c.test);
            j["epochs"] = c.trace.epochs();
            j["initial_mse"] = c.trace.initial_mse;
            j["final_mse"] = c.trace.final_mse();
            j["stop_reason"] = std::string(to_string(c.trace.stop_reason));
            j["stop_detail"] = c.trace.stop_detail;
            j["function_evals"] = c.trace.function_evals;
            j["gradient_evals"] = c.trace.gradient_evals;
            j["jacobian_evals"] = c.trace.jacobian_evals;
        } else {
            j["error"] = c.error;
        }
        cells.push_back(std::move(j));
    }
    doc["folds"] = std::move(cells);
    out << doc.dump(2) << '\n';
}

void write_convergence_csv(const BenchmarkReport& r, std::ostream& out) {
    out << "kind,epoch,mean_mse\n";
    for (const auto& k : r.kinds) {
        const auto& curve = k.convergence.mean_curve;
        for (std::size_t e = 0; e < curve.size(); ++e) {
            out << to_string(k.kind) << ',' << (e + 1) << ',' << format_number(curve[e]) << '\n';
        }
    }
}

void write_trace_csv(const TrainTrace& t, std::ostream& out) {
    out << "epoch,mse,grad_norm\n";
    for (std::size_t e = 0; e < t.epochs(); ++e) {
        out << (e + 1) << ',' << format_number(t.mse_per_epoch[e]) << ',' << format_number(t.grad_norm_per_epoch[e])
            << '\n';
    }
}

} // namespace cardionn
