#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"

#include "cardionn/app.hpp"

namespace fs = std::filesystem;
using namespace cardionn;
using namespace cardionn::app;

namespace {

const std::string kData = std::string(CARDIONN_DATA_DIR) + "/processed.cleveland.data";

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cardionn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cardionn_app_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("ingest summarizes the Cleveland file") {
    const fs::path dir = scratch("ingest");
    const Outcome r = cli({"ingest", kData, "--out", dir.string()});
    CHECK(r.code == kSuccess);
    CHECK(r.out.find("303 raw, 297 clean") != std::string::npos);
    CHECK(r.out.find("137 positive, 160 negative") != std::string::npos);
    CHECK(r.out.find("f13:") != std::string::npos);
    CHECK(line_count(slurp(dir / "snapshot.csv")) == 297);
}

TEST_CASE("ingest of a snapshot reproduces the snapshot") {
    const fs::path a = scratch("ingest_a");
    const fs::path b = scratch("ingest_b");
    REQUIRE(cli({"ingest", kData, "--out", a.string()}).code == kSuccess);
    const Outcome again = cli({"ingest", (a / "snapshot.csv").string(), "--out", b.string()});
    CHECK(again.code == kSuccess);
    CHECK(again.out.find("297 raw, 297 clean") != std::string::npos);
    CHECK(slurp(a / "snapshot.csv") == slurp(b / "snapshot.csv"));
}

TEST_CASE("ingest data errors exit with code 2") {
    const fs::path dir = scratch("ingest_bad");
    spit(dir / "empty.data", "");
    CHECK(cli({"ingest", (dir / "empty.data").string(), "--out", dir.string()}).code == kDataError);

    spit(dir / "short.data", "63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0\n1,2,3\n");
    const Outcome r = cli({"ingest", (dir / "short.data").string(), "--out", dir.string()});
    CHECK(r.code == kDataError);
    CHECK(r.err.find("line 2") != std::string::npos);

    CHECK(cli({"ingest", (dir / "missing.data").string()}).code == kDataError);
}

TEST_CASE("train writes a trace, a model and the resolved config") {
    const fs::path dir = scratch("train");
    const Outcome r = cli({"train", "--kind", "LM", "--data", kData, "--out", dir.string()});
    CHECK(r.code == kSuccess);
    CHECK(r.out.rfind("LM: ", 0) == 0);

    const std::string trace = slurp(dir / "trace_LM.csv");
    CHECK(trace.rfind("epoch,mse,grad_norm\n", 0) == 0);
    CHECK(line_count(trace) - 1 <= 500);
    CHECK(line_count(trace) >= 2);

    const auto model = nlohmann::json::parse(slurp(dir / "model_LM.json"));
    CHECK(model["algorithm"] == "LM");
    CHECK(model["parameters"].size() == 106);
    CHECK(model["config"]["layers"] == "13,7,1");
    CHECK(model["config"]["seed"] == "1");

    const std::string config = slurp(dir / "config.txt");
    CHECK(config.find("max_epochs = 500") != std::string::npos);
    CHECK(config.find("lm_mu0 = 0.001") != std::string::npos);
}

TEST_CASE("train is byte-reproducible for a fixed seed") {
    const fs::path a = scratch("train_a");
    const fs::path b = scratch("train_b");
    for (const auto& d : {a, b})
        REQUIRE(cli({"train", "--kind", "SCG", "--data", kData, "--out", d.string(), "--seed", "7"}).code == kSuccess);
    CHECK(slurp(a / "trace_SCG.csv") == slurp(b / "trace_SCG.csv"));
    CHECK(slurp(a / "model_SCG.json") == slurp(b / "model_SCG.json"));
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(cli({"train", "--kind", "ADAM", "--data", kData}).code == kUsage);
    CHECK(cli({"train", "--data", kData}).code == kUsage);
    CHECK(cli({"benchmark", "--algorithms", "LM,XYZ", "--data", kData}).code == kUsage);
    CHECK(cli({"benchmark", "--folds", "1", "--data", kData}).code == kUsage);
    CHECK(cli({"benchmark", "--jobs", "0", "--data", kData}).code == kUsage);
    CHECK(cli({"train", "--kind", "LM", "--set", "goal_mse=-1", "--data", kData}).code == kUsage);
    CHECK(cli({"train", "--kind", "LM", "--set", "no_such_key=1", "--data", kData}).code == kUsage);
    CHECK(cli({"train", "--kind", "LM", "--set", "max_epochs", "--data", kData}).code == kUsage);
    CHECK(cli({"frobnicate"}).code == kUsage);
    CHECK(cli({}).code == kUsage);
    CHECK(cli({"--help"}).code == kSuccess);
}

TEST_CASE("strict training exits with code 3 on stagnation") {
    const fs::path dir = scratch("strict");
    // Without room to raise the damping, the first rejected LM step overflows.
    const std::vector<std::string> args{"train",      "--kind",  "LM", "--data", kData, "--out", dir.string(),
                                        "--set",      "lm_mu_max=0.001", "--set", "goal_mse=1e-9"};
    const Outcome lax = cli(args);
    CHECK(lax.code == kSuccess);
    CHECK(lax.out.find("stop stagnation") != std::string::npos);

    auto strict_args = args;
    strict_args.push_back("--strict");
    const Outcome strict = cli(strict_args);
    CHECK(strict.code == kStrictFailure);
    CHECK(strict.err.find("stagnation") != std::string::npos);
}

TEST_CASE("benchmark with two algorithms") {
    const fs::path dir = scratch("bench2");
    const Outcome r = cli({"benchmark", "--algorithms", "LM,OSS", "--data", kData, "--out", dir.string(), "--set",
                           "max_epochs=30"});
    CHECK(r.code == kSuccess);
    CHECK(r.out.find("20 training runs (2 algorithms x 10 folds)") != std::string::npos);

    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["algorithms"].size() == 2);
    CHECK(report["folds"].size() == 20);
    CHECK(report["metadata"]["config"]["max_epochs"] == "30");
    CHECK(line_count(slurp(dir / "report.csv")) == 3);
    CHECK(slurp(dir / "convergence.csv").rfind("kind,epoch,mean_mse\n", 0) == 0);
    CHECK(fs::exists(dir / "trace_OSS_9.csv"));
    CHECK(fs::exists(dir / "config.txt"));
}

TEST_CASE("default benchmark covers nine algorithms over ten folds") {
    const fs::path dir = scratch("bench9");
    const Outcome r =
        cli({"benchmark", "--data", kData, "--out", dir.string(), "--set", "max_epochs=3", "--formats", "json"});
    // --formats is not a flag; settings go through --set.
    CHECK(r.code == kUsage);

    const Outcome ok = cli({"benchmark", "--data", kData, "--out", dir.string(), "--set", "max_epochs=3", "--set",
                            "formats=json"});
    CHECK(ok.code == kSuccess);
    CHECK(ok.out.find("90 training runs (9 algorithms x 10 folds)") != std::string::npos);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["algorithms"].size() == 9);
    CHECK(report["folds"].size() == 90);
    CHECK_FALSE(fs::exists(dir / "report.csv"));
}

TEST_CASE("benchmark ranks LM above GDX on training accuracy") {
    const fs::path dir = scratch("bench_rank");
    REQUIRE(cli({"benchmark", "--algorithms", "GDX,LM", "--data", kData, "--out", dir.string()}).code == kSuccess);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    REQUIRE(report["algorithms"][0]["algorithm"] == "GDX");
    REQUIRE(report["algorithms"][1]["algorithm"] == "LM");
    CHECK(report["algorithms"][1]["train"]["acc"].get<double>() > report["algorithms"][0]["train"]["acc"].get<double>());
}

TEST_CASE("embedded config reproduces a benchmark, and flags override the file") {
    const fs::path a = scratch("cfg_a");
    const fs::path b = scratch("cfg_b");
    REQUIRE(cli({"benchmark", "--algorithms", "RP,CGP", "--folds", "4", "--seed", "9", "--data", kData, "--out",
                 a.string(), "--set", "max_epochs=25", "--set", "rp_delta0=0.1"})
                .code == kSuccess);
    REQUIRE(cli({"benchmark", "--config", (a / "config.txt").string(), "--out", b.string()}).code == kSuccess);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));

    const fs::path c = scratch("cfg_c");
    REQUIRE(cli({"benchmark", "--config", (a / "config.txt").string(), "--out", c.string(), "--set",
                 "max_epochs=10"})
                .code == kSuccess);
    const auto doc = nlohmann::json::parse(slurp(c / "report.json"));
    CHECK(doc["metadata"]["config"]["max_epochs"] == "10");
    CHECK(doc["metadata"]["config"]["rp_delta0"] == "0.1");
    CHECK(doc["metadata"]["seed"] == 9);
    CHECK(doc["metadata"]["folds"] == 4);
}

TEST_CASE("benchmark reports are identical across job counts") {
    const fs::path a = scratch("jobs_1");
    const fs::path b = scratch("jobs_4");
    const std::vector<std::string> base{"benchmark", "--algorithms", "BFG,SCG,GDX", "--data", kData, "--set",
                                        "max_epochs=40"};
    auto with = [&](const fs::path& dir, const std::string& jobs) {
        auto args = base;
        for (const auto& s : {std::string("--out"), dir.string(), std::string("--jobs"), jobs}) args.push_back(s);
        return cli(args);
    };
    REQUIRE(with(a, "1").code == kSuccess);
    REQUIRE(with(b, "4").code == kSuccess);
    for (const char* f : {"report.json", "report.csv", "convergence.csv", "config.txt", "trace_SCG_3.csv"})
        CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("config file parsing") {
    const fs::path dir = scratch("cfg_parse");
    spit(dir / "ok.txt", "# comment\n\nfolds = 5\nalgorithms = LM, SCG\nhidden_activation = logistic\n");
    RunConfig c;
    load_config_file(c, dir / "ok.txt");
    CHECK(c.folds == 5);
    CHECK(c.algorithms == std::vector<OptimizerKind>{OptimizerKind::LM, OptimizerKind::SCG});
    CHECK(c.topology.hidden == Activation::logistic);

    RunConfig round;
    std::ostringstream text;
    write_config(c, text);
    spit(dir / "round.txt", text.str());
    load_config_file(round, dir / "round.txt");
    CHECK(describe(round) == describe(c));

    spit(dir / "bad.txt", "folds 5\n");
    CHECK_THROWS_AS(load_config_file(c, dir / "bad.txt"), UsageError);
    CHECK_THROWS_AS(load_config_file(c, dir / "nowhere.txt"), UsageError);
    CHECK_THROWS_AS(parse_kind_list("LM,,SCG"), UsageError);
    CHECK(parse_kind_list("GD").front() == OptimizerKind::GD);
}
