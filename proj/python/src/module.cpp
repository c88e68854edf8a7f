#include <fstream>
#include <sstream>
#include <string>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cardionn/data.hpp"
#include "cardionn/eval.hpp"
#include "cardionn/mlp.hpp"
#include "cardionn/optimizers.hpp"

namespace py = pybind11;
using namespace cardionn;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

Array to_array(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

Samples samples(const Array& features, const Vector& targets) {
    Samples s{to_matrix(features), targets};
    if (s.features.rows() != s.targets.size()) throw py::value_error("features and targets differ in length");
    return s;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw py::value_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return binarize_and_normalize(clean(parse_heart_csv(ss.str())));
}

py::object optional_value(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multilayer perceptron training and evaluation for the Cleveland heart data.";

    py::enum_<Activation>(m, "Activation").value("tanh", Activation::tanh).value("logistic", Activation::logistic);
    py::enum_<InitScheme>(m, "InitScheme")
        .value("uniform", InitScheme::uniform)
        .value("nguyen_widrow", InitScheme::nguyen_widrow);

    py::enum_<OptimizerKind> kind(m, "OptimizerKind");
    for (OptimizerKind k : {OptimizerKind::LM, OptimizerKind::BFG, OptimizerKind::RP, OptimizerKind::SCG,
                            OptimizerKind::CGB, OptimizerKind::CGF, OptimizerKind::CGP, OptimizerKind::OSS,
                            OptimizerKind::GDX, OptimizerKind::GD})
        kind.value(std::string(to_string(k)).c_str(), k);

    py::enum_<StopReason>(m, "StopReason")
        .value("goal", StopReason::goal)
        .value("max_epochs", StopReason::max_epochs)
        .value("min_grad", StopReason::min_grad)
        .value("stagnation", StopReason::stagnation);

    py::class_<Topology>(m, "Topology")
        .def(py::init<>())
        .def(py::init([](std::vector<std::size_t> layers, Activation hidden, Activation output) {
                 Topology t{std::move(layers), hidden, output};
                 t.validate();
                 return t;
             }),
             py::arg("layers"), py::arg("hidden") = Activation::tanh, py::arg("output") = Activation::tanh)
        .def_readwrite("layers", &Topology::layers)
        .def_readwrite("hidden", &Topology::hidden)
        .def_readwrite("output", &Topology::output)
        .def_property_readonly("parameter_count", &Topology::parameter_count)
        .def("__repr__", [](const Topology& t) { return "Topology('" + format_layers(t) + "')"; });

    py::class_<TrainConfig> cfg(m, "TrainConfig");
    cfg.def(py::init<>())
        .def_readwrite("max_epochs", &TrainConfig::max_epochs)
        .def_readwrite("goal_mse", &TrainConfig::goal_mse)
        .def_readwrite("min_grad_norm", &TrainConfig::min_grad_norm)
        .def_readwrite("lr0", &TrainConfig::lr0)
        .def_readwrite("momentum", &TrainConfig::momentum)
        .def_readwrite("lr_inc", &TrainConfig::lr_inc)
        .def_readwrite("lr_dec", &TrainConfig::lr_dec)
        .def_readwrite("max_perf_inc", &TrainConfig::max_perf_inc)
        .def_readwrite("rp_delta0", &TrainConfig::rp_delta0)
        .def_readwrite("rp_delta_min", &TrainConfig::rp_delta_min)
        .def_readwrite("rp_delta_max", &TrainConfig::rp_delta_max)
        .def_readwrite("rp_eta_plus", &TrainConfig::rp_eta_plus)
        .def_readwrite("rp_eta_minus", &TrainConfig::rp_eta_minus)
        .def_readwrite("lm_mu0", &TrainConfig::lm_mu0)
        .def_readwrite("lm_mu_inc", &TrainConfig::lm_mu_inc)
        .def_readwrite("lm_mu_dec", &TrainConfig::lm_mu_dec)
        .def_readwrite("lm_mu_max", &TrainConfig::lm_mu_max)
        .def_readwrite("lm_max_escalations", &TrainConfig::lm_max_escalations)
        .def_readwrite("scg_sigma", &TrainConfig::scg_sigma)
        .def_readwrite("scg_lambda0", &TrainConfig::scg_lambda0)
        .def_readwrite("pr_clamp", &TrainConfig::pr_clamp)
        .def_readwrite("exact_line_search", &TrainConfig::exact_line_search)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("init", &TrainConfig::init)
        .def("validate", &TrainConfig::validate);

    py::class_<TrainTrace>(m, "TrainTrace")
        .def_readonly("initial_mse", &TrainTrace::initial_mse)
        .def_readonly("mse_per_epoch", &TrainTrace::mse_per_epoch)
        .def_readonly("grad_norm_per_epoch", &TrainTrace::grad_norm_per_epoch)
        .def_readonly("function_evals", &TrainTrace::function_evals)
        .def_readonly("gradient_evals", &TrainTrace::gradient_evals)
        .def_readonly("jacobian_evals", &TrainTrace::jacobian_evals)
        .def_readonly("stop_reason", &TrainTrace::stop_reason)
        .def_readonly("stop_detail", &TrainTrace::stop_detail)
        .def_property_readonly("epochs", &TrainTrace::epochs)
        .def_property_readonly("final_mse", &TrainTrace::final_mse);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("params", &TrainResult::params)
        .def_readonly("trace", &TrainResult::trace);

    m.def("init_params", &init_params, py::arg("topology"), py::arg("seed"), py::arg("scheme") = InitScheme::uniform);
    m.def(
        "forward", [](const Topology& t, const Vector& w, const Vector& x) { return forward(t, w, x); },
        py::arg("topology"), py::arg("params"), py::arg("features"));
    m.def(
        "predict", [](const Topology& t, const Vector& w, const Array& x) { return predict(t, w, to_matrix(x)); },
        py::arg("topology"), py::arg("params"), py::arg("features"));
    m.def(
        "mse_loss",
        [](const Topology& t, const Vector& w, const Array& x, const Vector& y) {
            return mse_loss(t, w, samples(x, y));
        },
        py::arg("topology"), py::arg("params"), py::arg("features"), py::arg("targets"));
    m.def(
        "gradient",
        [](const Topology& t, const Vector& w, const Array& x, const Vector& y) {
            return gradient(t, w, samples(x, y));
        },
        py::arg("topology"), py::arg("params"), py::arg("features"), py::arg("targets"));
    m.def(
        "jacobian",
        [](const Topology& t, const Vector& w, const Array& x, const Vector& y) {
            const Residuals r = jacobian(t, w, samples(x, y));
            return py::make_tuple(to_array(r.jacobian), r.errors);
        },
        py::arg("topology"), py::arg("params"), py::arg("features"), py::arg("targets"),
        "Returns (J, e) with J = dy/dw and e = t - y.");
    m.def(
        "train",
        [](const Topology& t, const Array& x, const Vector& y, OptimizerKind k, const TrainConfig& c) {
            const Samples s = samples(x, y);
            py::gil_scoped_release release;
            return train(t, s, k, c);
        },
        py::arg("topology"), py::arg("features"), py::arg("targets"), py::arg("kind"),
        py::arg("config") = TrainConfig{});

    py::class_<ConfusionCounts>(m, "ConfusionCounts")
        .def_readonly("tp", &ConfusionCounts::tp)
        .def_readonly("fp", &ConfusionCounts::fp)
        .def_readonly("tn", &ConfusionCounts::tn)
        .def_readonly("fn", &ConfusionCounts::fn)
        .def_property_readonly("total", &ConfusionCounts::total);
    m.def(
        "confusion", [](const Vector& s, const Vector& l, double th) { return confusion(s, l, th); },
        py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.0);
    m.def(
        "metrics",
        [](const ConfusionCounts& c) {
            const Metrics r = metrics(c);
            py::dict d;
            d["sen"] = optional_value(r.sen);
            d["spe"] = optional_value(r.spe);
            d["acc"] = optional_value(r.acc);
            return d;
        },
        py::arg("counts"));
    m.def(
        "auc", [](const Vector& s, const Vector& l) { return auc(s, l); }, py::arg("scores"), py::arg("labels"));
    py::register_exception<OneClassOnly>(m, "OneClassOnly", PyExc_ValueError);

    m.def(
        "kfold_split",
        [](std::size_t n, std::size_t k, const std::vector<std::size_t>& positives, std::uint64_t seed) {
            return kfold_split(n, k, positives, seed).folds;
        },
        py::arg("n"), py::arg("k"), py::arg("positives"), py::arg("seed"));

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("features", [](const Dataset& d) { return to_array(d.samples.features); })
        .def_property_readonly("targets", [](const Dataset& d) { return d.samples.targets; })
        .def_property_readonly("size", &Dataset::size)
        .def_property_readonly("positives", &Dataset::positives)
        .def("positive_indices", &Dataset::positive_indices)
        .def("fingerprint", &Dataset::fingerprint);
    m.def("load_heart", &load_dataset, py::arg("path"),
          "Parses, drops rows with missing values, binarizes the stage and scales features to [-1, 1].");

    m.def(
        "run_cv_json",
        [](const Dataset& d, std::size_t folds, const std::vector<OptimizerKind>& kinds, const Topology& t,
           const TrainConfig& c, std::size_t jobs) {
            const FoldPlan plan = kfold_split(d.size(), folds, d.positive_indices(), c.seed);
            CvConfig cv;
            cv.topology = t;
            cv.train = c;
            cv.jobs = jobs;
            std::ostringstream out;
            {
                py::gil_scoped_release release;
                write_report_json(run_cv(d, plan, kinds, cv), out);
            }
            return out.str();
        },
        py::arg("dataset"), py::arg("folds"), py::arg("kinds"), py::arg("topology"), py::arg("config"),
        py::arg("jobs") = 1);
}
