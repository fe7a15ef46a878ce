#include <map>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rtheta/classify/model_io.hpp"
#include "rtheta/complexity_model.hpp"
#include "rtheta/errors.hpp"
#include "rtheta/fitter.hpp"
#include "rtheta/perf_parser.hpp"
#include "rtheta/pipeline.hpp"

namespace py = pybind11;
using namespace rtheta;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

classify::Matrix to_matrix(const Array& x) {
  if (x.ndim() != 2) throw std::invalid_argument("X must be two-dimensional");
  classify::Matrix m;
  m.n_features = static_cast<std::size_t>(x.shape(1));
  m.values.assign(x.data(), x.data() + x.size());
  return m;
}

py::dict quadruple_dict(const FitQuadruple& q) {
  py::dict d;
  d["feature_type"] = std::string(to_string(q.feature_type));
  d["feature_config"] = q.feature_config;
  d["intercept"] = q.intercept;
  d["r_val"] = q.r_val;
  return d;
}

py::dict report_dict(const classify::EvalReport& r) {
  auto scores = [](const classify::ClassScores& s) {
    py::dict d;
    d["precision"] = s.precision;
    d["recall"] = s.recall;
    d["f1"] = s.f1;
    d["support"] = s.support;
    return d;
  };
  py::dict classes, averages;
  for (const auto& c : r.classes) classes[py::str(c.name)] = scores(c);
  for (const auto& a : r.averages) averages[py::str(a.name)] = scores(a);
  py::dict d;
  d["classes"] = classes;
  d["averages"] = averages;
  d["accuracy"] = r.accuracy ? py::object(py::float_(*r.accuracy)) : py::object(py::none());
  d["table"] = classify::format_report_table(r);
  return d;
}

}  // namespace

PYBIND11_MODULE(_rtheta, m) {
  m.doc() = "Empirical complexity fits, code embeddings and tree classifiers";

  py::register_exception<Error>(m, "RthetaError", PyExc_RuntimeError);

  m.def("grid", [] {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& b : candidate_grid()) out.emplace_back(to_string(b.kind), b.param);
    return out;
  });

  m.def(
      "evaluate_basis",
      [](const std::string& kind, double param, std::int64_t n) {
        return evaluate_basis({family_kind_from_string(kind), param}, n);
      },
      py::arg("kind"), py::arg("param"), py::arg("n"));

  m.def(
      "fit",
      [](const std::vector<std::int64_t>& sizes, const std::vector<double>& values, double tie_tolerance,
         double alpha) {
        if (sizes.size() != values.size()) throw std::invalid_argument("sizes and values differ in length");
        std::vector<Sample> s;
        for (std::size_t i = 0; i < sizes.size(); ++i) s.push_back({sizes[i], values[i]});
        const auto sel = select_best(aggregate_repeats(s), {tie_tolerance, alpha});
        auto d = quadruple_dict(sel.quadruple);
        d["nrmse"] = sel.score.nrmse;
        return d;
      },
      py::arg("sizes"), py::arg("values"), py::arg("tie_tolerance") = 1e-9, py::arg("alpha") = 0.05,
      "Best candidate for a metric series; repeated sizes are median-aggregated.");

  m.def(
      "parse_perf",
      [](std::string_view text, char separator) {
        const auto values = parse_perf_output(text, separator);
        py::dict d;
        for (auto metric : kAllMetrics) {
          const auto& v = values[index_of(metric)];
          d[py::str(std::string(to_string(metric)))] = v ? py::object(py::float_(*v)) : py::object(py::none());
        }
        return d;
      },
      py::arg("text"), py::arg("separator") = ',');

  m.def("embedding_header", [] { return embedding_header(); });

  m.def(
      "embed_store",
      [](const std::filesystem::path& store, bool impute) {
        std::map<std::string, std::vector<ProfileRecord>> by_program;
        for (auto& r : ProfileStore(store).read_all()) by_program[r.program_id].push_back(std::move(r));
        std::vector<std::pair<std::string, std::vector<double>>> out;
        for (const auto& [id, runs] : by_program) {
          const auto e = build_embedding(runs, {.impute = impute});
          out.emplace_back(id, std::vector<double>(e.values.begin(), e.values.end()));
        }
        return out;
      },
      py::arg("store"), py::arg("impute") = false);

  py::class_<classify::BinaryClassifier>(m, "Classifier")
      .def(py::init([](const std::string& kind, const Array& x, const std::vector<int>& y, std::uint64_t seed) {
             auto data = to_matrix(x);
             classify::LearnerParams params;
             params.forest.seed = seed;
             return classify::train_binary(data.view(), y, classify::base_learner_from_string(kind), params);
           }),
           py::arg("kind"), py::arg("X"), py::arg("y"), py::arg("seed") = 0)
      .def("predict_proba",
           [](const classify::BinaryClassifier& c, const Array& x) {
             const auto data = to_matrix(x);
             std::vector<double> out;
             for (std::size_t r = 0; r < data.rows(); ++r) out.push_back(c.positive_probability(data.view().row(r)));
             return out;
           })
      .def("predict",
           [](const classify::BinaryClassifier& c, const Array& x) {
             const auto data = to_matrix(x);
             std::vector<int> out;
             for (std::size_t r = 0; r < data.rows(); ++r) out.push_back(c.predict(data.view().row(r)));
             return out;
           })
      .def("to_json", [](const classify::BinaryClassifier& c) { return classify::to_json(c).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return classify::binary_classifier_from_json(nlohmann::ordered_json::parse(text));
      });

  m.def(
      "evaluate",
      [](const std::vector<std::uint32_t>& predicted, const std::vector<std::uint32_t>& truth,
         const std::vector<std::string>& names) { return report_dict(classify::evaluate(predicted, truth, names)); },
      py::arg("predicted"), py::arg("truth"), py::arg("class_names"));

  m.def(
      "run_stage",
      [](const std::filesystem::path& config, const std::string& stage) -> py::object {
        const auto c = load_config(config);
        if (stage == "profile") return py::int_(cmd_profile(c).total);
        if (stage == "embed") return py::int_(cmd_embed(c).rows.size());
        if (stage == "dataset") return py::int_(cmd_dataset(c));
        if (stage == "train") return py::int_(cmd_train(c).model_files.size());
        if (stage == "eval") {
          py::dict out;
          for (const auto& [base, report] : cmd_eval(c).reports)
            out[py::str(std::string(classify::to_string(base)))] = report_dict(report);
          return out;
        }
        throw std::invalid_argument("unknown stage " + stage);
      },
      py::arg("config"), py::arg("stage"));
}
