#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "strongtree/error.hpp"
#include "strongtree/experiment.hpp"
#include "strongtree/metrics.hpp"
#include "strongtree/train.hpp"

namespace py = pybind11;
using namespace strongtree;

namespace {

BinaryDataset from_arrays(const std::vector<std::vector<int>>& x, const std::vector<int>& y,
                          std::vector<std::string> feature_names, std::vector<std::string> class_names) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "x and y have different lengths");
  BinaryDataset d;
  const std::size_t F = x.empty() ? feature_names.size() : x[0].size();
  int K = 0;
  for (int v : y) {
    if (v < 0) throw Error(ErrorCode::InvalidArgument, "labels must be non-negative class indices");
    K = std::max(K, v + 1);
  }
  if (feature_names.empty()) {
    for (std::size_t f = 0; f < F; ++f) feature_names.push_back("x" + std::to_string(f));
  }
  if (class_names.empty()) {
    for (int k = 0; k < std::max(K, 2); ++k) class_names.push_back(std::to_string(k));
  }
  if (feature_names.size() != F) throw Error(ErrorCode::DimensionMismatch, "feature_names has the wrong length");
  if (static_cast<int>(class_names.size()) < K) throw Error(ErrorCode::DimensionMismatch, "too few class_names");
  for (const auto& row : x) {
    if (row.size() != F) throw Error(ErrorCode::DimensionMismatch, "rows of x differ in length");
    std::vector<std::uint8_t> bits;
    for (int v : row) {
      if (v != 0 && v != 1) throw Error(ErrorCode::InvalidArgument, "x must be binary");
      bits.push_back(static_cast<std::uint8_t>(v));
    }
    d.x.push_back(std::move(bits));
  }
  d.y = y;
  d.feature_names = std::move(feature_names);
  d.class_names = std::move(class_names);
  for (const auto& name : d.feature_names) d.encoding.push_back({name, FeatureEncoding::Kind::Passthrough, "", 0});
  for (int i = 0; i < d.n_rows(); ++i) d.source_rows.push_back(i + 1);
  return d;
}

BinaryDataset load(const std::string& path, const std::string& label, const std::map<std::string, std::string>& kinds,
                   bool strict_missing) {
  LoadOptions o;
  for (const auto& [col, kind] : kinds) o.column_kinds[col] = parse_column_kind(kind);
  o.strict_missing = strict_missing;
  return binarize(load_csv(path, label, o));
}

py::dict metrics_dict(const Metrics& m) {
  py::dict out;
  out["rows"] = m.rows;
  out["correct"] = m.correct;
  out["accuracy"] = m.accuracy;
  out["balanced_accuracy"] = m.balanced_accuracy;
  out["worst_case_accuracy"] = m.worst_case_accuracy;
  out["per_class_accuracy"] = m.per_class_accuracy;
  out["confusion"] = m.confusion;
  py::dict groups;
  for (const auto& [name, g] : m.groups) {
    py::dict e;
    e["rows"] = g.rows;
    e["positive_rate"] = g.positive_rate;
    e["true_positive_rate"] = g.true_positive_rate;
    e["false_positive_rate"] = g.false_positive_rate;
    groups[py::str(name)] = e;
  }
  out["groups"] = groups;
  return out;
}

TrainedTree train_py(const BinaryDataset& data, int depth, const std::string& engine, const std::string& formulation,
                     double lambda, const std::string& objective, std::optional<int> max_splits,
                     std::optional<int> max_features, std::optional<int> min_leaf, std::optional<double> recall_floor,
                     std::optional<double> specificity_floor, std::optional<double> precision_floor,
                     const std::vector<std::string>& fairness, bool exclude_protected, std::optional<double> time_limit,
                     int threads, int node_batch) {
  TrainOptions o;
  o.depth = depth;
  o.engine = parse_engine(engine);
  o.formulation = parse_formulation(formulation);
  o.lambda = lambda;
  o.objective = parse_objective(objective);
  o.max_splits = max_splits;
  o.max_features = max_features;
  o.min_leaf = min_leaf;
  o.recall_floor = recall_floor;
  o.specificity_floor = specificity_floor;
  o.precision_floor = precision_floor;
  for (const auto& f : fairness) o.fairness.push_back(parse_fairness(f));
  o.exclude_protected = exclude_protected;
  if (time_limit) o.solver.time_limit = *time_limit;
  o.solver.threads = threads;
  o.solver.node_batch = node_batch;
  TrainResult r;
  {
    py::gil_scoped_release release;
    r = train(data, o);
  }
  return r.tree;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimal classification trees via flow-based MIO formulations";

  static py::exception<Error> error(m, "StrongTreeError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = to_string(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<BinaryDataset>(m, "Dataset")
      .def_property_readonly("n_rows", &BinaryDataset::n_rows)
      .def_property_readonly("n_features", &BinaryDataset::n_features)
      .def_property_readonly("n_classes", &BinaryDataset::n_classes)
      .def_readonly("feature_names", &BinaryDataset::feature_names)
      .def_readonly("class_names", &BinaryDataset::class_names)
      .def_readonly("warnings", &BinaryDataset::warnings)
      .def_property_readonly("x",
                             [](const BinaryDataset& d) {
                               std::vector<std::vector<int>> out;
                               for (const auto& row : d.x) out.emplace_back(row.begin(), row.end());
                               return out;
                             })
      .def_readonly("y", &BinaryDataset::y)
      .def("class_counts", &BinaryDataset::class_counts)
      .def("subset", &BinaryDataset::subset, py::arg("rows"))
      .def("without_sources", &BinaryDataset::without_sources, py::arg("sources"))
      .def("__len__", &BinaryDataset::n_rows)
      .def("__repr__", [](const BinaryDataset& d) {
        return "<Dataset rows=" + std::to_string(d.n_rows()) + " features=" + std::to_string(d.n_features()) +
               " classes=" + std::to_string(d.n_classes()) + ">";
      });

  m.def("load_csv", &load, py::arg("path"), py::arg("label"), py::arg("kinds") = std::map<std::string, std::string>{},
        py::arg("strict_missing") = false, "Reads and binarizes a CSV file. An empty label reads an unlabelled file.");
  m.def("from_arrays", &from_arrays, py::arg("x"), py::arg("y"), py::arg("feature_names") = std::vector<std::string>{},
        py::arg("class_names") = std::vector<std::string>{}, "Dataset from a 0/1 matrix and class indices.");
  m.def(
      "split",
      [](const BinaryDataset& d, std::uint64_t seed, double train, double calibration, double test) {
        DatasetSplit s = split(d, SplitSpec{seed, train, calibration, test});
        return py::make_tuple(s.train, s.calibration, s.test);
      },
      py::arg("data"), py::arg("seed") = 0, py::arg("train") = 0.5, py::arg("calibration") = 0.25,
      py::arg("test") = 0.25);

  py::class_<TrainedTree>(m, "Tree")
      .def_readonly("depth", &TrainedTree::depth)
      .def_readonly("feature_names", &TrainedTree::feature_names)
      .def_readonly("class_names", &TrainedTree::class_names)
      .def_readonly("feature", &TrainedTree::feature)
      .def_property_readonly("leaf",
                             [](const TrainedTree& t) { return std::vector<bool>(t.leaf.begin(), t.leaf.end()); })
      .def_readonly("label", &TrainedTree::label)
      .def_readonly("objective", &TrainedTree::objective)
      .def_property_readonly("num_splits", &TrainedTree::num_splits)
      .def_property_readonly("status", [](const TrainedTree& t) { return t.stats.status; })
      .def_property_readonly("stats",
                             [](const TrainedTree& t) {
                               py::dict s;
                               s["status"] = t.stats.status;
                               s["engine"] = t.stats.engine;
                               s["formulation"] = t.stats.formulation;
                               s["lambda"] = t.stats.lambda;
                               s["bound"] = t.stats.bound;
                               s["gap"] = t.stats.gap;
                               s["nodes"] = t.stats.nodes;
                               s["cuts"] = t.stats.cuts;
                               s["seconds"] = t.stats.seconds;
                               return s;
                             })
      .def("predict", [](const TrainedTree& t, const BinaryDataset& d) { return predict_all(t, d); }, py::arg("data"))
      .def("to_json", [](const TrainedTree& t) { return to_json(t); })
      .def_static("from_json", &tree_from_json, py::arg("text"))
      .def("save", [](const TrainedTree& t, const std::string& path) { write_tree(t, path); }, py::arg("path"))
      .def_static("load", &read_tree, py::arg("path"));

  m.def("train", &train_py, py::arg("data"), py::kw_only(), py::arg("depth") = 2, py::arg("engine") = "flow",
        py::arg("formulation") = "flow-reg", py::arg("lambda_") = 0.0, py::arg("objective") = "accuracy",
        py::arg("max_splits") = py::none(), py::arg("max_features") = py::none(), py::arg("min_leaf") = py::none(),
        py::arg("recall_floor") = py::none(), py::arg("specificity_floor") = py::none(),
        py::arg("precision_floor") = py::none(), py::arg("fairness") = std::vector<std::string>{},
        py::arg("exclude_protected") = false, py::arg("time_limit") = py::none(), py::arg("threads") = 1,
        py::arg("node_batch") = 1,
        "Trains an optimal tree. fairness entries look like 'stat-parity:0.05:sex'.");

  m.def(
      "evaluate",
      [](const TrainedTree& t, const BinaryDataset& d, const std::string& group) {
        return metrics_dict(evaluate(t, d, group));
      },
      py::arg("tree"), py::arg("data"), py::arg("group") = "");

  m.def(
      "compare_relaxations",
      [](const BinaryDataset& d, int depth, double lambda) {
        const RelaxationReport r = compare_relaxations(d, depth, lambda);
        py::dict out;
        out["lambda"] = r.lambda;
        out["flow_bound"] = r.flow_bound;
        out["oct_bound"] = r.oct_bound;
        out["optimum"] = r.optimum;
        out["flow_ratio"] = r.flow_ratio;
        out["oct_ratio"] = r.oct_ratio;
        return out;
      },
      py::arg("data"), py::arg("depth") = 2, py::arg("lambda_") = 0.0);
}
