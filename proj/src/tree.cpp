#include "strongtree/tree.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "strongtree/error.hpp"
#include "strongtree/flow_graph.hpp"

namespace strongtree {

using nlohmann::json;

TrainedTree TrainedTree::empty(int depth, std::vector<std::string> feature_names,
                               std::vector<std::string> class_names) {
  if (depth < 1) throw Error(ErrorCode::DepthTooSmall, "tree depth must be at least 1");
  TrainedTree t;
  t.depth = depth;
  t.feature_names = std::move(feature_names);
  t.class_names = std::move(class_names);
  const int nodes = tree_index::num_nodes(depth);
  t.feature.assign(nodes + 1, -1);
  t.leaf.assign(nodes + 1, 0);
  t.label.assign(nodes + 1, -1);
  return t;
}

std::vector<int> TrainedTree::reachable_nodes() const {
  std::vector<int> out;
  std::vector<int> stack{1};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    out.push_back(n);
    if (!leaf[n] && tree_index::is_branching(n, depth)) {
      stack.push_back(tree_index::right(n));
      stack.push_back(tree_index::left(n));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void TrainedTree::validate() const {
  const int nodes = tree_index::num_nodes(depth);
  if (static_cast<int>(feature.size()) != nodes + 1 || static_cast<int>(leaf.size()) != nodes + 1 ||
      static_cast<int>(label.size()) != nodes + 1) {
    throw Error(ErrorCode::SchemaError, "node arrays do not match the depth");
  }
  for (int n : reachable_nodes()) {
    if (leaf[n]) {
      if (label[n] < 0 || label[n] >= static_cast<int>(class_names.size())) {
        throw Error(ErrorCode::SchemaError, "leaf " + std::to_string(n) + " has no valid class");
      }
    } else if (!tree_index::is_branching(n, depth)) {
      throw Error(ErrorCode::SchemaError, "terminal node " + std::to_string(n) + " is not a leaf");
    } else if (feature[n] < 0 || feature[n] >= static_cast<int>(feature_names.size())) {
      throw Error(ErrorCode::SchemaError, "branching node " + std::to_string(n) + " has no valid feature");
    }
  }
}

int TrainedTree::num_splits() const {
  int s = 0;
  for (int n : reachable_nodes()) s += leaf[n] ? 0 : 1;
  return s;
}

int route(const TrainedTree& tree, std::span<const std::uint8_t> x) {
  int n = 1;
  while (!tree.leaf[n]) n = x[tree.feature[n]] == 0 ? tree_index::left(n) : tree_index::right(n);
  return n;
}

int predict(const TrainedTree& tree, std::span<const std::uint8_t> x) { return tree.label[route(tree, x)]; }

std::vector<int> predict_all(const TrainedTree& tree, const BinaryDataset& data) {
  if (data.n_features() != static_cast<int>(tree.feature_names.size())) {
    throw Error(ErrorCode::FeatureMismatch, "dataset has " + std::to_string(data.n_features()) +
                                                " features, tree expects " +
                                                std::to_string(tree.feature_names.size()));
  }
  std::vector<int> out;
  out.reserve(data.n_rows());
  for (const auto& row : data.x) out.push_back(predict(tree, row));
  return out;
}

int count_correct(const TrainedTree& tree, const BinaryDataset& data) {
  const std::vector<int> pred = predict_all(tree, data);
  int c = 0;
  for (int i = 0; i < data.n_rows(); ++i) c += pred[i] == data.y[i] ? 1 : 0;
  return c;
}

namespace {

const char* encoding_kind(FeatureEncoding::Kind k) {
  switch (k) {
    case FeatureEncoding::Kind::Passthrough: return "binary";
    case FeatureEncoding::Kind::Level: return "level";
    case FeatureEncoding::Kind::AtMost: return "at_most";
  }
  return "binary";
}

FeatureEncoding::Kind parse_encoding_kind(const std::string& s) {
  if (s == "binary") return FeatureEncoding::Kind::Passthrough;
  if (s == "level") return FeatureEncoding::Kind::Level;
  if (s == "at_most") return FeatureEncoding::Kind::AtMost;
  throw Error(ErrorCode::SchemaError, "unknown encoding kind '" + s + "'");
}

}  // namespace

std::string to_json(const TrainedTree& tree) {
  json j;
  j["schema"] = kTreeSchema;
  j["depth"] = tree.depth;
  j["feature_names"] = tree.feature_names;
  j["class_names"] = tree.class_names;
  json enc = json::array();
  for (const FeatureEncoding& e : tree.encoding) {
    json item{{"source", e.source}, {"kind", encoding_kind(e.kind)}};
    if (e.kind == FeatureEncoding::Kind::Level) item["level"] = e.level;
    if (e.kind == FeatureEncoding::Kind::AtMost) item["threshold"] = e.threshold;
    enc.push_back(item);
  }
  j["encoding"] = enc;
  json nodes = json::array();
  for (int n : tree.reachable_nodes()) {
    if (tree.leaf[n]) {
      nodes.push_back({{"id", n}, {"leaf", true}, {"class", tree.class_names[tree.label[n]]},
                       {"class_index", tree.label[n]}});
    } else {
      nodes.push_back({{"id", n}, {"leaf", false}, {"feature", tree.feature_names[tree.feature[n]]},
                       {"feature_index", tree.feature[n]}});
    }
  }
  j["nodes"] = nodes;
  j["objective"] = tree.objective;
  const TreeStats& s = tree.stats;
  j["stats"] = {{"status", s.status}, {"engine", s.engine}, {"formulation", s.formulation},
                {"lambda", s.lambda}, {"bound", s.bound}, {"gap", s.gap}, {"nodes", s.nodes},
                {"cuts", s.cuts}, {"seconds", s.seconds}};
  return j.dump(2);
}

TrainedTree tree_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != kTreeSchema) {
      throw Error(ErrorCode::SchemaError, "unsupported schema '" + j.at("schema").get<std::string>() + "'");
    }
    TrainedTree t = TrainedTree::empty(j.at("depth").get<int>(),
                                       j.at("feature_names").get<std::vector<std::string>>(),
                                       j.at("class_names").get<std::vector<std::string>>());
    if (j.contains("encoding")) {
      for (const json& e : j.at("encoding")) {
        FeatureEncoding fe;
        fe.source = e.at("source").get<std::string>();
        fe.kind = parse_encoding_kind(e.at("kind").get<std::string>());
        if (fe.kind == FeatureEncoding::Kind::Level) fe.level = e.at("level").get<std::string>();
        if (fe.kind == FeatureEncoding::Kind::AtMost) fe.threshold = e.at("threshold").get<long long>();
        t.encoding.push_back(fe);
      }
    }
    const int nodes = tree_index::num_nodes(t.depth);
    for (const json& node : j.at("nodes")) {
      const int id = node.at("id").get<int>();
      if (id < 1 || id > nodes) throw Error(ErrorCode::SchemaError, "node id " + std::to_string(id) + " out of range");
      if (node.at("leaf").get<bool>()) {
        t.leaf[id] = 1;
        t.label[id] = node.at("class_index").get<int>();
      } else {
        t.feature[id] = node.at("feature_index").get<int>();
      }
    }
    t.objective = j.value("objective", 0.0);
    if (j.contains("stats")) {
      const json& s = j.at("stats");
      t.stats.status = s.value("status", "");
      t.stats.engine = s.value("engine", "");
      t.stats.formulation = s.value("formulation", "");
      t.stats.lambda = s.value("lambda", 0.0);
      t.stats.bound = s.value("bound", 0.0);
      t.stats.gap = s.value("gap", 0.0);
      t.stats.nodes = s.value("nodes", 0L);
      t.stats.cuts = s.value("cuts", 0L);
      t.stats.seconds = s.value("seconds", 0.0);
    }
    t.validate();
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
}

void write_tree(const TrainedTree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << to_json(tree) << '\n';
}

TrainedTree read_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return tree_from_json(buf.str());
}

}  // namespace strongtree
