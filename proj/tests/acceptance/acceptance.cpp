// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero on any failure.
#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "flow_oracle.hpp"
#include "strongtree/benders.hpp"
#include "strongtree/branch_bound.hpp"
#include "strongtree/constraints.hpp"
#include "strongtree/formulations.hpp"
#include "strongtree/metrics.hpp"
#include "tree_oracle.hpp"

using namespace strongtree;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

// worst separation walk seen by any criterion, checked by criterion 10
struct VisitLog {
  long calls = 0;
  int worst_excess = -100;  // max over runs of visits - (depth + 2)
  int worst_visits = 0;

  void add(const SeparationStats& s, int depth) {
    if (s.calls == 0) return;
    calls += s.calls;
    worst_excess = std::max(worst_excess, s.max_visits - (depth + 2));
    worst_visits = std::max(worst_visits, s.max_visits);
  }
} visits;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<BinaryDataset> random_instances(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<BinaryDataset> out;
  while (static_cast<int>(out.size()) < count) {
    const int n = 8 + static_cast<int>(rng() % 9);
    const int f = 3 + static_cast<int>(rng() % 2);
    out.push_back(oracle::random_dataset(rng, n, f, 2));
  }
  return out;
}

const std::vector<BinaryDataset>& instances30() {
  static const std::vector<BinaryDataset> data = random_instances(2024, 30);
  return data;
}

TreeAssignment random_balanced(std::mt19937_64& rng, int depth, int F, int K) {
  TreeAssignment t = TreeAssignment::zeros(depth, F, K, false);
  for (int n = 1; n < tree_index::first_leaf(depth); ++n) t.b[n][rng() % F] = 1.0;
  for (int n = tree_index::first_leaf(depth); n <= tree_index::num_nodes(depth); ++n) t.w[n][rng() % K] = 1.0;
  return t;
}

TreeAssignment random_imbalanced(std::mt19937_64& rng, int depth, int F, int K) {
  TreeAssignment t = TreeAssignment::zeros(depth, F, K, true);
  std::vector<int> stack{1};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    if (tree_index::is_terminal(n, depth) || rng() % 3 == 0) {
      t.p[n] = 1.0;
      t.w[n][rng() % K] = 1.0;
      continue;
    }
    t.b[n][rng() % F] = 1.0;
    stack.push_back(tree_index::left(n));
    stack.push_back(tree_index::right(n));
  }
  return t;
}

Outcome brute_force_optimality() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int matched = 0;
  for (std::size_t k = 0; k < instances30().size(); ++k) {
    const BinaryDataset& d = instances30()[k];
    const MioResult r = solve_mio(build_flow_balanced(d, 2).model);
    const int want = oracle::best_balanced_correct(d, 2);
    const bool ok = r.status == MioStatus::Optimal && std::lround(r.objective) == want &&
                    std::abs(r.objective - want) < 1e-6;
    matched += ok;
    o.require(ok, "instance " + std::to_string(k) + fmt(": flow %.6f vs enumeration %.0f", r.objective, want));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, fmt("took %.1f s", secs));
  if (o.pass) o.detail = std::to_string(matched) + "/30 exact matches in " + fmt("%.2f s", secs);
  return o;
}

Outcome engine_equivalence() {
  Outcome o;
  int compared = 0;
  for (std::size_t k = 0; k < instances30().size(); ++k) {
    const BinaryDataset& d = instances30()[k];
    const MioResult flow = solve_mio(build_flow_balanced(d, 2).model);
    const BendersResult b = solve_benders(d, 2, 0.0, false);
    visits.add(b.separation, 2);
    ++compared;
    o.require(b.mio.status == MioStatus::Optimal && std::lround(b.mio.objective) == std::lround(flow.objective) &&
                  std::abs(b.mio.objective - flow.objective) < 1e-6,
              "balanced instance " + std::to_string(k) + fmt(": benders %.6f vs flow %.6f", b.mio.objective,
                                                            flow.objective));
  }
  const std::vector<BinaryDataset> extra = random_instances(77, 10);
  for (std::size_t k = 0; k < extra.size(); ++k) {
    const double lambda = k % 2 == 0 ? 0.0 : 0.3;
    const BinaryDataset& d = extra[k];
    const MioResult flow = solve_mio(build_flow_regularized(d, 2, lambda).model);
    const BendersResult b = solve_benders(d, 2, lambda, true);
    visits.add(b.separation, 2);
    ++compared;
    // (1 - lambda) * correct - lambda * splits lives on a lattice of spacing 0.1 here
    o.require(b.mio.status == MioStatus::Optimal && std::abs(b.mio.objective - flow.objective) < 1e-6,
              "regularized instance " + std::to_string(k) + fmt(": benders %.6f vs flow %.6f", b.mio.objective,
                                                               flow.objective));
  }
  if (o.pass) o.detail = std::to_string(compared) + " instances, equal objectives";
  return o;
}

Outcome separation_oracle() {
  Outcome o;
  std::mt19937_64 rng(500);
  int violated = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int depth = 1 + trial % 3;
    const int F = 1 + static_cast<int>(rng() % 3);
    const int K = 2 + static_cast<int>(rng() % 2);
    const bool imbalanced = trial % 2 == 1;
    const TreeAssignment t = imbalanced ? random_imbalanced(rng, depth, F, K) : random_balanced(rng, depth, F, K);
    std::vector<std::uint8_t> x(F);
    for (auto& v : x) v = rng() & 1;
    const int y = static_cast<int>(rng() % K);
    // g = 1 asks whether the datapoint can be routed at all
    const double g = 1.0;
    const FlowGraph graph = build_graph(depth, imbalanced ? GraphVariant::Imbalanced : GraphVariant::Balanced, K);
    const CapacityAssignment caps = instantiate_capacities(graph, x, y, t);
    const double flow = oracle::max_flow(graph, caps);
    SeparationStats stats;
    const auto S = imbalanced ? separate_regularized(t, g, x, y, 0, &stats) : separate_balanced(t, g, x, y, 0, &stats);
    visits.add(stats, depth);
    o.require(S.has_value() == (g > flow + 1e-9), "trial " + std::to_string(trial) + ": decision differs from max-flow");
    if (S) {
      ++violated;
      o.require(cut_capacity(*S, graph, caps) == 0.0, "trial " + std::to_string(trial) + ": cut capacity not 0");
    }
  }
  if (o.pass) o.detail = "500 assignments agree with max-flow; " + std::to_string(violated) + " violated, all cut capacities 0";
  return o;
}

Outcome single_datapoint_cut() {
  Outcome o;
  const BinaryDataset d = oracle::make_dataset({{0}}, {1});
  const Formulation master = build_benders_master(d, 1, 0.0, false);
  TreeAssignment t = TreeAssignment::zeros(1, 1, 2, false);
  t.b[1][0] = 1.0;  // b_11 = 1, w^2_1 = 0
  t.w[2][0] = 1.0;
  t.w[3][0] = 1.0;
  SeparationStats stats;
  const auto S = separate_balanced(t, 1.0, d.x[0], d.y[0], 0, &stats);
  visits.add(stats, 1);
  o.require(S.has_value(), "no violated cut found");
  if (!S) return o;
  const BendersCut cut = expand_cut(*S, master.layout.graph, d.x[0], d.y[0], master.layout.symbols);
  const int w21 = master.layout.symbols.w_at(2, 1);
  const int w31 = master.layout.symbols.w_at(3, 1);
  o.require(cut.rhs.constant == 0.0 && cut.rhs.terms.size() == 1 && cut.rhs.terms[0].var == w21 &&
                cut.rhs.terms[0].coef == 1.0,
            "cut is not g <= w^2_1");
  for (const Term& term : cut.rhs.terms) o.require(term.var != w31, "cut contains w^3_1");
  if (o.pass) o.detail = "S=" + S->describe() + ", cut g <= w^2_1";
  return o;
}

Outcome facet_witness_suite() {
  Outcome o;
  std::mt19937_64 rng(10);
  int cuts = 0;
  long points_checked = 0;
  while (cuts < 10) {
    const int F = 2 + static_cast<int>(rng() % 2);
    const BinaryDataset d = oracle::random_dataset(rng, 4, F, 2);
    const TreeAssignment base = random_balanced(rng, 2, F, 2);
    const Formulation m = build_benders_master(d, 2, 0.0, false);
    const auto all_sets = oracle::all_source_sets(m.layout.graph);
    for (int i = 0; i < d.n_rows() && cuts < 10; ++i) {
      const auto S = separate_balanced(base, 1.0, d.x[i], d.y[i], i);
      if (!S) continue;
      ++cuts;
      const BendersCut cut = expand_cut(*S, m.layout.graph, d.x[i], d.y[i], m.layout.symbols);
      const auto points = facet_witnesses(d, base, i);
      const int dim = 3 * F + 4 * 2 + d.n_rows();
      o.require(static_cast<int>(points.size()) == dim, "wrong witness count");
      if (static_cast<int>(points.size()) != dim) continue;
      Eigen::MatrixXd diffs(dim - 1, dim);
      const std::vector<double> first = flatten(points[0]);
      for (int k = 0; k < dim; ++k) {
        const MasterPoint& p = points[k];
        const std::vector<double> v = flatten(p);
        ++points_checked;
        const std::string where = "cut " + std::to_string(cuts) + " family " + std::to_string(p.family);
        for (int n = 1; n < 4; ++n) {
          double s = 0;
          for (double b : p.tree.b[n]) s += b;
          o.require(s <= 1.0 + 1e-12, where + ": branching sum above 1");
        }
        for (int n = 4; n < 8; ++n) o.require(p.tree.w[n][0] + p.tree.w[n][1] <= 1.0 + 1e-12, where + ": label sum above 1");
        for (int j = 0; j < d.n_rows(); ++j) {
          o.require(p.g[j] >= 0.0 && p.g[j] <= 1.0, where + ": g out of [0,1]");
          const auto caps = instantiate_capacities(m.layout.graph, d.x[j], d.y[j], p.tree);
          for (const SourceSet& T : all_sets) {
            o.require(p.g[j] <= cut_capacity(T, m.layout.graph, caps) + 1e-12, where + ": violates a cut inequality");
          }
        }
        o.require(std::abs(cut.rhs.evaluate(v) - v[m.layout.g[i]]) < 1e-12, where + ": cut not tight");
        if (k > 0) {
          for (int c = 0; c < dim; ++c) diffs(k - 1, c) = v[c] - first[c];
        }
      }
      o.require(Eigen::FullPivLU<Eigen::MatrixXd>(diffs).rank() == dim - 1, "witnesses not affinely independent");
    }
  }
  if (o.pass) o.detail = "10 cuts, " + std::to_string(points_checked) + " witness points feasible and tight";
  return o;
}

Outcome relaxation_dominance() {
  Outcome o;
  int strict = 0;
  double worst = -kInfinity;
  for (std::size_t k = 0; k < instances30().size(); ++k) {
    const BinaryDataset& d = instances30()[k];
    const double flow = lp_bound(build_flow_balanced(d, 2).model);
    const double oct = lp_bound(build_oct_baseline(d, 2, 0.0, true).model);
    worst = std::max(worst, flow - oct);
    o.require(flow <= oct + 1e-6, "instance " + std::to_string(k) + fmt(": flow %.6f above oct %.6f", flow, oct));
    strict += flow < oct - 1e-6;
  }
  o.require(strict > 0, "flow bound never strictly below OCT");
  if (o.pass) o.detail = std::to_string(strict) + "/30 strictly tighter" + fmt(", max(flow - oct) = %.2e", worst);
  return o;
}

Outcome regularized_separation() {
  Outcome o;
  const std::vector<std::uint8_t> x{1, 0};
  SeparationStats stats;
  TreeAssignment a = TreeAssignment::zeros(2, 2, 2, true);
  a.b[1][0] = 1.0;
  a.p[2] = 1.0;
  a.w[2][0] = 1.0;
  a.p[3] = 1.0;
  a.w[3][0] = 1.0;
  const auto S1 = separate_regularized(a, 1.0, x, 1, 0, &stats);
  o.require(S1 && S1->describe() == "{s,1,3}", "first configuration: " + (S1 ? S1->describe() : std::string("none")));

  TreeAssignment b = TreeAssignment::zeros(2, 2, 2, true);
  b.b[1][0] = 1.0;
  b.p[2] = 1.0;
  b.w[2][1] = 1.0;
  b.b[3][1] = 1.0;
  b.p[6] = 1.0;
  b.w[6][0] = 1.0;
  b.p[7] = 1.0;
  b.w[7][1] = 1.0;
  const auto S2 = separate_regularized(b, 1.0, x, 1, 0, &stats);
  o.require(S2 && S2->describe() == "{s,1,3,6}", "second configuration: " + (S2 ? S2->describe() : std::string("none")));
  visits.add(stats, 2);
  if (o.pass) o.detail = S1->describe() + " and " + S2->describe();
  return o;
}

double brute_imbalanced(const BinaryDataset& d, int depth, const std::function<bool(const TrainedTree&)>& ok) {
  double best = -kInfinity;
  oracle::for_each_tree(depth, d.n_features(), d.n_classes(), true, [&](const TrainedTree& t) {
    if (ok(t)) best = std::max(best, static_cast<double>(count_correct(t, d)));
  });
  return best;
}

Outcome side_constraints() {
  Outcome o;
  const std::vector<BinaryDataset> data = random_instances(88, 5);
  for (std::size_t k = 0; k < data.size(); ++k) {
    const BinaryDataset& d = data[k];
    const std::string tag = "instance " + std::to_string(k);
    Formulation sparse = build_flow_regularized(d, 2, 0.0);
    attach_sparsity(sparse, 0);
    const MioResult rs = solve_mio(sparse.model);
    o.require(rs.status == MioStatus::Optimal && extract_tree(sparse, rs.values).leaf[1], tag + ": C=0 did not give a single leaf");

    Formulation support = build_complete_flow(d, 2);
    attach_min_leaf(support, d.n_rows() + 1);
    const MioResult rm = solve_mio(support.model);
    o.require(rm.status == MioStatus::Optimal && extract_tree(support, rm.values).leaf[1],
              tag + ": N_min > |I| did not give a single leaf");
  }

  const std::vector<std::string> groups{"A", "A", "A", "B", "B", "B"};
  const BinaryDataset adv =
      oracle::make_dataset({{1, 0}, {1, 1}, {1, 0}, {0, 0}, {0, 1}, {0, 1}}, {1, 1, 1, 0, 0, 0});
  const double free = solve_mio(build_complete_flow(adv, 2).model).objective;
  FairnessSpec spec;
  spec.groups = groups;
  spec.delta = 1.0;
  Formulation loose = build_complete_flow(adv, 2);
  attach_fairness(loose, spec);
  const double loose_value = solve_mio(loose.model).objective;
  o.require(std::abs(loose_value - free) < 1e-6, fmt("delta=1 changed the optimum %.3f -> %.3f", free, loose_value));
  for (const BinaryDataset& d : data) {
    FairnessSpec any;
    any.delta = 1.0;
    for (int i = 0; i < d.n_rows(); ++i) any.groups.push_back(d.x[i][0] ? "g1" : "g0");
    Formulation f = build_complete_flow(d, 2);
    const double base = solve_mio(f.model).objective;
    attach_fairness(f, any);
    o.require(std::abs(solve_mio(f.model).objective - base) < 1e-6, "delta=1 changed a random optimum");
  }

  spec.delta = 0.0;
  Formulation strict = build_complete_flow(adv, 2);
  attach_fairness(strict, spec);
  const double strict_value = solve_mio(strict.model).objective;
  const double want = brute_imbalanced(adv, 2, [&](const TrainedTree& t) {
    const std::vector<int> pred = predict_all(t, adv);
    int a = 0, b = 0;
    for (int i = 0; i < 3; ++i) a += pred[i] == 1;
    for (int i = 3; i < 6; ++i) b += pred[i] == 1;
    return a == b;
  });
  o.require(strict_value < free - 0.5, fmt("delta=0 did not reduce the optimum (%.3f vs %.3f)", strict_value, free));
  o.require(std::abs(strict_value - want) < 1e-6, fmt("delta=0 optimum %.3f, brute force %.3f", strict_value, want));
  if (o.pass) o.detail = fmt("single leaf under C=0 and N_min>|I|; parity optimum %.0f -> %.0f (brute force)", free, strict_value);
  return o;
}

Outcome objective_algebra() {
  Outcome o;
  std::mt19937_64 rng(9);
  int solved = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const BinaryDataset d = oracle::random_dataset(rng, 8 + static_cast<int>(rng() % 5), 3, 2);
    const auto counts = d.class_counts();
    if (counts[0] == 0 || counts[1] == 0) continue;
    for (ObjectiveKind obj : {ObjectiveKind::Accuracy, ObjectiveKind::BalancedAccuracy,
                              ObjectiveKind::WorstCaseAccuracy, ObjectiveKind::Sensitivity}) {
      const Formulation f = build_complete_flow(d, 2, obj);
      const MioResult r = solve_mio(f.model);
      if (r.status != MioStatus::Optimal) {
        o.require(false, "complete flow not solved");
        continue;
      }
      ++solved;
      const TrainedTree t = extract_tree(f, r.values);
      const Metrics m = evaluate(t, d);
      const double best_class = *std::max_element(m.per_class_accuracy.begin(), m.per_class_accuracy.end());
      o.require(m.worst_case_accuracy <= m.balanced_accuracy + 1e-12 && m.balanced_accuracy <= best_class + 1e-12,
                "accuracy ordering violated");
      // confusion matrix aggregated from the flow equals the one recomputed from the tree
      std::vector<std::vector<double>> flow_confusion(2, std::vector<double>(2, 0.0));
      for (int i = 0; i < d.n_rows(); ++i) {
        for (int k = 0; k < 2; ++k) {
          for (const Term& term : predicted_flow_terms(f.layout, i, k)) flow_confusion[d.y[i]][k] += r.values[term.var];
        }
      }
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          o.require(std::lround(flow_confusion[a][b]) == m.confusion[a][b] &&
                        std::abs(flow_confusion[a][b] - m.confusion[a][b]) < 1e-6,
                    "flow confusion differs from tree confusion");
        }
      }
      const double tpr = double(m.confusion[1][1]) / counts[1];
      const double tnr = double(m.confusion[0][0]) / counts[0];
      double expect = 0.0;
      switch (obj) {
        case ObjectiveKind::Accuracy: expect = m.correct; break;
        case ObjectiveKind::BalancedAccuracy: expect = (tpr + tnr) / 2; break;
        case ObjectiveKind::WorstCaseAccuracy: expect = std::min(tpr, tnr); break;
        case ObjectiveKind::Sensitivity: expect = tpr; break;
      }
      o.require(std::abs(r.objective - expect) < 1e-6, std::string(to_string(obj)) + fmt(": objective %.6f vs rates %.6f", r.objective, expect));
    }
  }
  if (o.pass) o.detail = std::to_string(solved) + " complete-flow solves consistent";
  return o;
}

Outcome separation_complexity() {
  Outcome o;
  // more runs on deeper trees, on top of what the other criteria recorded
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    const int depth = 1 + trial % 3;
    const BinaryDataset d = oracle::random_dataset(rng, 10, 3, 2);
    visits.add(solve_benders(d, depth, 0.0, false).separation, depth);
    visits.add(solve_benders(d, depth, 0.2, true).separation, depth);
  }
  o.require(visits.calls > 0, "no separation calls recorded");
  o.require(visits.worst_excess <= 0, "a walk visited " + std::to_string(visits.worst_excess) + " nodes beyond depth+2");
  if (o.pass) {
    o.detail = std::to_string(visits.calls) + " calls, max visits " + std::to_string(visits.worst_visits) +
               ", worst margin to depth+2 = " + std::to_string(visits.worst_excess);
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"brute-force optimality", brute_force_optimality},
      {"engine equivalence", engine_equivalence},
      {"separation oracle equivalence", separation_oracle},
      {"single-datapoint strong cut", single_datapoint_cut},
      {"facet witness suite", facet_witness_suite},
      {"relaxation dominance", relaxation_dominance},
      {"regularized separation source sets", regularized_separation},
      {"side-constraint semantics", side_constraints},
      {"objective algebra", objective_algebra},
      {"separation complexity", separation_complexity},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
