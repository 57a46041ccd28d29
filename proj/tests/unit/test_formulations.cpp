#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "strongtree/branch_bound.hpp"
#include "strongtree/error.hpp"
#include "strongtree/formulations.hpp"
#include "tree_oracle.hpp"

using namespace strongtree;

namespace {

MioResult solve(const Formulation& f) {
  const MioResult r = solve_mio(f.model);
  REQUIRE(r.status == MioStatus::Optimal);
  return r;
}

int correct_from_flows(const Formulation& f, const std::vector<double>& v) {
  double total = 0.0;
  for (int i = 0; i < f.data.n_rows(); ++i) {
    double c = 0.0;
    for (const Term& t : correct_flow_terms(f.layout, f.data, i)) c += v[t.var];
    CHECK((std::abs(c) < 1e-6 || std::abs(c - 1.0) < 1e-6));
    total += c;
  }
  return static_cast<int>(std::lround(total));
}

void check_conservation(const Formulation& f, const std::vector<double>& v) {
  const FlowGraph& g = f.layout.graph;
  const int nodes = tree_index::num_nodes(g.depth);
  for (int i = 0; i < f.data.n_rows(); ++i) {
    std::vector<double> net(nodes + 1, 0.0);
    for (std::size_t a = 0; a < g.arcs.size(); ++a) {
      const double z = v[f.layout.z[i][a]];
      if (g.arcs[a].to <= nodes) net[g.arcs[a].to] += z;
      if (g.arcs[a].from >= 1) net[g.arcs[a].from] -= z;
    }
    for (int n = 1; n <= nodes; ++n) CHECK(std::abs(net[n]) < 1e-6);
  }
}

BinaryDataset single_point() { return oracle::make_dataset({{0}}, {1}); }

}  // namespace

TEST_CASE("flow_balanced: variable count and structure") {
  const BinaryDataset d = oracle::make_dataset({{1}}, {0});
  const Formulation f = build_flow_balanced(d, 2);
  CHECK(f.model.num_variables() == 22);
  for (const Variable& v : f.model.variables()) CHECK(v.is_integer);

  std::mt19937_64 rng(3);
  const BinaryDataset soy = oracle::random_dataset(rng, 47, 45, 4);
  const Formulation s = build_flow_balanced(soy, 2);
  int b_count = 0;
  for (const Variable& v : s.model.variables()) b_count += v.name.rfind("b[", 0) == 0 ? 1 : 0;
  CHECK(b_count == 3 * 45);

  CHECK_THROWS_AS(build_flow_balanced(d, 0), Error);
}

TEST_CASE("flow_balanced: single-datapoint LP bound and optimum") {
  const Formulation f = build_flow_balanced(single_point(), 1);
  CHECK(lp_bound(f.model) == doctest::Approx(1.0));
  const MioResult r = solve(f);
  CHECK(r.objective == doctest::Approx(1.0));
  const TrainedTree t = extract_tree(f, r.values);
  CHECK(count_correct(t, f.data) == 1);
}

TEST_CASE("flow_balanced: contradictory duplicates cap the optimum") {
  const BinaryDataset d = oracle::make_dataset({{0, 1}, {0, 1}, {1, 0}}, {0, 1, 1});
  const MioResult r = solve(build_flow_balanced(d, 2));
  CHECK(r.objective <= d.n_rows() - 1 + 1e-9);
  CHECK(std::lround(r.objective) == oracle::best_balanced_correct(d, 2));
}

TEST_CASE("flow formulations match brute force on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 7);
    const int F = 2 + static_cast<int>(rng() % 2);
    const BinaryDataset d = oracle::random_dataset(rng, n, F);
    CAPTURE(trial);

    const Formulation fb = build_flow_balanced(d, 2);
    const MioResult rb = solve(fb);
    const int best = oracle::best_balanced_correct(d, 2);
    CHECK(std::lround(rb.objective) == best);
    const TrainedTree tb = extract_tree(fb, rb.values);
    CHECK(count_correct(tb, d) == best);
    CHECK(correct_from_flows(fb, rb.values) == best);
    check_conservation(fb, rb.values);

    for (double lambda : {0.0, 0.3}) {
      const Formulation fr = build_flow_regularized(d, 2, lambda);
      const MioResult rr = solve(fr);
      CHECK(rr.objective == doctest::Approx(oracle::best_regularized(d, 2, lambda)).epsilon(1e-9));
      const TrainedTree tr = extract_tree(fr, rr.values);
      CHECK((1 - lambda) * count_correct(tr, d) - lambda * tr.num_splits() ==
            doctest::Approx(rr.objective));
      check_conservation(fr, rr.values);
      if (lambda == 0.0) CHECK(rr.objective >= rb.objective - 1e-9);
    }

    const Formulation fc = build_complete_flow(d, 2);
    const MioResult rc = solve(fc);
    CHECK(rc.objective == doctest::Approx(oracle::best_regularized(d, 2, 0.0)));
    check_conservation(fc, rc.values);
    CHECK(count_correct(extract_tree(fc, rc.values), d) == std::lround(rc.objective));
  }
}

TEST_CASE("flow_regularized: lambda extremes and hand-computed optimum") {
  const BinaryDataset d = oracle::make_dataset({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 0, 1, 1});
  const Formulation f1 = build_flow_regularized(d, 2, 1.0);
  const MioResult r1 = solve(f1);
  CHECK(r1.objective == doctest::Approx(0.0));
  const TrainedTree t1 = extract_tree(f1, r1.values);
  CHECK(t1.leaf[1]);

  const MioResult r = solve(build_flow_regularized(d, 2, 0.1));
  CHECK(r.objective == doctest::Approx(0.9 * 4 - 0.1));
  CHECK_THROWS_AS(build_flow_regularized(d, 2, 1.5), Error);
}

TEST_CASE("complete_flow: balanced accuracy of a forced single-class tree") {
  std::vector<std::vector<std::uint8_t>> x(10, {1});
  std::vector<int> y(10, 1);
  y[9] = 0;
  const BinaryDataset d = oracle::make_dataset(x, y);
  const MioResult r = solve(build_complete_flow(d, 1, ObjectiveKind::BalancedAccuracy));
  CHECK(r.objective == doctest::Approx(0.5));
}

TEST_CASE("oct_baseline: MIO optimum equals flow and LP bound dominance") {
  std::mt19937_64 rng(5);
  bool strict = false;
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 4);
    const BinaryDataset d = oracle::random_dataset(rng, n, 2);
    CAPTURE(trial);
    const Formulation oct = build_oct_baseline(d, 2, 0.0);
    const MioResult ro = solve(oct);
    const MioResult rf = solve(build_flow_regularized(d, 2, 0.0));
    CHECK(ro.objective == doctest::Approx(rf.objective));
    const TrainedTree t = extract_tree(oct, ro.values);
    CHECK(count_correct(t, d) == std::lround(ro.objective));

    const double flow_lp = lp_bound(build_flow_balanced(d, 2).model);
    const double oct_lp = lp_bound(build_oct_baseline(d, 2, 0.0, true).model);
    CHECK(flow_lp <= oct_lp + 1e-6);
    strict = strict || flow_lp < oct_lp - 1e-6;
    CHECK(lp_bound(build_flow_regularized(d, 2, 0.0).model) <= lp_bound(oct.model) + 1e-6);
  }
  CHECK(strict);
}

TEST_CASE("oct_baseline: single datapoint misclassification count") {
  const Formulation f = build_oct_baseline(single_point(), 1, 0.0);
  const MioResult r = solve(f);
  CHECK(r.objective == doctest::Approx(1.0));
}

TEST_CASE("extract_tree rejects bad assignments") {
  const Formulation f = build_flow_balanced(single_point(), 1);
  std::vector<double> v(f.model.num_variables(), 0.0);
  v[f.layout.symbols.b[1][0]] = 0.5;
  CHECK_THROWS_WITH_AS(extract_tree(f, v), doctest::Contains("NonIntegralAssignment"), Error);
  v[f.layout.symbols.b[1][0]] = 0.0;
  CHECK_THROWS_WITH_AS(extract_tree(f, v), doctest::Contains("InfeasibleAssignment"), Error);
}

TEST_CASE("objective lattice") {
  CHECK(objective_lattice(0.0) == 1.0);
  CHECK(objective_lattice(0.3) == doctest::Approx(0.1));
  CHECK(objective_lattice(0.25) == doctest::Approx(0.25));
  CHECK(objective_lattice(1.0 / 3.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("timing: 30 balanced depth-2 instances") {
  std::mt19937_64 rng(2024);
  const auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 8 + static_cast<int>(rng() % 9);
    const int F = 3 + static_cast<int>(rng() % 2);
    const BinaryDataset d = oracle::random_dataset(rng, n, F);
    const MioResult r = solve(build_flow_balanced(d, 2));
    CHECK(std::lround(r.objective) == oracle::best_balanced_correct(d, 2));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("30 instances in " << secs << " s");
  CHECK(secs < 60.0);
}
