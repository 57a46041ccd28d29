#include <optional>
#include <random>

#include "doctest.h"
#include "strongtree/branch_bound.hpp"
#include "strongtree/simplex.hpp"

using namespace strongtree;

namespace {

// exhaustive optimum over binaries of a pure binary model
std::optional<double> enumerate_binary(const LinearModel& m) {
  const int n = m.num_variables();
  std::optional<double> best;
  std::vector<double> x(n);
  for (long mask = 0; mask < (1L << n); ++mask) {
    for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1;
    if (m.max_violation(x) > 1e-9) continue;
    const double v = m.objective_value(x);
    if (!best || v > *best) best = v;
  }
  return best;
}

}  // namespace

TEST_CASE("solve_mio: documented examples") {
  LinearModel lp;
  const int a = lp.add_variable("a", 0, 3, false, 1.0);
  lp.add_constraint({{a, 2.0}}, Relation::LessEqual, 3.0);
  const auto r = solve_mio(lp);
  CHECK(r.status == MioStatus::Optimal);
  CHECK(r.objective == doctest::Approx(solve_lp(lp).objective));

  LinearModel m;
  const int x = m.add_binary("x", 1.0);
  const int y = m.add_binary("y", 1.0);
  m.add_constraint({{x, 1}, {y, 1}}, Relation::LessEqual, 1.5);
  const auto s = solve_mio(m);
  CHECK(s.status == MioStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0));
  CHECK(s.gap <= 1e-6);
}

TEST_CASE("solve_mio: infeasible model") {
  LinearModel m;
  const int x = m.add_binary("x");
  const int y = m.add_binary("y");
  m.add_constraint({{x, 2}, {y, 2}}, Relation::Equal, 1.0);
  CHECK(solve_mio(m).status == MioStatus::Infeasible);
}

TEST_CASE("solve_mio matches enumeration on random knapsack-like models") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coef(-2, 5);
  for (int trial = 0; trial < 120; ++trial) {
    LinearModel m;
    const int n = 4 + trial % 6;
    for (int j = 0; j < n; ++j) m.add_binary("x" + std::to_string(j), coef(rng));
    for (int r = 0; r < 3; ++r) {
      std::vector<Term> t;
      for (int j = 0; j < n; ++j) t.push_back({j, double(coef(rng))});
      m.add_constraint(t, r == 2 ? Relation::GreaterEqual : Relation::LessEqual, r == 2 ? -1.0 : 4.0);
    }
    const auto expect = enumerate_binary(m);
    SolverConfig cfg;
    const auto got = solve_mio(m, {}, cfg);
    if (!expect) {
      CHECK(got.status == MioStatus::Infeasible);
      continue;
    }
    REQUIRE(got.status == MioStatus::Optimal);
    CHECK(got.objective == doctest::Approx(*expect));
    CHECK(m.max_violation(got.values) <= 1e-7);
    CHECK(got.stats.nodes <= (2L << n));
    // batch evaluation gives identical results for any thread count
    cfg.node_batch = 4;
    cfg.threads = 1;
    const auto b1 = solve_mio(m, {}, cfg);
    cfg.threads = 3;
    const auto b3 = solve_mio(m, {}, cfg);
    CHECK(b1.objective == doctest::Approx(*expect));
    CHECK(b1.values == b3.values);
    CHECK(b1.stats.nodes == b3.stats.nodes);
  }
}

TEST_CASE("lazy separator: cuts are enforced before acceptance") {
  // max x + y + z over binaries; lazily forbid any pair being both 1
  LinearModel m;
  for (int j = 0; j < 3; ++j) m.add_binary("v" + std::to_string(j), 1.0 + 0.1 * j);
  int calls = 0;
  LazySeparator sep = [&](std::span<const double> x) {
    ++calls;
    std::vector<Constraint> out;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        if (x[a] + x[b] > 1.5) out.push_back({{{a, 1.0}, {b, 1.0}}, Relation::LessEqual, 1.0, "pair"});
    return out;
  };
  const auto r = solve_mio(m, sep);
  CHECK(r.status == MioStatus::Optimal);
  CHECK(r.objective == doctest::Approx(1.2));
  CHECK(r.stats.cuts == static_cast<long>(r.cut_pool.size()));
  CHECK(calls >= 2);
  for (const Constraint& c : r.cut_pool) CHECK(c.violation(r.values) == 0.0);
}

TEST_CASE("progress log lines follow the documented format") {
  LinearModel m;
  const int x = m.add_binary("x", 1.0);
  const int y = m.add_binary("y", 1.0);
  m.add_constraint({{x, 2}, {y, 2}}, Relation::LessEqual, 3.0);
  std::vector<std::string> lines;
  SolverConfig cfg;
  cfg.log = [&](const std::string& s) { lines.push_back(s); };
  solve_mio(m, {}, cfg);
  REQUIRE(!lines.empty());
  CHECK(lines.back().rfind("node=", 0) == 0);
  CHECK(lines.back().find(" bound=") != std::string::npos);
  CHECK(lines.back().find(" incumbent=") != std::string::npos);
  CHECK(lines.back().find(" gap=") != std::string::npos);
  CHECK(lines.back().find(" cuts=") != std::string::npos);
}

TEST_CASE("time limit returns the incumbent so far") {
  LinearModel m;
  m.add_binary("x", 1.0);
  SolverConfig cfg;
  cfg.time_limit = -1.0;
  const auto r = solve_mio(m, {}, cfg);
  CHECK(r.status == MioStatus::TimeLimit);
  CHECK_FALSE(r.has_incumbent);
}
