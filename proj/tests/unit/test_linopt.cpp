#include <random>
#include <sstream>

#include "doctest.h"
#include "lp_oracle.hpp"
#include "strongtree/error.hpp"
#include "strongtree/simplex.hpp"

using namespace strongtree;

namespace {

LinearModel random_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> rel(0, 2);
  LinearModel model;
  for (int j = 0; j < n; ++j) model.add_variable("x" + std::to_string(j), 0.0, 1.0 + rng() % 3, false, coef(rng));
  for (int r = 0; r < m; ++r) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) {
      const int c = coef(rng);
      if (c != 0) terms.push_back({j, double(c)});
    }
    const int kind = rel(rng);
    model.add_constraint(terms, kind == 0 ? Relation::LessEqual : kind == 1 ? Relation::GreaterEqual : Relation::Equal,
                         double(coef(rng)) + (kind == 0 ? 3 : 0));
  }
  return model;
}

}  // namespace

TEST_CASE("solve_lp: documented examples") {
  LinearModel a;
  const int x = a.add_variable("x", 0, 10, false, 1.0);
  a.add_constraint({{x, 1.0}}, Relation::LessEqual, 1.0);
  auto sa = solve_lp(a);
  CHECK(sa.status == LpStatus::Optimal);
  CHECK(sa.objective == doctest::Approx(1.0));

  LinearModel b;
  const int u = b.add_variable("x", 0, 1, false, 1.0);
  const int v = b.add_variable("y", 0, 1, false, 1.0);
  b.add_constraint({{u, 1.0}, {v, 1.0}}, Relation::LessEqual, 1.0);
  auto sb = solve_lp(b);
  CHECK(sb.status == LpStatus::Optimal);
  CHECK(sb.objective == doctest::Approx(1.0));
  CHECK(b.max_violation(sb.values) <= 1e-7);
}

TEST_CASE("solve_lp: infeasible and unbounded") {
  LinearModel m;
  const int x = m.add_variable("x", 0, 1, false, 1.0);
  m.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 2.0);
  CHECK(solve_lp(m).status == LpStatus::Infeasible);

  LinearModel u;
  const int y = u.add_variable("y", 0, kInfinity, false, 1.0);
  const int z = u.add_variable("z", -kInfinity, kInfinity, false, 0.0);
  u.add_constraint({{y, 1.0}, {z, -1.0}}, Relation::LessEqual, 0.0);
  CHECK(solve_lp(u).status == LpStatus::Unbounded);
}

TEST_CASE("solve_lp: integer models need explicit relaxation") {
  LinearModel m;
  m.add_binary("b", 1.0);
  CHECK_THROWS_AS(solve_lp(m, false), Error);
  CHECK(solve_lp(m, true).objective == doctest::Approx(1.0));
}

TEST_CASE("solve_lp matches vertex enumeration on random LPs") {
  std::mt19937_64 rng(11);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 1 + trial % 4;
    LinearModel model = random_lp(rng, n, m);
    const auto expect = oracle::lp_by_vertices(model);
    const auto got = solve_lp(model);
    if (!expect) {
      CHECK(got.status == LpStatus::Infeasible);
      continue;
    }
    ++feasible;
    REQUIRE(got.status == LpStatus::Optimal);
    CHECK(got.objective == doctest::Approx(*expect).epsilon(1e-7));
    CHECK(model.max_violation(got.values) <= 1e-7);
    // weak duality against random feasible points: none may beat the optimum
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < 20; ++s) {
      std::vector<double> point(n);
      for (int j = 0; j < n; ++j) point[j] = unit(rng) * model.variable(j).upper;
      if (model.max_violation(point) == 0.0) CHECK(model.objective_value(point) <= got.objective + 1e-7);
    }
    // determinism
    CHECK(solve_lp(model).objective == got.objective);
  }
  CHECK(feasible > 50);
}

TEST_CASE("engine warm start agrees with cold solves") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    LinearModel model = random_lp(rng, 4, 3);
    SimplexEngine engine(model);
    engine.solve();
    auto saved = engine.basis();
    // tighten a bound, add a row, restore the older basis; compare to cold solves
    const int j = trial % 4;
    LinearModel tightened = model;
    tightened.set_bounds(j, 0.0, 0.5);
    engine.set_bounds(j, 0.0, 0.5);
    const auto warm = engine.solve();
    const auto cold = solve_lp(tightened);
    REQUIRE(warm == cold.status);
    if (warm == LpStatus::Optimal) CHECK(engine.objective() == doctest::Approx(cold.objective));

    Constraint cut{{{0, 1.0}, {1, 1.0}}, Relation::LessEqual, 1.0, "cut"};
    tightened.add_constraint(cut);
    engine.add_row(cut);
    engine.restore(saved);
    const auto warm2 = engine.solve();
    const auto cold2 = solve_lp(tightened);
    REQUIRE(warm2 == cold2.status);
    if (warm2 == LpStatus::Optimal) {
      CHECK(engine.objective() == doctest::Approx(cold2.objective));
      CHECK(tightened.max_violation(engine.primal()) <= 1e-7);
    }
  }
}

TEST_CASE("duals certify the optimum on a small LP") {
  // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
  LinearModel m;
  const int x = m.add_variable("x", 0, kInfinity, false, 3.0);
  const int y = m.add_variable("y", 0, kInfinity, false, 2.0);
  m.add_constraint({{x, 1}, {y, 1}}, Relation::LessEqual, 4);
  m.add_constraint({{x, 1}, {y, 3}}, Relation::LessEqual, 6);
  m.add_constraint({{x, 1}}, Relation::LessEqual, 3);
  auto s = solve_lp(m);
  CHECK(s.objective == doctest::Approx(11.0));
  const double dual_obj = 4 * s.duals[0] + 6 * s.duals[1] + 3 * s.duals[2];
  CHECK(dual_obj == doctest::Approx(11.0));
}

TEST_CASE("write_lp emits a readable LP file") {
  LinearModel m;
  const int b = m.add_binary("b[1,0]", 1.0);
  const int g = m.add_variable("g0", 0, 1, false, 2.0);
  m.add_constraint({{b, 1}, {g, -1}}, Relation::GreaterEqual, 0, "link");
  std::ostringstream out;
  m.write_lp(out);
  const std::string text = out.str();
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("link: + 1 b[1_0] - 1 g0 >= 0") != std::string::npos);
  CHECK(text.find("General\n b[1_0]") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
