#include <limits>

#include "doctest.h"
#include "hgcoop/errors.hpp"
#include "hgcoop/linear_program.hpp"
#include "hgcoop/rng.hpp"

using namespace hgcoop;
using Sense = LinearProgram::Sense;

TEST_CASE("small optimum") {
  // max 3a + 2b  s.t.  a + b <= 4, a + 3b <= 6, a <= 3
  LinearProgram lp(2);
  lp.add_constraint({{0, 1}, {1, 1}}, Sense::LessEqual, 4);
  lp.add_constraint({{0, 1}, {1, 3}}, Sense::LessEqual, 6);
  lp.add_constraint({{0, 1}}, Sense::LessEqual, 3);
  lp.set_objective(0, -3);
  lp.set_objective(1, -2);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(3));
  CHECK(s.x[1] == doctest::Approx(1));
  CHECK(s.objective == doctest::Approx(-11));
  CHECK(s.max_violation <= 1e-12);
}

TEST_CASE("equality and >= rows") {
  // min a + 2b + 3c  s.t.  a + b + c = 1, b + c >= 0.5, c >= 0.2
  LinearProgram lp(3);
  lp.add_constraint({{0, 1}, {1, 1}, {2, 1}}, Sense::Equal, 1);
  lp.add_constraint({{1, 1}, {2, 1}}, Sense::GreaterEqual, 0.5);
  lp.add_constraint({{2, 1}}, Sense::GreaterEqual, 0.2);
  lp.set_objective(0, 1);
  lp.set_objective(1, 2);
  lp.set_objective(2, 3);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(0.5));
  CHECK(s.x[1] == doctest::Approx(0.3));
  CHECK(s.x[2] == doctest::Approx(0.2));
}

TEST_CASE("negative right-hand sides") {
  // -a - b <= -2 means a + b >= 2
  LinearProgram lp(2);
  lp.add_constraint({{0, -1}, {1, -1}}, Sense::LessEqual, -2);
  lp.set_objective(0, 1);
  lp.set_objective(1, 1);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(2));
}

TEST_CASE("infeasible and unbounded") {
  LinearProgram bad(2);
  bad.add_constraint({{0, 1}, {1, 1}}, Sense::Equal, 1);
  bad.add_constraint({{0, 1}, {1, 1}}, Sense::GreaterEqual, 2);
  const auto s = solve_lp(bad);
  CHECK(s.status == LpStatus::Infeasible);
  CHECK(s.infeasibility > 0.5);
  CHECK(find_feasible_point(bad).status == LpStatus::Infeasible);

  LinearProgram open(2);
  open.add_constraint({{0, 1}, {1, -1}}, Sense::LessEqual, 1);
  open.set_objective(1, -1);
  CHECK(solve_lp(open).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate and redundant rows") {
  LinearProgram lp(3);
  lp.add_constraint({{0, 1}, {1, 1}, {2, 1}}, Sense::Equal, 1);
  lp.add_constraint({{0, 2}, {1, 2}, {2, 2}}, Sense::Equal, 2);  // redundant
  lp.add_constraint({{0, 1}, {1, -1}}, Sense::LessEqual, 0);
  lp.add_constraint({{1, 1}, {2, -1}}, Sense::LessEqual, 0);
  lp.add_constraint({{0, 1}}, Sense::GreaterEqual, 0);
  lp.set_objective(2, 1);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0 / 3));
  CHECK(s.max_violation <= 1e-12);
}

TEST_CASE("rejects non-finite data") {
  LinearProgram lp(1);
  CHECK_THROWS_AS(lp.add_constraint({{0, 1}}, Sense::LessEqual, std::numeric_limits<double>::quiet_NaN()), InvalidInput);
  CHECK_THROWS_AS(lp.add_constraint({{1, 1}}, Sense::LessEqual, 1), InvalidInput);
}

TEST_CASE("feasible points of random simplex-constrained systems") {
  // sum y = 1, y >= 0, random rows A y <= b with b chosen so a known point fits.
  Engine rng(12);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + uniform_below(rng, 8);
    std::vector<double> y0(n);
    double total = 0;
    for (auto& v : y0) total += (v = exponential1(rng));
    for (auto& v : y0) v /= total;
    LinearProgram lp(n);
    std::vector<LinearProgram::Term> ones;
    for (std::size_t j = 0; j < n; ++j) ones.push_back({j, 1.0});
    lp.add_constraint(ones, Sense::Equal, 1);
    for (std::size_t row = 0; row < n; ++row) {
      std::vector<LinearProgram::Term> terms;
      double lhs = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double a = 2 * uniform01(rng) - 1;
        terms.push_back({j, a});
        lhs += a * y0[j];
      }
      lp.add_constraint(terms, Sense::LessEqual, lhs + 0.01 * uniform01(rng));
    }
    const auto s = find_feasible_point(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.max_violation <= 1e-10);
  }
}
