#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace hgcoop {

// minimize c'x  subject to  A x (<=, =, >=) b,  x >= 0.
class LinearProgram {
 public:
  enum class Sense { LessEqual, Equal, GreaterEqual };
  using Term = std::pair<std::size_t, double>;  // (variable, coefficient)

  struct Constraint {
    std::vector<Term> terms;
    Sense sense;
    double rhs;
  };

  explicit LinearProgram(std::size_t variables) : variables_(variables), objective_(variables, 0.0) {}

  std::size_t variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<double>& objective() const { return objective_; }

  void add_constraint(std::vector<Term> terms, Sense sense, double rhs);
  void set_objective(std::size_t variable, double coefficient) { objective_.at(variable) = coefficient; }

  // Largest violation of any constraint (or of x >= 0) at x.
  double max_violation(const std::vector<double>& x) const;

 private:
  std::size_t variables_;
  std::vector<Constraint> constraints_;
  std::vector<double> objective_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
std::string_view to_string(LpStatus status);

struct LpOptions {
  double feasibility_tolerance = 1e-10;
  double pivot_tolerance = 1e-11;
  double optimality_tolerance = 1e-12;
  std::size_t max_iterations = 200000;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  double max_violation = 0.0;
  // Phase-one optimum: sum of artificial variables. Positive means no point
  // satisfies the constraints (Farkas-type certificate).
  double infeasibility = 0.0;
};

// Two-phase dense simplex. Dantzig pricing, falling back to Bland's rule on
// long degenerate runs. The final basic solution is re-solved from the
// original data, so max_violation reflects the true residual.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

// Phase one only: a feasible point or a certified Infeasible verdict.
LpSolution find_feasible_point(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace hgcoop
