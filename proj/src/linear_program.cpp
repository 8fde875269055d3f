#include "hgcoop/linear_program.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hgcoop/errors.hpp"

namespace hgcoop {

void LinearProgram::add_constraint(std::vector<Term> terms, Sense sense, double rhs) {
  for (const auto& [var, coef] : terms) {
    if (var >= variables_) throw InvalidInput("constraint references an unknown variable");
    if (!std::isfinite(coef)) throw InvalidInput("constraint coefficient is not finite");
  }
  if (!std::isfinite(rhs)) throw InvalidInput("constraint right-hand side is not finite");
  constraints_.push_back({std::move(terms), sense, rhs});
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, -v);
  for (const auto& c : constraints_) {
    double lhs = 0.0;
    for (const auto& [var, coef] : c.terms) lhs += coef * x[var];
    const double diff = lhs - c.rhs;
    switch (c.sense) {
      case Sense::LessEqual: worst = std::max(worst, diff); break;
      case Sense::GreaterEqual: worst = std::max(worst, -diff); break;
      case Sense::Equal: worst = std::max(worst, std::abs(diff)); break;
    }
  }
  return worst;
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

using Sense = LinearProgram::Sense;

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LpOptions& options) : options_(options) {
    n_ = lp.variables();
    m_ = lp.constraints().size();

    std::vector<Sense> senses(m_);
    std::size_t slack_count = 0;
    std::size_t artificial_count = 0;
    for (std::size_t r = 0; r < m_; ++r) {
      Sense s = lp.constraints()[r].sense;
      if (lp.constraints()[r].rhs < 0.0) {
        if (s == Sense::LessEqual)
          s = Sense::GreaterEqual;
        else if (s == Sense::GreaterEqual)
          s = Sense::LessEqual;
      }
      senses[r] = s;
      if (s != Sense::Equal) ++slack_count;
      if (s != Sense::LessEqual) ++artificial_count;
    }
    first_artificial_ = n_ + slack_count;
    cols_ = first_artificial_ + artificial_count;
    width_ = cols_ + 1;
    t_.assign(m_ * width_, 0.0);
    basis_.assign(m_, 0);
    rhs_.resize(m_);

    std::size_t next_slack = n_;
    std::size_t next_artificial = first_artificial_;
    for (std::size_t r = 0; r < m_; ++r) {
      const auto& c = lp.constraints()[r];
      const double sign = c.rhs < 0.0 ? -1.0 : 1.0;
      for (const auto& [var, coef] : c.terms) at(r, var) += sign * coef;
      rhs_[r] = sign * c.rhs;
      at(r, cols_) = rhs_[r];
      switch (senses[r]) {
        case Sense::LessEqual:
          at(r, next_slack) = 1.0;
          basis_[r] = next_slack++;
          break;
        case Sense::GreaterEqual:
          at(r, next_slack++) = -1.0;
          at(r, next_artificial) = 1.0;
          basis_[r] = next_artificial++;
          break;
        case Sense::Equal:
          at(r, next_artificial) = 1.0;
          basis_[r] = next_artificial++;
          break;
      }
    }
    original_.assign(t_.begin(), t_.end());
  }

  // Returns the phase-one optimum (sum of artificials).
  double phase_one(LpStatus& status) {
    cost_.assign(width_, 0.0);
    for (std::size_t j = first_artificial_; j < cols_; ++j) cost_[j] = 1.0;
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] >= first_artificial_)
        for (std::size_t j = 0; j < width_; ++j) cost_[j] -= at(r, j);
    status = iterate(cols_);
    return -cost_[cols_];
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < first_artificial_) continue;
      std::size_t best = cols_;
      double best_abs = options_.pivot_tolerance;
      for (std::size_t j = 0; j < first_artificial_; ++j)
        if (std::abs(at(r, j)) > best_abs) {
          best_abs = std::abs(at(r, j));
          best = j;
        }
      if (best != cols_) pivot(r, best);
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
  }

  LpStatus phase_two(const std::vector<double>& objective) {
    cost_.assign(width_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = objective[j];
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = basis_[r] < n_ ? objective[basis_[r]] : 0.0;
      if (cb != 0.0)
        for (std::size_t j = 0; j < width_; ++j) cost_[j] -= cb * at(r, j);
    }
    return iterate(first_artificial_);
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] < n_) x[basis_[r]] = std::max(0.0, at(r, cols_));
    return x;
  }

  // Recompute the basic variables from the untouched constraint data.
  std::vector<double> refined_solution() const {
    if (m_ == 0) return std::vector<double>(n_, 0.0);
    Eigen::MatrixXd b(m_, m_);
    Eigen::VectorXd rhs(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      rhs(static_cast<Eigen::Index>(r)) = rhs_[r];
      for (std::size_t c = 0; c < m_; ++c)
        b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = original_[r * width_ + basis_[c]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    std::vector<double> x(n_, 0.0);
    if (!lu.isInvertible()) return solution();
    const Eigen::VectorXd xb = lu.solve(rhs);
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] < n_) x[basis_[r]] = std::max(0.0, xb(static_cast<Eigen::Index>(r)));
    return x;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    double* pr = &t_[row * width_];
    for (std::size_t j = 0; j < width_; ++j) pr[j] /= p;
    pr[col] = 1.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == row) continue;
      double* rr = &t_[r * width_];
      const double f = rr[col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) rr[j] -= f * pr[j];
      rr[col] = 0.0;
    }
    const double f = cost_[col];
    if (f != 0.0) {
      for (std::size_t j = 0; j < width_; ++j) cost_[j] -= f * pr[j];
      cost_[col] = 0.0;
    }
    basis_[row] = col;
    ++iterations_;
  }

  // Columns [0, allowed) may enter the basis.
  LpStatus iterate(std::size_t allowed) {
    std::vector<char> is_basic(cols_, 0);
    for (auto b : basis_) is_basic[b] = 1;
    bool bland = false;
    std::size_t degenerate_run = 0;
    while (true) {
      if (iterations_ >= options_.max_iterations) return LpStatus::IterationLimit;
      std::size_t enter = cols_;
      double most_negative = -options_.optimality_tolerance;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (is_basic[j] || cost_[j] >= most_negative) continue;
        enter = j;
        if (bland) break;
        most_negative = cost_[j];
      }
      if (enter == cols_) return LpStatus::Optimal;

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= options_.pivot_tolerance) continue;
        const double ratio = std::max(0.0, at(r, cols_)) / a;
        if (ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 && leave != m_ && basis_[r] < basis_[leave])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = r;
        }
      }
      if (leave == m_) return LpStatus::Unbounded;

      if (best_ratio <= 1e-14) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
      }
      is_basic[basis_[leave]] = 0;
      is_basic[enter] = 1;
      pivot(leave, enter);
    }
  }

  LpOptions options_;
  std::size_t n_ = 0, m_ = 0, cols_ = 0, width_ = 0, first_artificial_ = 0;
  std::vector<double> t_;
  std::vector<double> original_;
  std::vector<double> rhs_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;
  std::size_t iterations_ = 0;
};

LpSolution run(const LinearProgram& lp, const LpOptions& options, bool optimize) {
  Tableau tableau(lp, options);
  LpSolution out;
  LpStatus status{};
  out.infeasibility = tableau.phase_one(status);
  out.iterations = tableau.iterations();
  if (status == LpStatus::IterationLimit) {
    out.status = status;
    return out;
  }
  double scale = 1.0;
  for (const auto& c : lp.constraints()) scale = std::max(scale, std::abs(c.rhs));
  if (out.infeasibility > options.feasibility_tolerance * scale) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  tableau.drive_out_artificials();
  out.status = optimize ? tableau.phase_two(lp.objective()) : LpStatus::Optimal;
  out.iterations = tableau.iterations();
  if (out.status != LpStatus::Optimal) return out;

  out.x = tableau.solution();
  out.max_violation = lp.max_violation(out.x);
  auto refined = tableau.refined_solution();
  const double refined_violation = lp.max_violation(refined);
  if (refined_violation <= out.max_violation) {
    out.x = std::move(refined);
    out.max_violation = refined_violation;
  }
  out.objective = 0.0;
  for (std::size_t j = 0; j < lp.variables(); ++j) out.objective += lp.objective()[j] * out.x[j];
  return out;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) { return run(lp, options, true); }

LpSolution find_feasible_point(const LinearProgram& lp, const LpOptions& options) {
  return run(lp, options, false);
}

}  // namespace hgcoop
