#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hgcoop/game.hpp"
#include "hgcoop/hypergraph.hpp"

namespace hgcoop {

struct OptimizationResult {
  double delta_star_opt = 0.0;  // delta* evaluated at the witness
  double delta_star_equal = 0.0;
  std::variant<EndowmentVector, ContributionMatrix> witness;
  std::size_t iterations = 0;
  double gap = 0.0;
  // Bisection certificate (program 1): t_low infeasible, t_high feasible.
  // Program 2 reports the LP optimum 1/z* as both ends.
  double t_low = 0.0;
  double t_high = 0.0;

  const EndowmentVector& endowments() const { return std::get<EndowmentVector>(witness); }
  const ContributionMatrix& contributions() const { return std::get<ContributionMatrix>(witness); }
};

// min_e max_i delta_i*(e) over the simplex for fixed (H, r, X), by bisection
// on t with an LP feasibility oracle for
//   (sigma - r_i) e_i <= t D_i(e),  sum e = 1,  e >= 0.
OptimizationResult optimize_endowments(const Hypergraph& h, std::span<const double> r, const ContributionMatrix& x,
                                       double tolerance = 1e-9, GameOptions options = {});

// min_X max_i delta_i*(X) for fixed (H, r, e), solved exactly as
//   max z  s.t.  D_i(X) >= z (sigma - r_i) e_i,  rows of X sum to 1,
// then delta*_opt = 1/z*. The optimal face is often not a point, so the
// witness is the optimum closest to equal contributions (L-inf, then L1).
OptimizationResult optimize_contributions(const Hypergraph& h, std::span<const double> r,
                                          std::span<const double> e, double tolerance = 1e-9,
                                          GameOptions options = {});

struct InterventionConfig {
  double low_quantile = 0.25;
  double low_share = 0.10;
  double nudge = 1e-4;

  void validate() const;
};

// Nodes sorted by (hyperdegree, id); the first floor(q N) share low_share
// equally and the rest share the remainder. An empty group falls back to
// equal endowments and sets *warning when given.
EndowmentVector redistribute_endowments(const Hypergraph& h, const InterventionConfig& cfg = {},
                                        std::string* warning = nullptr);

// One pass: every player with k_i >= 2 moves delta from the incident
// hyperedge whose co-members have the highest mean hyperdegree to the one
// with the lowest (ties by hyperedge id). Players whose extremes tie, or
// whose move would leave [0, 1], are skipped.
ContributionMatrix nudge_contributions(const Hypergraph& h, const ContributionMatrix& x, double delta);

// Repeats single passes while delta*(e) strictly decreases.
ContributionMatrix nudge_until_no_improvement(const Hypergraph& h, const ContributionMatrix& x, double delta,
                                              std::span<const double> e, std::span<const double> r,
                                              std::size_t max_passes = 1000, GameOptions options = {});

}  // namespace hgcoop
