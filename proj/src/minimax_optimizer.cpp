#include "hgcoop/minimax_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "hgcoop/errors.hpp"
#include "hgcoop/linear_program.hpp"
#include "hgcoop/region_sampler.hpp"

namespace hgcoop {

namespace {

using Sense = LinearProgram::Sense;

std::vector<double> normalized(std::vector<double> v) {
  double total = 0.0;
  for (auto& x : v) total += (x = std::max(0.0, x));
  if (!(total > 0.0)) throw NumericalFailure("feasibility oracle returned the zero vector");
  for (auto& x : v) x /= total;
  return v;
}

// Feasible point of the program-1 constraint set at level t, if any.
std::optional<std::vector<double>> endowments_at(const ThresholdKernel& kernel, double t, std::size_t& iterations) {
  const std::size_t n = kernel.size();
  LinearProgram lp(n);
  std::vector<LinearProgram::Term> simplex;
  for (std::size_t i = 0; i < n; ++i) simplex.push_back({i, 1.0});
  lp.add_constraint(std::move(simplex), Sense::Equal, 1.0);
  for (NodeId i = 0; i < n; ++i) {
    if (kernel.numerator(i) <= 0.0) continue;
    std::vector<LinearProgram::Term> row{{i, kernel.numerator(i)}};
    for (const auto& term : kernel.coupling(i)) row.push_back({term.node, -t * term.weight});
    lp.add_constraint(std::move(row), Sense::LessEqual, 0.0);
  }
  const auto sol = find_feasible_point(lp);
  iterations += sol.iterations;
  if (sol.status == LpStatus::Infeasible) return std::nullopt;
  if (sol.status != LpStatus::Optimal)
    throw NumericalFailure(std::string("feasibility oracle stopped: ") + std::string(to_string(sol.status)));
  return normalized(sol.x);
}

}  // namespace

OptimizationResult optimize_endowments(const Hypergraph& h, std::span<const double> r, const ContributionMatrix& x,
                                       double tolerance, GameOptions options) {
  if (!(tolerance > 0.0)) throw InvalidInput("optimizer tolerance must be positive");
  if (!x.is_full_cooperation(h, options.tolerance))
    throw InvalidInput("optimal endowments need a full-cooperation contribution matrix");
  const ThresholdKernel kernel(h, r, x, options);
  const std::size_t n = h.node_count();

  OptimizationResult out;
  const auto equal = EndowmentVector::equal(n);
  out.delta_star_equal = kernel.delta_star(equal.values());

  std::vector<double> best(equal.values().begin(), equal.values().end());
  double best_value = out.delta_star_equal;
  auto accept = [&](std::vector<double> e) {
    const double v = kernel.delta_star(e);
    if (v <= best_value) {
      best_value = v;
      best = std::move(e);
    }
  };

  double lo = 0.0;
  double hi = out.delta_star_equal;
  if (auto e0 = endowments_at(kernel, 0.0, out.iterations)) {
    accept(std::move(*e0));
    hi = 0.0;
  } else {
    if (std::isinf(hi)) {
      hi = 1.0;
      while (true) {
        if (auto e = endowments_at(kernel, hi, out.iterations)) {
          accept(std::move(*e));
          break;
        }
        lo = hi;
        hi *= 2.0;
        if (hi > 1e18) throw InvalidInput("no endowment vector gives a finite threshold");
      }
    }
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (auto e = endowments_at(kernel, mid, out.iterations)) {
        accept(std::move(*e));
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  out.t_low = lo;
  out.t_high = hi;
  out.gap = hi - lo;
  out.delta_star_opt = best_value;
  out.witness = EndowmentVector(std::move(best), 1e-9);
  return out;
}

OptimizationResult optimize_contributions(const Hypergraph& h, std::span<const double> r,
                                          std::span<const double> e, double tolerance, GameOptions options) {
  if (!(tolerance > 0.0)) throw InvalidInput("optimizer tolerance must be positive");
  const std::size_t n = h.node_count();
  if (e.size() != n) throw InvalidInput("endowment vector length does not match node count");
  EndowmentVector(std::vector<double>(e.begin(), e.end()), options.tolerance);
  for (NodeId i = 0; i < n; ++i)
    if (h.incidence(i).empty()) throw InvalidInput("node " + h.label(i) + " is isolated");

  const auto equal_x = equal_contributions(h);
  const ThresholdKernel equal_kernel(h, r, equal_x, options);

  OptimizationResult out;
  out.delta_star_equal = equal_kernel.delta_star(e);

  // Players that need dissuading, and whether anyone can dissuade them.
  std::vector<NodeId> active;
  for (NodeId i = 0; i < n; ++i) {
    if (!(equal_kernel.numerator(i) * e[i] > 0.0)) continue;
    active.push_back(i);
    bool reachable = false;
    for (const auto& inc : h.incidence(i)) {
      const auto mem = h.members(inc.edge);
      for (std::uint32_t s = 0; s < mem.size(); ++s)
        if (s != inc.slot && e[mem[s]] > 0.0) reachable = true;
    }
    if (!reachable)
      throw InvalidInput("player " + h.label(i) +
                         " can never be dissuaded: every co-member has zero endowment (structurally infeasible)");
  }
  if (active.empty()) {
    out.witness = equal_x;
    out.delta_star_opt = out.delta_star_equal;
    return out;
  }

  const std::size_t pins = h.edge_count() * h.edge_size();
  const std::size_t z = pins;
  auto base_program = [&](std::size_t extra) {
    LinearProgram lp(pins + 1 + extra);
    for (NodeId i = 0; i < n; ++i) {
      std::vector<LinearProgram::Term> row;
      for (const auto& inc : h.incidence(i)) row.push_back({inc.edge * h.edge_size() + inc.slot, 1.0});
      lp.add_constraint(std::move(row), Sense::Equal, 1.0);
    }
    return lp;
  };
  // D_i(X) - z n_i e_i  (>= rhs)
  auto dissuade_row = [&](NodeId i, double zcoef) {
    std::vector<LinearProgram::Term> row;
    for (const auto& inc : h.incidence(i)) {
      const auto mem = h.members(inc.edge);
      for (std::uint32_t s = 0; s < mem.size(); ++s) {
        if (s == inc.slot) continue;
        const double w = r[mem[s]] * e[mem[s]];
        if (w > 0.0) row.push_back({inc.edge * h.edge_size() + s, w});
      }
    }
    if (zcoef != 0.0) row.push_back({z, zcoef});
    return row;
  };

  LinearProgram lp = base_program(0);
  for (NodeId i : active) lp.add_constraint(dissuade_row(i, -equal_kernel.numerator(i) * e[i]), Sense::GreaterEqual, 0.0);
  lp.set_objective(z, -1.0);
  const auto sol = solve_lp(lp);
  out.iterations += sol.iterations;
  if (sol.status != LpStatus::Optimal)
    throw NumericalFailure(std::string("contribution program: ") + std::string(to_string(sol.status)));
  const double zstar = sol.x[z];
  if (!(zstar > 0.0)) throw NumericalFailure("contribution program returned a nonpositive optimum");

  std::vector<double> xs(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(pins));

  // Refine towards equal contributions on the optimal face.
  constexpr std::size_t kRefineLimit = 400;
  if (2 * pins + 2 <= kRefineLimit) {
    const double floor_z = zstar - 0.5 * tolerance * zstar * zstar;
    const auto eq = equal_x.pins();
    auto face = [&](std::size_t extra) {
      LinearProgram p = base_program(extra);
      for (NodeId i : active)
        p.add_constraint(dissuade_row(i, 0.0), Sense::GreaterEqual, floor_z * equal_kernel.numerator(i) * e[i]);
      return p;
    };
    // Stage 1: minimise s with |x_p - eq_p| <= s (the z column is unused).
    LinearProgram inf_lp = face(1);
    const std::size_t s = pins + 1;
    for (std::size_t p = 0; p < pins; ++p) {
      inf_lp.add_constraint({{p, 1.0}, {s, -1.0}}, Sense::LessEqual, eq[p]);
      inf_lp.add_constraint({{p, 1.0}, {s, 1.0}}, Sense::GreaterEqual, eq[p]);
    }
    inf_lp.set_objective(s, 1.0);
    const auto inf_sol = solve_lp(inf_lp);
    out.iterations += inf_sol.iterations;
    if (inf_sol.status == LpStatus::Optimal) {
      xs.assign(inf_sol.x.begin(), inf_sol.x.begin() + static_cast<std::ptrdiff_t>(pins));
      // Stage 2: minimise sum |x_p - eq_p| keeping the L-inf radius.
      const double radius = inf_sol.x[s] + 1e-12;
      LinearProgram l1 = face(pins);
      for (std::size_t p = 0; p < pins; ++p) {
        const std::size_t u = pins + 1 + p;
        l1.add_constraint({{p, 1.0}, {u, -1.0}}, Sense::LessEqual, eq[p]);
        l1.add_constraint({{p, 1.0}, {u, 1.0}}, Sense::GreaterEqual, eq[p]);
        l1.add_constraint({{u, 1.0}}, Sense::LessEqual, radius);
        l1.set_objective(u, 1.0);
      }
      const auto l1_sol = solve_lp(l1);
      out.iterations += l1_sol.iterations;
      if (l1_sol.status == LpStatus::Optimal)
        xs.assign(l1_sol.x.begin(), l1_sol.x.begin() + static_cast<std::ptrdiff_t>(pins));
    }
  }

  ContributionMatrix x(h);
  for (NodeId i = 0; i < n; ++i) {
    const auto inc = h.incidence(i);
    double total = 0.0;
    for (const auto& pin : inc) total += std::max(0.0, xs[pin.edge * h.edge_size() + pin.slot]);
    if (!(total > 0.0)) throw NumericalFailure("contribution program returned an empty row");
    for (const auto& pin : inc)
      x.at(pin.edge, pin.slot) = std::max(0.0, xs[pin.edge * h.edge_size() + pin.slot]) / total;
  }
  const double achieved = ThresholdKernel(h, r, x, options).delta_star(e);
  out.t_low = out.t_high = 1.0 / zstar;
  if (achieved <= out.delta_star_equal) {
    out.witness = std::move(x);
    out.delta_star_opt = achieved;
  } else {
    out.witness = equal_x;
    out.delta_star_opt = out.delta_star_equal;
  }
  out.gap = std::max(0.0, out.delta_star_opt - out.t_high);
  return out;
}

void InterventionConfig::validate() const {
  if (!(low_quantile > 0.0 && low_quantile < 1.0)) throw InvalidInput("low_quantile must lie in (0,1)");
  if (!(low_share >= 0.0 && low_share <= 1.0)) throw InvalidInput("low_share must lie in [0,1]");
  if (!(nudge >= 0.0)) throw InvalidInput("nudge step must be nonnegative");
}

EndowmentVector redistribute_endowments(const Hypergraph& h, const InterventionConfig& cfg, std::string* warning) {
  cfg.validate();
  const std::size_t n = h.node_count();
  if (n < 2) throw InvalidInput("redistribution needs at least two players");
  const auto low = static_cast<std::size_t>(std::floor(cfg.low_quantile * static_cast<double>(n)));
  if (low == 0 || low == n) {
    if (warning) *warning = "redistribution group is empty; using equal endowments";
    return EndowmentVector::equal(n);
  }
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return h.hyperdegree(a) < h.hyperdegree(b); });
  std::vector<double> e(n);
  const double lo_each = cfg.low_share / static_cast<double>(low);
  const double hi_each = (1.0 - cfg.low_share) / static_cast<double>(n - low);
  for (std::size_t rank = 0; rank < n; ++rank) e[order[rank]] = rank < low ? lo_each : hi_each;
  return EndowmentVector(std::move(e), 1e-12);
}

ContributionMatrix nudge_contributions(const Hypergraph& h, const ContributionMatrix& x, double delta) {
  if (!(delta >= 0.0)) throw InvalidInput("nudge step must be nonnegative");
  ContributionMatrix out = x;
  for (NodeId i = 0; i < h.node_count(); ++i) {
    const auto inc = h.incidence(i);
    if (inc.size() < 2) continue;
    // Every hyperedge has sigma - 1 co-members, so degree sums order like means.
    std::vector<std::pair<std::size_t, Incidence>> ranked;
    for (const auto& pin : inc) {
      std::size_t sum = 0;
      const auto mem = h.members(pin.edge);
      for (std::uint32_t s = 0; s < mem.size(); ++s)
        if (s != pin.slot) sum += h.hyperdegree(mem[s]);
      ranked.push_back({sum, pin});
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second.edge < b.second.edge;
    });
    if (ranked.front().first == ranked.back().first) continue;
    const auto up = ranked.front().second;
    const auto down = ranked.back().second;
    double& a = out.at(up.edge, up.slot);
    double& b = out.at(down.edge, down.slot);
    if (a + delta > 1.0 || b - delta < 0.0) continue;
    a += delta;
    b -= delta;
  }
  return out;
}

ContributionMatrix nudge_until_no_improvement(const Hypergraph& h, const ContributionMatrix& x, double delta,
                                              std::span<const double> e, std::span<const double> r,
                                              std::size_t max_passes, GameOptions options) {
  ContributionMatrix current = x;
  double value = ThresholdKernel(h, r, current, options).delta_star(e);
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    auto next = nudge_contributions(h, current, delta);
    const double v = ThresholdKernel(h, r, next, options).delta_star(e);
    if (!(v < value)) break;
    value = v;
    current = std::move(next);
  }
  return current;
}

}  // namespace hgcoop
