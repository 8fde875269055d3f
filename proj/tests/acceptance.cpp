// Acceptance run: one PASS/FAIL line per criterion, tolerances and time
// limits pinned below. Exit status is nonzero when any line fails.
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/SparseCore>

#include "hgcoop/empirical.hpp"
#include "hgcoop/evolution_chain.hpp"
#include "hgcoop/harness.hpp"
#include "hgcoop/io.hpp"
#include "hgcoop/minimax_optimizer.hpp"
#include "hgcoop/region_sampler.hpp"
#include "oracles.hpp"

using namespace hgcoop;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double dense_delta_star(const Hypergraph& h, std::span<const double> r, const ContributionMatrix& x,
                        std::span<const double> e) {
  return oracle::delta_star(oracle::densify(h, x, e, r));
}

// 1. Homogeneous closed form.
Outcome closed_form() {
  Outcome o;
  std::vector<Hypergraph> graphs;
  for (std::size_t n : {3, 4, 5, 6, 100}) graphs.push_back(structures::fully_connected(n, 3));
  graphs.push_back(structures::ring_of_four());
  graphs.push_back(structures::six_node_three_regular());
  graphs.push_back(structures::circulant(100, 3));
  double worst = 0.0, at_two = 0.0;
  for (const auto& h : graphs) {
    const auto n = h.node_count();
    const auto x = equal_contributions(h);
    for (double r : {1.2, 1.5, 2.0, 2.5, 2.9}) {
      const auto rep = threshold_report(
          GameInstance(h, EndowmentVector::equal(n), ProductivityProfile::symmetric(n, r), x));
      worst = std::max(worst, std::abs(rep.delta_star - (3.0 - r) / (r * 2.0)));
      if (r == 2.0) at_two = std::max(at_two, std::abs(rep.delta_star - 0.25));
    }
  }
  o.require(worst <= 1e-12, "max |delta* - (s-r)/(r(s-1))| = " + fmt(worst) + " <= 1e-12");
  o.require(at_two <= 1e-12, "r = 2: max |delta* - 0.25| = " + fmt(at_two) + " <= 1e-12");
  return o;
}

// 2. Grim equilibrium holds exactly when delta >= delta*.
Outcome grim_equivalence() {
  Outcome o;
  Engine rng(20240602);
  std::size_t disagreements = 0, checks = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto h = oracle::random_hypergraph(rng, 4, 30);
    const auto n = h.node_count();
    const auto x = oracle::random_full_contributions(h, rng);
    const auto e = oracle::random_simplex(n, rng);
    const auto r = oracle::random_productivity(n, 3, rng);
    const double ds = dense_delta_star(h, r, x, e);
    std::vector<double> deltas{uniform01(rng)};
    if (ds < 1.0) {
      deltas.push_back(ds * (1.0 + 1e-9) > 1.0 ? 1.0 : ds * (1.0 + 1e-9));
      deltas.push_back(ds * (1.0 - 1e-9));
    }
    for (double d : deltas) {
      const GameInstance g(h, EndowmentVector(e), ProductivityProfile(r), x, d);
      ++checks;
      if (grim_is_equilibrium(g) != (d >= ds - 1e-12)) ++disagreements;
    }
  }
  o.require(disagreements == 0, std::to_string(disagreements) + " disagreements in " + std::to_string(checks) +
                                     " checks on 1000 instances");
  return o;
}

// 3. Two-edge game with r = 1.38.
Outcome two_edge_case() {
  Outcome o;
  const auto h = structures::two_edge();
  const std::vector<double> r(4, 1.38);
  const auto x = equal_contributions(h);
  const GameInstance g(h, EndowmentVector::equal(4), ProductivityProfile(r), x, 0.9);
  const auto rep = threshold_report(g);
  const double hand = (3.0 - 1.38) / 1.38;
  o.require(std::abs(rep.delta_star - hand) <= 1e-12, "equal delta* = " + fmt(rep.delta_star) + " vs 1.62/1.38 (1e-12)");
  o.require(!grim_is_equilibrium(g), "equal endowments infeasible at 0.9");
  const auto res = optimize_endowments(h, r, x);
  const auto e = res.endowments().values();
  o.require(res.delta_star_opt <= 0.9, "delta*_opt = " + fmt(res.delta_star_opt) + " <= 0.9");
  o.require(std::min(e[1], e[2]) > std::max(e[0], e[3]),
            "witness (" + fmt(e[0]) + ", " + fmt(e[1]) + ", " + fmt(e[2]) + ", " + fmt(e[3]) + ") favours 2,3");
  return o;
}

// 4. Optimal endowments on fully connected games.
Outcome endowment_pattern() {
  Outcome o;
  const std::array<double, 6> asym{1.5, 2.0, 2.5, 2.0, 2.0, 2.0};
  double sym_gap = 0.0, asym_gain = kInfinity;
  for (std::size_t n = 3; n <= 6; ++n) {
    const auto h = structures::fully_connected(n, 3);
    const auto x = equal_contributions(h);
    const std::vector<double> rs(n, 2.0), ra(asym.begin(), asym.begin() + n);
    const auto s = optimize_endowments(h, rs, x);
    const auto a = optimize_endowments(h, ra, x);
    sym_gap = std::max(sym_gap, std::abs(s.delta_star_opt - s.delta_star_equal));
    asym_gain = std::min(asym_gain, a.delta_star_equal - a.delta_star_opt);
  }
  o.require(sym_gap <= 1e-6, "symmetric max |opt - equal| = " + fmt(sym_gap) + " <= 1e-6");
  o.require(asym_gain >= 1e-4, "asymmetric min (equal - opt) = " + fmt(asym_gain) + " >= 1e-4");
  return o;
}

// 5. Contribution-bias curves with shared samples.
Outcome bias_curves() {
  Outcome o;
  const std::size_t samples = 200000;
  {
    const auto h = structures::ring_of_four();
    const std::vector<double> r(6, 2.0);
    const auto set = SampleSet::draw({6, samples, 31}, 1);
    std::vector<double> curve;
    for (int i = 0; i <= 6; ++i) {
      const double p = 0.5 + i / 12.0;
      const BiasAssignment b{{EdgeId{0}, EdgeId{1}, EdgeId{1}, EdgeId{2}, EdgeId{3}, EdgeId{3}}, p};
      curve.push_back(feasible_proportion(h, r, biased_contributions(h, b), 0.6, set).proportion);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i] <= curve[i - 1];
    o.require(monotone, "ring p 0.5..1 (7 pts, delta 0.6): " + fmt(curve.front()) + " -> " + fmt(curve.back()) +
                            " non-increasing");
  }
  {
    const auto h = structures::chain_of_three();
    const std::vector<double> r(6, 2.0);
    const auto set = SampleSet::draw({6, samples, 32}, 1);
    double best = -1.0, best_p = 0.0, at_half = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double p = i * 0.05;
      const BiasAssignment b{{std::nullopt, EdgeId{0}, EdgeId{0}, EdgeId{2}, std::nullopt, std::nullopt}, p};
      const double v = feasible_proportion(h, r, biased_contributions(h, b), 0.9, set).proportion;
      if (i == 10) at_half = v;
      if (v > best) {
        best = v;
        best_p = p;
      }
    }
    o.require(best_p >= 0.7 - 1e-12 && best_p <= 0.9 + 1e-12 && best > at_half,
              "chain argmax p = " + fmt(best_p) + " in [0.7, 0.9], peak " + fmt(best) + " > " + fmt(at_half) +
                  " at 0.5");
  }
  return o;
}

// 6. Optimal contributions on the ring of four hyperedges.
Outcome contribution_optimizer() {
  Outcome o;
  const auto h = structures::ring_of_four();
  const auto eq = equal_contributions(h);
  {
    const std::vector<double> e(6, 1.0 / 6), r(6, 2.0);
    const auto res = optimize_contributions(h, r, e);
    double dev = 0.0;
    for (std::size_t p = 0; p < eq.pins().size(); ++p)
      dev = std::max(dev, std::abs(res.contributions().pins()[p] - eq.pins()[p]));
    o.require(dev <= 1e-6, "b: max |X - equal| = " + fmt(dev) + " <= 1e-6");
    o.require(std::abs(res.delta_star_opt - 0.25) <= 1e-9, "b: delta*_opt = " + fmt(res.delta_star_opt) + " (0.25, 1e-9)");
  }
  {
    std::vector<double> e(6, 0.14);
    e[0] = 0.3;
    const std::vector<double> r(6, 2.0);
    const auto x = optimize_contributions(h, r, e).contributions();
    const double a = x.get(h, 1, 0), b = x.get(h, 2, 0);
    o.require(a > 0.5 && b > 0.5, "c: players 2,3 -> h1 = " + fmt(a) + ", " + fmt(b) + " > 0.5");
  }
  {
    const std::vector<double> e(6, 1.0 / 6);
    std::vector<double> r(6, 1.9);
    r[0] = 2.5;
    const auto x = optimize_contributions(h, r, e).contributions();
    const double a = x.get(h, 1, 0), b = x.get(h, 2, 0);
    o.require(a < 0.5 && b < 0.5, "d: players 2,3 -> h1 = " + fmt(a) + ", " + fmt(b) + " < 0.5");
  }
  return o;
}

// 7. Desk-scale intervention sweep.
Outcome intervention_sweep() {
  Outcome o;
  const auto spec = intervention_desk_spec();
  const auto dir = std::filesystem::temp_directory_path() / ("hgcoop_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto summary = run_sweep(spec, dir.string(), jobs);
  const auto st = intervention_stats(read_text_file((dir / "results.csv").string()));
  std::filesystem::remove_all(dir);
  o.require(summary.failed == 0 && st.instances >= 500,
            std::to_string(st.instances) + " instances, " + std::to_string(summary.failed) + " failed");
  o.require(std::abs(st.baseline_feasible - 0.9629) <= 0.10, "baseline feasible " + fmt(100 * st.baseline_feasible) +
                                                                 "% within 96.29 +- 10 pp");
  o.require(st.redistribution_lowers >= 0.50 && st.redistribution_lowers <= 0.80,
            "redistribution lowers " + fmt(100 * st.redistribution_lowers) + "% in [50, 80]");
  o.require(st.nudge_lowers >= 0.65 && st.nudge_lowers <= 0.95,
            "nudge lowers " + fmt(100 * st.nudge_lowers) + "% in [65, 95]");
  o.require(st.combined_lowers >= 0.99, "combined lowers " + fmt(100 * st.combined_lowers) + "% >= 99");
  return o;
}

// 8. Evolution chain on the 36-state instance.
Outcome evolution_chain() {
  Outcome o;
  const auto h = structures::two_edge();
  const StrategySpace space(h);
  const std::vector<double> e(4, 0.25), r(4, 1.38);
  const EvolutionParams params{1.0, 0.05, 0.9, {}};
  const auto t = build_transition_matrix(h, space, e, r, params);
  const auto v = steady_state(t, params);
  const double res = steady_state_residual(t, v, params);
  o.require(space.state_count() == 36, std::to_string(space.state_count()) + " states");
  o.require(res <= 1e-10, "residual " + fmt(res) + " <= 1e-10");

  Eigen::VectorXd term = Eigen::VectorXd::Constant(36, 1.0 / 36), sum = term;
  const Eigen::SparseMatrix<double> pt = t.p.transpose();
  double w = 1.0;
  for (int step = 1; step <= 200; ++step) {
    term = pt * term;
    w *= params.delta;
    sum += w * term;
  }
  sum *= 1.0 - params.delta;
  double dev = 0.0;
  for (Eigen::Index s = 0; s < 36; ++s) dev = std::max(dev, std::abs(sum(s) - v[static_cast<std::size_t>(s)]));
  const double bound = std::pow(params.delta, 201);
  o.require(dev <= bound, "Neumann deviation " + fmt(dev) + " <= delta^201 = " + fmt(bound));

  bool half = true;
  for (double eps : {0.0, 0.1})
    for (double du : {-3.0, -0.1, 0.0, 0.2, 5.0}) half = half && fermi_adoption(du, {0.0, eps, 0.9, {}}) == 0.5;
  o.require(half, "beta = 0 adoption is exactly 1/2");
  return o;
}

// 9. Property suites.
Outcome properties() {
  Outcome o;
  Engine rng(909);
  double budget_err = 0.0;
  std::size_t monotone_breaks = 0, relabel_breaks = 0;
  for (int t = 0; t < 200; ++t) {
    const auto h = oracle::random_hypergraph(rng, 4, 30);
    const auto n = h.node_count();
    const auto x = oracle::random_full_contributions(h, rng);
    const auto e = oracle::random_simplex(n, rng);
    const auto r = oracle::random_productivity(n, 3, rng);
    const GameInstance g(h, EndowmentVector(e), ProductivityProfile(r), x);
    double total = 0.0, budget = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      total += payoff(g, i);
      budget += r[i] * e[i];
    }
    budget_err = std::max(budget_err, std::abs(total - budget));

    bool seen = false;
    for (int k = 0; k <= 20; ++k) {
      const bool ok = grim_is_equilibrium(g.with_delta(k / 20.0));
      if (seen && !ok) ++monotone_breaks;
      seen = seen || ok;
    }

    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_below(rng, i + 1)]);
    std::vector<double> pe(n), pr(n);
    for (NodeId i = 0; i < n; ++i) {
      pe[perm[i]] = e[i];
      pr[perm[i]] = r[i];
    }
    const auto a = threshold_report(g);
    const auto b = threshold_report(GameInstance(h.relabeled(perm), EndowmentVector(pe), ProductivityProfile(pr), x));
    for (NodeId i = 0; i < n; ++i) {
      const double u = a.per_node[i], v = b.per_node[perm[i]];
      if (std::isinf(u) != std::isinf(v) || (!std::isinf(u) && std::abs(u - v) > 1e-12 * std::max(1.0, u)))
        ++relabel_breaks;
    }
  }
  o.require(budget_err <= 1e-9, "budget max error " + fmt(budget_err) + " <= 1e-9");
  o.require(monotone_breaks == 0, "monotone feasibility in delta: " + std::to_string(monotone_breaks) + " breaks");
  o.require(relabel_breaks == 0, "relabeling invariance: " + std::to_string(relabel_breaks) + " breaks");

  std::size_t unsound = 0, dominated = 0, certificate = 0;
  for (int t = 0; t < 200; ++t) {
    const auto h = oracle::random_hypergraph(rng, 4, 10);
    const auto n = h.node_count();
    const auto r = oracle::random_productivity(n, 3, rng);
    if (t % 2 == 0) {
      const auto x = oracle::random_full_contributions(h, rng);
      const auto res = optimize_endowments(h, r, x);
      if (dense_delta_star(h, r, x, res.endowments().values()) > res.delta_star_opt + 2e-9) ++unsound;
      if (res.delta_star_opt > res.delta_star_equal + 1e-12) ++dominated;
      bool cert = res.t_high - res.t_low <= 1e-9 && res.delta_star_opt <= res.t_high + 1e-7;
      for (int s = 0; s < 200; ++s)
        cert = cert && dense_delta_star(h, r, x, oracle::random_simplex(n, rng, 0.2)) >= res.t_low - 1e-9;
      if (!cert) ++certificate;
    } else {
      const auto e = oracle::random_simplex(n, rng);
      const auto res = optimize_contributions(h, r, e);
      if (!res.contributions().is_full_cooperation(h, 1e-12) ||
          dense_delta_star(h, r, res.contributions(), e) > res.delta_star_opt + 2e-9)
        ++unsound;
      if (res.delta_star_opt > res.delta_star_equal + 1e-12) ++dominated;
      bool cert = res.delta_star_opt <= res.t_high + 1e-8;
      for (int s = 0; s < 200; ++s)
        cert = cert && dense_delta_star(h, r, oracle::random_full_contributions(h, rng, 0.3), e) >= res.t_high - 1e-8;
      if (!cert) ++certificate;
    }
  }
  o.require(unsound == 0 && dominated == 0 && certificate == 0,
            "optimizers on 200 instances: " + std::to_string(unsound) + " unsound, " + std::to_string(dominated) +
                " dominated, " + std::to_string(certificate) + " certificate failures");
  return o;
}

double pearson_two_pass(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// 10. Empirical pipeline on the shipped fixtures.
Outcome empirical_pipeline() {
  Outcome o;
  const std::string dir = HGCOOP_FIXTURE_DIR;
  const auto t = empirical::load_memberships(read_text_file(dir + "/coauthorship.csv"));
  const auto c = empirical::degree_endowment_correlation(t, empirical::parse_csv(read_text_file(dir + "/funding.csv")));
  const double diff = std::abs(c.rho - pearson_two_pass(c.degree, c.endowment));
  o.require(c.points == 30 && diff <= 1e-9, "rho = " + fmt(c.rho) + " over " + std::to_string(c.points) +
                                                " points, |rho - two-pass| = " + fmt(diff) + " <= 1e-9");
  const std::array<double, 5> want{1.0, 0.5, 0.25, 0.125, 0.0625};
  bool weights = true;
  for (int p = 1; p <= 5; ++p) weights = weights && empirical::authorship_weight(p, false) == want[p - 1];
  weights = weights && empirical::authorship_weight(4, true) == 0.5 && empirical::authorship_weight(1, true) == 1.0;
  o.require(weights, "authorship weights 1, 0.5, 0.25, 0.125, 0.0625; corresponding 0.5");
  using empirical::IncomeClass;
  o.require(empirical::gdp_rate(IncomeClass::Low) == 0.003 && empirical::gdp_rate(IncomeClass::Middle) == 0.01 &&
                empirical::gdp_rate(IncomeClass::High) == 0.005 &&
                std::abs(empirical::gdp_based_endowment(IncomeClass::Middle, 1000.0, 2.0) - 12.0) <= 1e-12,
            "GDP rates 0.3%, 1%, 0.5%");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "homogeneous closed form", 1.0, closed_form},
      {2, "grim equilibrium equivalence", 10.0, grim_equivalence},
      {3, "two-edge heterogeneous case", 5.0, two_edge_case},
      {4, "optimal endowment pattern", 30.0, endowment_pattern},
      {5, "contribution-bias curves", 120.0, bias_curves},
      {6, "contribution optimizer", 30.0, contribution_optimizer},
      {7, "desk-scale interventions", 600.0, intervention_sweep},
      {8, "evolution chain", 1.0, evolution_chain},
      {9, "property suites", 120.0, properties},
      {10, "empirical pipeline", 60.0, empirical_pipeline},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < c.limit_seconds, "runtime " + fmt(secs) + " s < " + fmt(c.limit_seconds) + " s");
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
