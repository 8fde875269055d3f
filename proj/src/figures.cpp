#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "hgcoop/errors.hpp"
#include "hgcoop/evolution_chain.hpp"
#include "hgcoop/harness.hpp"
#include "hgcoop/io.hpp"
#include "hgcoop/region_sampler.hpp"
#include "hgcoop/rng.hpp"

namespace hgcoop {

namespace {

namespace fs = std::filesystem;

constexpr std::array<Recipe, 7> kRecipes{Recipe::Fig2, Recipe::Fig3, Recipe::Fig4, Recipe::Fig5,
                                         Recipe::Ed3,  Recipe::Ed5,  Recipe::Ed6};

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
  return v;
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

class Writer {
 public:
  Writer(std::string dir) : dir_(std::move(dir)) {}
  void write(const std::string& name, const std::string& text) {
    const auto path = (fs::path(dir_) / name).string();
    write_text_file(path, text);
    paths_.push_back(path);
  }
  std::vector<std::string> paths() const { return paths_; }

 private:
  std::string dir_;
  std::vector<std::string> paths_;
};

SampleSet draw(std::size_t n, const FigureOptions& o, std::uint64_t stream) {
  return SampleSet::draw({n, o.samples, derive_seed(o.seed, stream)}, o.jobs);
}

void region_rows(std::ostringstream& out, const std::string& prefix, const ThresholdKernel& kernel,
                 const SampleSet& samples, std::span<const double> deltas, unsigned jobs) {
  const auto stars = sample_delta_stars(kernel, samples, jobs);
  for (double d : deltas) {
    const auto p = proportion_at(stars, d, samples.seed());
    out << prefix << format_double(d) << ',' << format_double(p.proportion) << ','
        << format_double(p.standard_error) << '\n';
  }
}

void fig2(Writer& w, const FigureOptions& o) {
  const std::array<double, 6> asym{1.5, 2.0, 2.5, 2.0, 2.0, 2.0};
  const auto deltas = linspace(0.0, 1.0, 51);
  std::ostringstream region, optimal;
  region << "nodes,profile,delta,proportion,standard_error\n";
  optimal << "nodes,profile,delta_star_equal,delta_star_opt,witness\n";
  for (std::size_t n = 3; n <= 6; ++n) {
    const auto h = structures::fully_connected(n, 3);
    const auto x = equal_contributions(h);
    const auto samples = draw(n, o, n);
    for (const bool symmetric : {true, false}) {
      const std::string name = symmetric ? "symmetric" : "asymmetric";
      std::vector<double> r(n, 2.0);
      if (!symmetric) r.assign(asym.begin(), asym.begin() + n);
      region_rows(region, std::to_string(n) + ',' + name + ',', ThresholdKernel(h, r, x), samples, deltas, o.jobs);
      const auto opt = optimize_endowments(h, r, x);
      optimal << n << ',' << name << ',' << format_double(opt.delta_star_equal) << ','
              << format_double(opt.delta_star_opt) << ',' << join(opt.endowments().values()) << '\n';
    }
  }
  w.write("fig2_region.csv", region.str());
  w.write("fig2_optimal.csv", optimal.str());
}

BiasAssignment ring_bias(double p) {
  return {{EdgeId{0}, EdgeId{1}, EdgeId{1}, EdgeId{2}, EdgeId{3}, EdgeId{3}}, p};
}

BiasAssignment chain_bias(double p) {
  return {{std::nullopt, EdgeId{0}, EdgeId{0}, EdgeId{2}, std::nullopt, std::nullopt}, p};
}

void fig3(Writer& w, const FigureOptions& o) {
  const auto h = structures::ring_of_four();
  const std::vector<double> r(h.node_count(), 2.0);
  const auto samples = draw(h.node_count(), o, 3);
  const auto deltas = linspace(0.0, 1.0, 51);
  std::ostringstream out;
  out << "p,delta,proportion,standard_error\n";
  for (double p : linspace(0.5, 1.0, 6))
    region_rows(out, format_double(p) + ',', ThresholdKernel(h, r, biased_contributions(h, ring_bias(p))), samples,
                deltas, o.jobs);
  w.write("fig3_p_curves.csv", out.str());
}

void fig4(Writer& w, const FigureOptions&) {
  const auto h = structures::ring_of_four();
  const std::size_t n = h.node_count();
  struct Panel {
    std::string name;
    std::vector<double> e, r;
  };
  std::vector<Panel> panels{{"b", std::vector<double>(n, 1.0 / 6), std::vector<double>(n, 2.0)},
                            {"c", {0.3, 0.14, 0.14, 0.14, 0.14, 0.14}, std::vector<double>(n, 2.0)},
                            {"d", std::vector<double>(n, 1.0 / 6), {2.5, 1.9, 1.9, 1.9, 1.9, 1.9}}};
  std::ostringstream summary, witness;
  summary << "panel,delta_star_equal,delta_star_opt\n";
  witness << "panel,node,hyperedge,value\n";
  for (const auto& p : panels) {
    const auto opt = optimize_contributions(h, p.r, p.e);
    summary << p.name << ',' << format_double(opt.delta_star_equal) << ',' << format_double(opt.delta_star_opt)
            << '\n';
    for (const auto& en : opt.contributions().entries(h))
      witness << p.name << ',' << en.node << ',' << en.edge << ',' << format_double(en.value) << '\n';
  }
  w.write("fig4_optimal.csv", summary.str());
  w.write("fig4_witness.csv", witness.str());
}

void fig5(Writer& w, const FigureOptions& o) {
  const auto two = structures::two_edge();
  const std::vector<double> r_two(two.node_count(), 1.38);
  const auto x_two = equal_contributions(two);
  const GameInstance g(two, EndowmentVector::equal(two.node_count()), ProductivityProfile(r_two), x_two, 0.9);
  w.write("fig5_thresholds.csv", threshold_report_csv(g, threshold_report(g)));

  const auto opt = optimize_endowments(two, r_two, x_two);
  const auto samples = draw(two.node_count(), o, 5);
  const auto prop = feasible_proportion(two, r_two, x_two, 0.9, samples, o.jobs);
  std::ostringstream optimal;
  optimal << "delta_star_equal,delta_star_opt,witness,feasible_at_0.9,proportion_at_0.9,standard_error\n"
          << format_double(opt.delta_star_equal) << ',' << format_double(opt.delta_star_opt) << ','
          << join(opt.endowments().values()) << ',' << (opt.delta_star_opt <= 0.9 ? "true" : "false") << ','
          << format_double(prop.proportion) << ',' << format_double(prop.standard_error) << '\n';
  w.write("fig5_two_edge.csv", optimal.str());

  const auto chain = structures::chain_of_three();
  const std::vector<double> r_chain(chain.node_count(), 2.0);
  const auto chain_samples = draw(chain.node_count(), o, 6);
  std::ostringstream curve;
  curve << "p,delta,proportion,standard_error\n";
  for (double p : linspace(0.0, 1.0, 21)) {
    const auto x = biased_contributions(chain, chain_bias(p));
    const auto est = feasible_proportion(chain, r_chain, x, 0.9, chain_samples, o.jobs);
    curve << format_double(p) << ",0.9," << format_double(est.proportion) << ','
          << format_double(est.standard_error) << '\n';
  }
  w.write("fig5_chain_p.csv", curve.str());
}

EvolutionParams chain_params(const FigureOptions& o, double delta) {
  EvolutionParams p;
  p.beta = o.beta;
  p.epsilon = o.epsilon;
  p.delta = delta;
  return p;
}

void ed3(Writer& w, const FigureOptions& o) {
  const auto h = structures::two_edge();
  const auto e = EndowmentVector::equal(h.node_count());
  const std::vector<double> ra(h.node_count(), 1.38);
  const std::vector<double> rb{2.9, 1.1, 1.1, 2.9};
  w.write("ed3a_chain.json", chain_report_json(solve_chain(h, e.values(), ra, chain_params(o, 0.9), o.jobs)) + "\n");
  w.write("ed3b_chain.json", chain_report_json(solve_chain(h, e.values(), rb, chain_params(o, 0.25), o.jobs)) + "\n");
}

void ed5(Writer& w, const FigureOptions& o) {
  const auto h = structures::two_edge();
  const std::size_t n = h.node_count();
  const std::vector<double> r(n, 1.38);
  const std::array<NodeId, 1> first{0};
  const std::array<NodeId, 2> middle{1, 2};
  const std::vector<std::pair<std::string, std::vector<double>>> dists{
      {"equal", std::vector<double>(n, 1.0 / n)},
      {"player1", favoured_endowments(n, first, o.bias_share)},
      {"players23", favoured_endowments(n, middle, o.bias_share)}};
  std::ostringstream out;
  out << "distribution,beta,epsilon,rounds,delta,Pi_total\n";
  for (const auto& [name, e] : dists)
    for (double beta : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0})
      for (double eps : {0.0, 0.01, 0.05, 0.1, 0.2})
        for (double rounds : {2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
          FigureOptions fo = o;
          fo.beta = beta;
          fo.epsilon = eps;
          const double delta = 1.0 - 1.0 / rounds;
          const auto res = solve_chain(h, e, r, chain_params(fo, delta), o.jobs);
          out << name << ',' << format_double(beta) << ',' << format_double(eps) << ',' << format_double(rounds)
              << ',' << format_double(delta) << ',' << format_double(res.total_payoff) << '\n';
        }
  w.write("ed5_sweep.csv", out.str());
}

void ed6(Writer& w, const FigureOptions& o) {
  std::ostringstream out;
  out << "structure,nodes,k,r,delta_star_equal,closed_form,abs_error,proportion_at_1,standard_error\n";
  FigureOptions small = o;
  small.samples = std::min<std::size_t>(o.samples, 20000);
  std::vector<std::pair<std::string, Hypergraph>> graphs;
  for (std::size_t n : {4, 6, 10, 20, 50, 100}) graphs.emplace_back("fully-connected", structures::fully_connected(n, 3));
  for (std::size_t n : {10, 100}) graphs.emplace_back("circulant", structures::circulant(n, 3));
  std::uint64_t stream = 0;
  for (const auto& [name, h] : graphs) {
    const std::size_t n = h.node_count();
    const auto x = equal_contributions(h);
    const auto samples = draw(n, small, 600 + stream++);
    for (double rv : {1.5, 2.0, 2.5}) {
      const std::vector<double> r(n, rv);
      const ThresholdKernel kernel(h, r, x);
      const auto eq = EndowmentVector::equal(n);
      const double star = kernel.delta_star(eq.values());
      const double closed = (3.0 - rv) / (rv * 2.0);
      const auto stars = sample_delta_stars(kernel, samples, o.jobs);
      const auto p = proportion_at(stars, 1.0, samples.seed());
      out << name << ',' << n << ',' << h.hyperdegree(0) << ',' << format_double(rv) << ',' << format_double(star)
          << ',' << format_double(closed) << ',' << format_double(std::abs(star - closed)) << ','
          << format_double(p.proportion) << ',' << format_double(p.standard_error) << '\n';
    }
  }
  w.write("ed6_homogeneous.csv", out.str());
}

}  // namespace

std::vector<double> favoured_endowments(std::size_t n, std::span<const NodeId> favoured, double share) {
  if (favoured.empty() || favoured.size() >= n) throw InvalidInput("favoured group must be a proper nonempty subset");
  if (!(share >= 0.0 && share <= 1.0)) throw InvalidInput("bias share must lie in [0, 1]");
  std::vector<bool> in(n, false);
  for (NodeId i : favoured) {
    if (i >= n) throw InvalidInput("favoured player " + std::to_string(i) + " out of range");
    in[i] = true;
  }
  const auto k = static_cast<std::size_t>(std::count(in.begin(), in.end(), true));
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = in[i] ? share / k : (1.0 - share) / (n - k);
  return e;
}

std::string_view to_string(Recipe r) {
  switch (r) {
    case Recipe::Fig2: return "fig2";
    case Recipe::Fig3: return "fig3";
    case Recipe::Fig4: return "fig4";
    case Recipe::Fig5: return "fig5";
    case Recipe::Ed3: return "ed3";
    case Recipe::Ed5: return "ed5";
    case Recipe::Ed6: return "ed6";
  }
  return "?";
}

Recipe parse_recipe(std::string_view s) {
  for (Recipe r : kRecipes)
    if (to_string(r) == s) return r;
  throw InvalidInput("unknown recipe '" + std::string(s) + "' (fig2, fig3, fig4, fig5, ed3, ed5, ed6)");
}

std::vector<std::string> run_figure(Recipe recipe, const std::string& out_dir, const FigureOptions& options) {
  if (options.samples == 0) throw InvalidInput("samples must be positive");
  Writer w(out_dir);
  switch (recipe) {
    case Recipe::Fig2: fig2(w, options); break;
    case Recipe::Fig3: fig3(w, options); break;
    case Recipe::Fig4: fig4(w, options); break;
    case Recipe::Fig5: fig5(w, options); break;
    case Recipe::Ed3: ed3(w, options); break;
    case Recipe::Ed5: ed5(w, options); break;
    case Recipe::Ed6: ed6(w, options); break;
  }
  return w.paths();
}

}  // namespace hgcoop
