// hgcoop command-line front end.
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "hgcoop/empirical.hpp"
#include "hgcoop/errors.hpp"
#include "hgcoop/evolution_chain.hpp"
#include "hgcoop/harness.hpp"
#include "hgcoop/io.hpp"
#include "hgcoop/region_sampler.hpp"
#include "json.hpp"

using namespace hgcoop;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out = "-";
  unsigned jobs = 1;
};

struct InstanceArgs {
  InstanceFiles files;
  std::string structure;
  double r = 2.0;
  bool relaxed = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Base seed");
  app->add_option("--out", c.out, "Output file or directory ('-' for stdout)");
  app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void add_instance(CLI::App* app, InstanceArgs& a) {
  app->add_option("--hypergraph", a.files.hypergraph, "Hyperedge list file");
  app->add_option("--structure", a.structure,
                  "Built-in structure: fully-connected:N, circulant:N, two-edge, ring-of-four, chain-of-three, six-node");
  app->add_option("--endowments", a.files.endowments, "CSV node,value");
  app->add_option("--productivity", a.files.productivity, "CSV node,value");
  app->add_option("--contributions", a.files.contributions, "CSV node,hyperedge,value");
  app->add_option("--r", a.r, "Productivity for every node when no file is given");
  app->add_flag("--relaxed", a.relaxed, "Accept productivity outside (1, sigma)");
}

LoadedInstance instance(const InstanceArgs& a) {
  GameOptions opts;
  opts.relaxed_productivity = a.relaxed;
  if (!a.structure.empty()) {
    if (!a.files.hypergraph.empty()) throw InvalidInput("give either --structure or --hypergraph, not both");
    if (!a.files.endowments.empty() || !a.files.productivity.empty() || !a.files.contributions.empty())
      throw InvalidInput("instance files need --hypergraph");
    auto inst = default_instance(named_structure(a.structure), a.r);
    ProductivityProfile p(inst.r);
    if (!a.relaxed && !p.in_dilemma_range(inst.graph.edge_size())) throw InvalidInput("r outside the dilemma range");
    return inst;
  }
  return load_instance(a.files, a.r, opts);
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

nlohmann::ordered_json number(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

// --config FILE: flat "key = value" lines, appended after argv so they win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args;
  std::vector<std::string> extra;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string path;
    if (a == "--config") {
      if (i + 1 >= argc) throw InvalidInput("--config needs a file");
      path = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      args.push_back(a);
      continue;
    }
    std::istringstream in(read_text_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      if (trim(line).empty()) continue;
      if (eq == std::string::npos)
        throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      if (key.empty()) throw InvalidInput(path + ":" + std::to_string(lineno) + ": empty key");
      if (value == "true") {
        extra.push_back("--" + key);
      } else if (value != "false") {
        extra.push_back("--" + key);
        extra.push_back(value);
      }
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

nlohmann::ordered_json optimization_json(const Hypergraph& h, const OptimizationResult& res) {
  nlohmann::ordered_json j;
  j["delta_star_equal"] = number(res.delta_star_equal);
  j["delta_star_opt"] = number(res.delta_star_opt);
  j["t_low"] = number(res.t_low);
  j["t_high"] = number(res.t_high);
  j["gap"] = res.gap;
  j["iterations"] = res.iterations;
  if (std::holds_alternative<EndowmentVector>(res.witness)) {
    const auto v = res.endowments().values();
    auto w = nlohmann::ordered_json::array();
    for (NodeId i = 0; i < v.size(); ++i) w.push_back({{"node", h.label(i)}, {"value", v[i]}});
    j["witness"] = std::move(w);
  } else {
    auto w = nlohmann::ordered_json::array();
    for (const auto& e : res.contributions().entries(h))
      w.push_back({{"node", h.label(e.node)}, {"hyperedge", e.edge}, {"value", e.value}});
    j["witness"] = std::move(w);
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Public goods games on hypergraphs"};
  app.set_version_flag("--version", std::string(HGCOOP_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // generate
  Common gen_c;
  GeneratorConfig gen;
  std::string gen_kind = "er";
  auto* generate = app.add_subcommand("generate", "Random uniform hypergraph");
  add_common(generate, gen_c);
  generate->add_option("--generator", gen_kind, "er or ba");
  generate->add_option("--nodes", gen.nodes, "Node count")->required();
  generate->add_option("--mean-degree", gen.mean_hyperdegree, "Target mean hyperdegree")->required();
  generate->add_option("--edge-size", gen.edge_size, "Hyperedge size sigma");
  generate->add_option("--gamma", gen.gamma, "Power-law exponent (ba)");
  generate->add_option("--max-attempts", gen.max_attempts, "Redraw cap");

  // threshold
  Common thr_c;
  InstanceArgs thr_i;
  double thr_delta = 1.0;
  auto* threshold = app.add_subcommand("threshold", "Per-node thresholds and delta*");
  add_common(threshold, thr_c);
  add_instance(threshold, thr_i);
  threshold->add_option("--delta", thr_delta, "Continuation probability");

  // region
  Common reg_c;
  InstanceArgs reg_i;
  std::string reg_grid = "0:1:0.05";
  std::size_t reg_samples = 200000;
  bool reg_lattice = false;
  std::size_t reg_steps = 100;
  auto* region = app.add_subcommand("region", "Feasible fraction of the endowment simplex");
  add_common(region, reg_c);
  add_instance(region, reg_i);
  region->add_option("--delta-grid", reg_grid, "Deltas (a:b:step or comma list)");
  region->add_option("--samples", reg_samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  region->add_flag("--grid", reg_lattice, "Barycentric lattice instead of sampling (N <= 4)");
  region->add_option("--grid-steps", reg_steps, "Lattice resolution")->check(CLI::PositiveNumber);

  // optimize-e / optimize-x
  Common ope_c, opx_c;
  InstanceArgs ope_i, opx_i;
  double ope_tol = 1e-9, opx_tol = 1e-9;
  auto* optimize_e = app.add_subcommand("optimize-e", "Optimal endowments for fixed r and X");
  add_common(optimize_e, ope_c);
  add_instance(optimize_e, ope_i);
  optimize_e->add_option("--tolerance", ope_tol, "Bisection tolerance");
  auto* optimize_x = app.add_subcommand("optimize-x", "Optimal contributions for fixed r and e");
  add_common(optimize_x, opx_c);
  add_instance(optimize_x, opx_i);
  optimize_x->add_option("--tolerance", opx_tol, "Face tolerance");

  // intervene
  Common int_c;
  InstanceArgs int_i;
  InterventionConfig int_cfg;
  auto* intervene = app.add_subcommand("intervene", "Redistribution, nudge and both");
  add_common(intervene, int_c);
  add_instance(intervene, int_i);
  intervene->add_option("--low-quantile", int_cfg.low_quantile, "Fraction of nodes in the low-degree group");
  intervene->add_option("--low-share", int_cfg.low_share, "Endowment share of the low-degree group");
  intervene->add_option("--nudge", int_cfg.nudge, "Contribution step");

  // evolve
  Common evo_c;
  InstanceArgs evo_i;
  EvolutionParams evo_p;
  bool evo_sweep = false;
  std::string evo_betas = "0,0.5,1,2,5,10", evo_eps = "0,0.01,0.05,0.1,0.2", evo_rounds = "2,5,10,20,50,100";
  std::vector<NodeId> evo_bias;
  double evo_share = 0.7;
  std::size_t evo_cap = 1'000'000;
  auto* evolve = app.add_subcommand("evolve", "Discounted steady state of the strategy chain");
  add_common(evolve, evo_c);
  add_instance(evolve, evo_i);
  evolve->add_option("--beta", evo_p.beta, "Selection strength");
  evolve->add_option("--epsilon", evo_p.epsilon, "Error rate");
  evolve->add_option("--delta", evo_p.delta, "Continuation probability");
  evolve->add_option("--state-cap", evo_cap, "Largest state space accepted");
  evolve->add_flag("--sweep", evo_sweep, "CSV over the beta, epsilon and rounds grids");
  evolve->add_option("--betas", evo_betas, "Beta grid");
  evolve->add_option("--epsilons", evo_eps, "Epsilon grid");
  evolve->add_option("--rounds", evo_rounds, "Expected rounds grid; delta = 1 - 1/rounds");
  evolve->add_option("--bias-player", evo_bias, "Favoured node indices (0-based)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->delimiter(',');
  evolve->add_option("--bias-share", evo_share, "Total endowment share of the favoured nodes");

  // empirical
  Common emp_c;
  std::string emp_mode, emp_members, emp_endow, emp_attr, emp_alloc, emp_focal, emp_weighting = "unweighted";
  double emp_cut = 50.0;
  std::size_t emp_sigma = 3;
  auto* empirical_cmd = app.add_subcommand("empirical", "Authorship, correlation and water analyses");
  add_common(empirical_cmd, emp_c);
  empirical_cmd->add_option("--mode", emp_mode, "authorship, correlation or water")->required();
  empirical_cmd->add_option("--memberships", emp_members, "CSV actor,hyperedge[,position][,corresponding]");
  empirical_cmd->add_option("--endowments", emp_endow, "CSV actor,total");
  empirical_cmd->add_option("--attributes", emp_attr, "CSV actor,income_class,gdp,assistance,governance");
  empirical_cmd->add_option("--allocations", emp_alloc, "CSV actor,hyperedge,allocation");
  empirical_cmd->add_option("--focal", emp_focal, "Focal actor (authorship)");
  empirical_cmd->add_option("--cut", emp_cut, "Hyperdegree cut between bands");
  empirical_cmd->add_option("--weighting", emp_weighting, "unweighted or per-edge");
  empirical_cmd->add_option("--sigma", emp_sigma, "Basin size used for delta* (water)");

  // sweep
  Common swp_c;
  SweepSpec spec;
  std::string swp_experiment = "intervene", swp_generator = "er", swp_k = "4:160", swp_deltas = "0:1:0.1";
  std::string swp_manifest;
  bool swp_desk = false;
  auto* sweep = app.add_subcommand("sweep", "Seeded sweep over random hypergraphs");
  add_common(sweep, swp_c);
  sweep->add_option("--manifest", swp_manifest, "Rerun the spec stored in a manifest.json");
  sweep->add_flag("--desk", swp_desk, "Desk-scale intervention spec");
  sweep->add_option("--experiment", swp_experiment, "threshold, region, optimize-e, optimize-x or intervene");
  sweep->add_option("--generator", swp_generator, "er or ba");
  sweep->add_option("--n-min", spec.n_min, "Smallest N");
  sweep->add_option("--n-max", spec.n_max, "Largest N");
  sweep->add_option("--k-grid", swp_k, "Mean hyperdegree grid");
  sweep->add_option("--edge-size", spec.edge_size, "Hyperedge size sigma");
  sweep->add_option("--gamma", spec.gamma, "Power-law exponent (ba)");
  sweep->add_option("--replicates", spec.replicates, "Instances per cell");
  sweep->add_option("--r", spec.r, "Symmetric productivity");
  sweep->add_option("--delta", spec.delta, "Feasibility cut");
  sweep->add_option("--delta-grid", swp_deltas, "Deltas for the region experiment");
  sweep->add_option("--samples", spec.samples, "Samples for the region experiment");
  sweep->add_option("--tolerance", spec.tolerance, "Optimizer tolerance");
  sweep->add_option("--low-quantile", spec.intervention.low_quantile, "Redistribution quantile");
  sweep->add_option("--low-share", spec.intervention.low_share, "Redistribution share");
  sweep->add_option("--nudge", spec.intervention.nudge, "Nudge step");

  // figure
  Common fig_c;
  FigureOptions fig_o;
  std::string fig_recipe;
  auto* figure = app.add_subcommand("figure", "Plot-ready CSV/JSON for a recipe");
  add_common(figure, fig_c);
  figure->add_option("--recipe", fig_recipe, "fig2, fig3, fig4, fig5, ed3, ed5 or ed6")->required();
  figure->add_option("--samples", fig_o.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  figure->add_option("--beta", fig_o.beta, "Selection strength (ed3)");
  figure->add_option("--epsilon", fig_o.epsilon, "Error rate (ed3)");
  figure->add_option("--bias-share", fig_o.bias_share, "Favoured share (ed5)");

  // validate
  Common val_c;
  InstanceFiles val_f;
  double val_tol = 1e-9;
  auto* validate = app.add_subcommand("validate", "Check instance files and list violations");
  add_common(validate, val_c);
  validate->add_option("--hypergraph", val_f.hypergraph, "Hyperedge list file")->required();
  validate->add_option("--endowments", val_f.endowments, "CSV node,value");
  validate->add_option("--productivity", val_f.productivity, "CSV node,value");
  validate->add_option("--contributions", val_f.contributions, "CSV node,hyperedge,value");
  validate->add_option("--tolerance", val_tol, "Absolute tolerance");

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 1;
    }

    if (*generate) {
      gen.kind = parse_generator_kind(gen_kind);
      gen.seed = gen_c.seed;
      emit(gen_c.out, serialize_hyperedge_list(hgcoop::generate(gen)));
    } else if (*threshold) {
      auto in = instance(thr_i);
      GameOptions go;
      go.relaxed_productivity = thr_i.relaxed;
      const GameInstance g(in.graph, EndowmentVector(in.e), ProductivityProfile(in.r), in.x, thr_delta, go);
      const auto rep = threshold_report(g);
      emit(thr_c.out, threshold_report_csv(g, rep));
      std::cerr << "delta_star=" << format_double(rep.delta_star) << " " << to_string(rep.feasibility)
                << " grim_equilibrium_at_delta=" << (grim_is_equilibrium(g) ? "yes" : "no") << "\n";
    } else if (*region) {
      auto in = instance(reg_i);
      GameOptions go;
      go.relaxed_productivity = reg_i.relaxed;
      const auto samples = reg_lattice ? SampleSet::barycentric_grid(in.graph.node_count(), reg_steps)
                                       : SampleSet::draw({in.graph.node_count(), reg_samples, reg_c.seed}, reg_c.jobs);
      const ThresholdKernel kernel(in.graph, in.r, in.x, go);
      const auto stars = sample_delta_stars(kernel, samples, reg_c.jobs);
      std::ostringstream out;
      out << "delta,proportion,standard_error,samples,seed,mode\n";
      for (double d : parse_grid(reg_grid)) {
        const auto p = proportion_at(stars, d, samples.seed());
        out << format_double(d) << ',' << format_double(p.proportion) << ',' << format_double(p.standard_error)
            << ',' << p.samples << ',' << samples.seed() << ',' << (reg_lattice ? "grid" : "monte-carlo") << '\n';
      }
      emit(reg_c.out, out.str());
    } else if (*optimize_e) {
      auto in = instance(ope_i);
      GameOptions go;
      go.relaxed_productivity = ope_i.relaxed;
      const auto res = optimize_endowments(in.graph, in.r, in.x, ope_tol, go);
      emit(ope_c.out, optimization_json(in.graph, res).dump(2) + "\n");
    } else if (*optimize_x) {
      auto in = instance(opx_i);
      GameOptions go;
      go.relaxed_productivity = opx_i.relaxed;
      const auto res = optimize_contributions(in.graph, in.r, in.e, opx_tol, go);
      emit(opx_c.out, optimization_json(in.graph, res).dump(2) + "\n");
    } else if (*intervene) {
      auto in = instance(int_i);
      int_cfg.validate();
      const double r0 = in.r.empty() ? int_i.r : in.r.front();
      for (double v : in.r)
        if (v != r0) throw InvalidInput("intervene needs symmetric productivity");
      const auto o = intervention_outcome(in.graph, r0, int_cfg);
      std::ostringstream out;
      out << "baseline,redistributed,nudged,combined\n"
          << format_double(o.baseline) << ',' << format_double(o.redistributed) << ',' << format_double(o.nudged)
          << ',' << format_double(o.combined) << '\n';
      emit(int_c.out, out.str());
    } else if (*evolve) {
      auto in = instance(evo_i);
      if (!evo_bias.empty()) in.e = favoured_endowments(in.graph.node_count(), evo_bias, evo_share);
      if (!evo_sweep) {
        const auto res = solve_chain(in.graph, in.e, in.r, evo_p, evo_c.jobs, evo_cap);
        emit(evo_c.out, chain_report_json(res) + "\n");
      } else {
        std::ostringstream out;
        out << "beta,epsilon,rounds,delta,Pi_total,endowments\n";
        for (double b : parse_grid(evo_betas))
          for (double eps : parse_grid(evo_eps))
            for (double rounds : parse_grid(evo_rounds)) {
              if (!(rounds >= 1.0)) throw InvalidInput("rounds must be at least 1");
              EvolutionParams p = evo_p;
              p.beta = b;
              p.epsilon = eps;
              p.delta = 1.0 - 1.0 / rounds;
              const auto res = solve_chain(in.graph, in.e, in.r, p, evo_c.jobs, evo_cap);
              out << format_double(b) << ',' << format_double(eps) << ',' << format_double(rounds) << ','
                  << format_double(p.delta) << ',' << format_double(res.total_payoff) << ',' << join(in.e) << '\n';
            }
        emit(evo_c.out, out.str());
      }
    } else if (*empirical_cmd) {
      nlohmann::ordered_json j;
      auto band_json = [](const empirical::BandMeans& b) {
        nlohmann::ordered_json o;
        o["mean_low"] = b.mean_low ? nlohmann::ordered_json(*b.mean_low) : nlohmann::ordered_json(nullptr);
        o["mean_high"] = b.mean_high ? nlohmann::ordered_json(*b.mean_high) : nlohmann::ordered_json(nullptr);
        o["count_low"] = b.count_low;
        o["count_high"] = b.count_high;
        return o;
      };
      if (emp_mode == "authorship") {
        if (emp_members.empty() || emp_focal.empty()) throw InvalidInput("authorship needs --memberships and --focal");
        empirical::CoMemberWeighting w;
        if (emp_weighting == "unweighted")
          w = empirical::CoMemberWeighting::Unweighted;
        else if (emp_weighting == "per-edge")
          w = empirical::CoMemberWeighting::AuthorshipPerEdge;
        else
          throw InvalidInput("unknown weighting '" + emp_weighting + "'");
        const auto t = empirical::load_memberships(read_text_file(emp_members));
        j["focal"] = emp_focal;
        j["hyperdegree"] = t.hyperdegree(emp_focal);
        j["cut"] = emp_cut;
        j["weighting"] = emp_weighting;
        j["bands"] = band_json(empirical::authorship_bands(t, emp_focal, emp_cut, w));
      } else if (emp_mode == "correlation") {
        if (emp_members.empty() || emp_endow.empty()) throw InvalidInput("correlation needs --memberships and --endowments");
        const auto t = empirical::load_memberships(read_text_file(emp_members));
        const auto c = empirical::degree_endowment_correlation(t, empirical::parse_csv(read_text_file(emp_endow)));
        j["rho"] = c.rho;
        j["points"] = c.points;
      } else if (emp_mode == "water") {
        if (emp_attr.empty() || emp_alloc.empty()) throw InvalidInput("water needs --attributes and --allocations");
        const auto rep = empirical::water_analysis(empirical::parse_csv(read_text_file(emp_attr)),
                                                   empirical::parse_csv(read_text_file(emp_alloc)), emp_cut, emp_sigma);
        j["endowment"] = rep.endowment;
        j["hyperdegree"] = rep.hyperdegree;
        j["bands"] = band_json(rep.bands);
        j["degree_endowment_rho"] =
            rep.degree_endowment_rho ? nlohmann::ordered_json(*rep.degree_endowment_rho) : nlohmann::ordered_json(nullptr);
        j["productivity_map"] = {{"source_min", rep.productivity_map.source_min},
                                 {"source_max", rep.productivity_map.source_max},
                                 {"target_low", rep.productivity_map.target_low},
                                 {"target_high", rep.productivity_map.target_high}};
        j["delta_star"] = rep.delta_star ? number(*rep.delta_star) : nlohmann::ordered_json(nullptr);
        j["basins_used"] = rep.basins_used;
      } else {
        throw InvalidInput("unknown mode '" + emp_mode + "' (authorship, correlation, water)");
      }
      emit(emp_c.out, j.dump(2) + "\n");
    } else if (*sweep) {
      if (swp_c.out.empty() || swp_c.out == "-") throw InvalidInput("sweep needs --out DIR");
      if (!swp_manifest.empty()) {
        const auto j = nlohmann::json::parse(read_text_file(swp_manifest));
        spec = sweep_spec_from_json(j.contains("spec") ? j["spec"] : j);
      } else if (swp_desk) {
        spec = intervention_desk_spec();
      } else {
        spec.experiment = parse_experiment(swp_experiment);
        spec.generator = parse_generator_kind(swp_generator);
        spec.k_grid = parse_grid(swp_k);
        spec.delta_grid = parse_grid(swp_deltas);
        spec.base_seed = swp_c.seed;
      }
      const auto s = run_sweep(spec, swp_c.out, swp_c.jobs);
      std::cerr << "rows=" << s.rows << " resumed=" << s.resumed << " failed=" << s.failed << "\n";
      if (s.failed > 0) return 3;
    } else if (*figure) {
      if (fig_c.out.empty() || fig_c.out == "-") throw InvalidInput("figure needs --out DIR");
      fig_o.seed = fig_c.seed;
      fig_o.jobs = fig_c.jobs;
      for (const auto& p : run_figure(parse_recipe(fig_recipe), fig_c.out, fig_o)) std::cout << p << "\n";
    } else if (*validate) {
      const auto rep = validate_instance(val_f, val_tol);
      std::ostringstream out;
      for (const auto& d : rep.diagnostics) out << d << "\n";
      out << (rep.valid ? "valid" : "invalid") << "\n";
      emit(val_c.out, out.str());
      return rep.valid ? 0 : 1;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
