#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgcoop/game.hpp"
#include "hgcoop/hypergraph.hpp"
#include "hgcoop/minimax_optimizer.hpp"
#include "json.hpp"

namespace hgcoop {

enum class Experiment { Threshold, Region, OptimizeE, OptimizeX, Intervene, Evolve, Empirical };
Experiment parse_experiment(std::string_view s);
std::string_view to_string(Experiment e);

// Ranges "a:b" or "a:b:step" (inclusive) or comma lists.
std::vector<double> parse_grid(std::string_view s);

struct SweepSpec {
  Experiment experiment = Experiment::Intervene;
  GeneratorKind generator = GeneratorKind::ER;
  std::size_t n_min = 80;
  std::size_t n_max = 160;
  std::vector<double> k_grid;
  std::size_t edge_size = 3;
  double gamma = 2.5;
  std::size_t replicates = 4;
  double r = 2.0;
  double delta = 1.0;                // feasibility cut for the threshold classes
  std::vector<double> delta_grid;    // region experiment
  std::size_t samples = 20000;       // region experiment
  double tolerance = 1e-9;           // optimizers
  InterventionConfig intervention;
  std::uint64_t base_seed = 0;

  void validate() const;
  std::size_t task_count() const { return k_grid.size() * replicates; }
};

nlohmann::ordered_json to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

// Desk-scale intervention sweep: ER, N in [80, 160], integer <k> grid 4..160, 4 replicates.
SweepSpec intervention_desk_spec();

// Seeds: instance seed = derive_seed(base_seed, cell, replicate); N is drawn
// from derive_seed(seed, 0) and the hypergraph from derive_seed(seed, 1).
struct SweepInstance {
  std::size_t cell = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  double k_target = 0.0;
};
SweepInstance sweep_instance(const SweepSpec& spec, std::size_t cell, std::size_t replicate);
Hypergraph sweep_hypergraph(const SweepSpec& spec, const SweepInstance& inst);

std::string sweep_header(const SweepSpec& spec);
// One CSV row (no newline). Failures fill the error column and leave values empty.
std::string sweep_row(const SweepSpec& spec, const SweepInstance& inst);

struct InterventionOutcome {
  double baseline = 0.0;
  double redistributed = 0.0;
  double nudged = 0.0;
  double combined = 0.0;
};
InterventionOutcome intervention_outcome(const Hypergraph& h, double r, const InterventionConfig& cfg);

struct SweepSummary {
  std::size_t rows = 0;
  std::size_t failed = 0;
  std::size_t resumed = 0;  // rows already present before this run
};

// Writes manifest.json, results.csv and timing.csv under out_dir. An
// existing results.csv under the same manifest is resumed from its last
// complete row; a different manifest is an error.
SweepSummary run_sweep(const SweepSpec& spec, const std::string& out_dir, unsigned jobs = 1);

// Fraction summary of an intervene results.csv.
struct InterventionStats {
  std::size_t instances = 0;
  double baseline_feasible = 0.0;
  double redistribution_lowers = 0.0;
  double nudge_lowers = 0.0;
  double combined_lowers = 0.0;
  double combined_not_above = 0.0;
};
InterventionStats intervention_stats(std::string_view results_csv);

enum class Recipe { Fig2, Fig3, Fig4, Fig5, Ed3, Ed5, Ed6 };
Recipe parse_recipe(std::string_view s);
std::string_view to_string(Recipe r);

struct FigureOptions {
  std::size_t samples = 200000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  double beta = 1.0;
  double epsilon = 0.0;
  double bias_share = 0.7;  // ed5: total share of the favoured players
};

// `share` split equally over `favoured`, the rest split equally over the others.
std::vector<double> favoured_endowments(std::size_t n, std::span<const NodeId> favoured, double share);
// Writes the panel CSV/JSON files for the recipe into out_dir and returns their paths.
std::vector<std::string> run_figure(Recipe recipe, const std::string& out_dir, const FigureOptions& options = {});

// Named structures: fully-connected:N, two-edge, ring-of-four,
// chain-of-three, six-node, circulant:N.
Hypergraph named_structure(std::string_view name);

struct InstanceFiles {
  std::string hypergraph;     // hyperedge list
  std::string endowments;     // CSV node,value (node = label)
  std::string productivity;   // CSV node,value
  std::string contributions;  // CSV node,hyperedge,value (hyperedge = 0-based line index)
};

struct LoadedInstance {
  Hypergraph graph;
  std::vector<double> e;
  std::vector<double> r;
  ContributionMatrix x;
};
// Missing endowments default to equal, productivity to r_default for every
// node, contributions to equal contributions.
LoadedInstance load_instance(const InstanceFiles& files, double r_default = 2.0, GameOptions options = {});
LoadedInstance default_instance(Hypergraph h, double r_default = 2.0);

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> diagnostics;
};
ValidationReport validate_instance(const InstanceFiles& files, double tolerance = 1e-9);

// "%.17g"; +inf as "inf".
std::string format_double(double v);

}  // namespace hgcoop
