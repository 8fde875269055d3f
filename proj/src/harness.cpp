#include "hgcoop/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hgcoop/errors.hpp"
#include "hgcoop/io.hpp"
#include "hgcoop/parallel.hpp"
#include "hgcoop/region_sampler.hpp"
#include "hgcoop/rng.hpp"

namespace hgcoop {

namespace fs = std::filesystem;

Experiment parse_experiment(std::string_view s) {
  if (s == "threshold") return Experiment::Threshold;
  if (s == "region") return Experiment::Region;
  if (s == "optimize-e") return Experiment::OptimizeE;
  if (s == "optimize-x") return Experiment::OptimizeX;
  if (s == "intervene") return Experiment::Intervene;
  if (s == "evolve") return Experiment::Evolve;
  if (s == "empirical") return Experiment::Empirical;
  throw InvalidInput("unknown experiment '" + std::string(s) + "'");
}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Threshold: return "threshold";
    case Experiment::Region: return "region";
    case Experiment::OptimizeE: return "optimize-e";
    case Experiment::OptimizeX: return "optimize-x";
    case Experiment::Intervene: return "intervene";
    case Experiment::Evolve: return "evolve";
    case Experiment::Empirical: return "empirical";
  }
  return "unknown";
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double to_number(std::string_view s) {
  std::string tmp(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    throw InvalidInput("not a number: '" + tmp + "'");
  }
  if (used != tmp.size() || !std::isfinite(v)) throw InvalidInput("not a finite number: '" + tmp + "'");
  return v;
}

}  // namespace

std::vector<double> parse_grid(std::string_view s) {
  std::vector<double> out;
  if (s.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const auto colon = s.find(':', start);
      parts.push_back(to_number(s.substr(start, colon == std::string_view::npos ? colon : colon - start)));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() < 2 || parts.size() > 3) throw InvalidInput("range grid must be a:b or a:b:step");
    const double step = parts.size() == 3 ? parts[2] : 1.0;
    if (!(step > 0.0) || parts[1] < parts[0]) throw InvalidInput("range grid needs a <= b and a positive step");
    const auto count = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(parts[0] + static_cast<double>(i) * step);
  } else {
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto comma = s.find(',', start);
      const auto item = s.substr(start, comma == std::string_view::npos ? comma : comma - start);
      if (!item.empty()) out.push_back(to_number(item));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  if (out.empty()) throw InvalidInput("empty grid");
  return out;
}

void SweepSpec::validate() const {
  if (experiment == Experiment::Evolve)
    throw InvalidInput("sweep does not run the evolve experiment; use the `evolve` subcommand (with --sweep)");
  if (experiment == Experiment::Empirical)
    throw InvalidInput("sweep does not run the empirical experiment; use the `empirical` subcommand");
  if (n_min < edge_size || n_max < n_min) throw InvalidInput("need edge_size <= n_min <= n_max");
  if (k_grid.empty()) throw InvalidInput("k grid is empty");
  for (double k : k_grid)
    if (!(k > 0.0)) throw InvalidInput("mean hyperdegree values must be positive");
  if (replicates == 0) throw InvalidInput("replicates must be at least 1");
  if (experiment == Experiment::Region && (delta_grid.empty() || samples == 0))
    throw InvalidInput("region sweep needs a delta grid and a positive sample count");
  if (!(tolerance > 0.0)) throw InvalidInput("tolerance must be positive");
  intervention.validate();
  if (!(r > 1.0 && r < static_cast<double>(edge_size))) throw InvalidInput("r must lie in (1, edge_size)");
}

nlohmann::ordered_json to_json(const SweepSpec& s) {
  nlohmann::ordered_json j;
  j["experiment"] = std::string(to_string(s.experiment));
  j["generator"] = to_string(s.generator);
  j["n_min"] = s.n_min;
  j["n_max"] = s.n_max;
  j["k_grid"] = s.k_grid;
  j["edge_size"] = s.edge_size;
  j["gamma"] = s.gamma;
  j["replicates"] = s.replicates;
  j["r"] = s.r;
  j["delta"] = s.delta;
  j["delta_grid"] = s.delta_grid;
  j["samples"] = s.samples;
  j["tolerance"] = s.tolerance;
  j["low_quantile"] = s.intervention.low_quantile;
  j["low_share"] = s.intervention.low_share;
  j["nudge"] = s.intervention.nudge;
  j["base_seed"] = s.base_seed;
  return j;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  SweepSpec s;
  try {
    s.experiment = parse_experiment(j.at("experiment").get<std::string>());
    s.generator = parse_generator_kind(j.at("generator").get<std::string>());
    s.n_min = j.at("n_min").get<std::size_t>();
    s.n_max = j.at("n_max").get<std::size_t>();
    s.k_grid = j.at("k_grid").get<std::vector<double>>();
    s.edge_size = j.at("edge_size").get<std::size_t>();
    s.gamma = j.at("gamma").get<double>();
    s.replicates = j.at("replicates").get<std::size_t>();
    s.r = j.at("r").get<double>();
    s.delta = j.at("delta").get<double>();
    s.delta_grid = j.at("delta_grid").get<std::vector<double>>();
    s.samples = j.at("samples").get<std::size_t>();
    s.tolerance = j.at("tolerance").get<double>();
    s.intervention.low_quantile = j.at("low_quantile").get<double>();
    s.intervention.low_share = j.at("low_share").get<double>();
    s.intervention.nudge = j.at("nudge").get<double>();
    s.base_seed = j.at("base_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed sweep manifest: ") + e.what());
  }
  return s;
}

SweepSpec intervention_desk_spec() {
  SweepSpec s;
  s.experiment = Experiment::Intervene;
  s.k_grid = parse_grid("4:160");
  s.replicates = 4;
  s.base_seed = 20240601;
  return s;
}

SweepInstance sweep_instance(const SweepSpec& spec, std::size_t cell, std::size_t replicate) {
  SweepInstance inst;
  inst.cell = cell;
  inst.replicate = replicate;
  inst.seed = derive_seed(spec.base_seed, cell, replicate);
  inst.k_target = spec.k_grid.at(cell);
  Engine rng(derive_seed(inst.seed, 0));
  inst.nodes = spec.n_min + static_cast<std::size_t>(uniform_below(rng, spec.n_max - spec.n_min + 1));
  return inst;
}

Hypergraph sweep_hypergraph(const SweepSpec& spec, const SweepInstance& inst) {
  GeneratorConfig c;
  c.kind = spec.generator;
  c.nodes = inst.nodes;
  c.mean_hyperdegree = inst.k_target;
  c.edge_size = spec.edge_size;
  c.gamma = spec.gamma;
  c.seed = derive_seed(inst.seed, 1);
  return generate(c);
}

InterventionOutcome intervention_outcome(const Hypergraph& h, double r, const InterventionConfig& cfg) {
  const std::vector<double> rv(h.node_count(), r);
  const auto x = equal_contributions(h);
  const auto xn = nudge_contributions(h, x, cfg.nudge);
  const auto eq = EndowmentVector::equal(h.node_count());
  const auto e2 = redistribute_endowments(h, cfg);
  const ThresholdKernel base(h, rv, x), nudged(h, rv, xn);
  return {base.delta_star(eq.values()), base.delta_star(e2.values()), nudged.delta_star(eq.values()),
          nudged.delta_star(e2.values())};
}

namespace {

std::string feasibility_class(double d, double delta) { return d <= delta + kDefaultTolerance ? "feasible" : "infeasible"; }

std::string experiment_columns(const SweepSpec& spec) {
  switch (spec.experiment) {
    case Experiment::Threshold: return "delta_star,class";
    case Experiment::OptimizeE:
    case Experiment::OptimizeX: return "delta_star_equal,delta_star_opt,gap,iterations";
    case Experiment::Intervene:
      return "delta_star_baseline,delta_star_redistributed,delta_star_nudged,delta_star_combined,"
             "class_baseline,class_redistributed,class_nudged,class_combined";
    case Experiment::Region: {
      std::string cols;
      for (double d : spec.delta_grid) cols += (cols.empty() ? "" : ",") + ("proportion_at_" + format_double(d));
      return cols;
    }
    default: break;
  }
  throw InvalidInput("experiment not supported by sweep");
}

std::size_t column_count(const std::string& cols) { return static_cast<std::size_t>(std::count(cols.begin(), cols.end(), ',')) + 1; }

std::string csv_safe(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

std::string sweep_header(const SweepSpec& spec) {
  return "cell,replicate,seed,generator,nodes,k_target,edges,k_mean," + experiment_columns(spec) + ",error";
}

std::string sweep_row(const SweepSpec& spec, const SweepInstance& inst) {
  std::ostringstream row;
  row << inst.cell << ',' << inst.replicate << ',' << inst.seed << ',' << to_string(spec.generator) << ','
      << inst.nodes << ',' << format_double(inst.k_target) << ',';
  const auto cols = experiment_columns(spec);
  const std::vector<double> rv(inst.nodes, spec.r);
  std::string values, error;
  std::string graph_part = ",";
  try {
    const auto h = sweep_hypergraph(spec, inst);
    graph_part = std::to_string(h.edge_count()) + "," +
                 format_double(static_cast<double>(h.edge_count() * h.edge_size()) / static_cast<double>(h.node_count()));
    std::ostringstream v;
    switch (spec.experiment) {
      case Experiment::Threshold: {
        const double d = ThresholdKernel(h, rv, equal_contributions(h)).delta_star(EndowmentVector::equal(inst.nodes).values());
        v << format_double(d) << ',' << feasibility_class(d, spec.delta);
        break;
      }
      case Experiment::OptimizeE: {
        const auto res = optimize_endowments(h, rv, equal_contributions(h), spec.tolerance);
        v << format_double(res.delta_star_equal) << ',' << format_double(res.delta_star_opt) << ','
          << format_double(res.gap) << ',' << res.iterations;
        break;
      }
      case Experiment::OptimizeX: {
        const auto eq = EndowmentVector::equal(inst.nodes);
        const auto res = optimize_contributions(h, rv, eq.values(), spec.tolerance);
        v << format_double(res.delta_star_equal) << ',' << format_double(res.delta_star_opt) << ','
          << format_double(res.gap) << ',' << res.iterations;
        break;
      }
      case Experiment::Intervene: {
        const auto o = intervention_outcome(h, spec.r, spec.intervention);
        v << format_double(o.baseline) << ',' << format_double(o.redistributed) << ',' << format_double(o.nudged) << ','
          << format_double(o.combined) << ',' << feasibility_class(o.baseline, spec.delta) << ','
          << feasibility_class(o.redistributed, spec.delta) << ',' << feasibility_class(o.nudged, spec.delta) << ','
          << feasibility_class(o.combined, spec.delta);
        break;
      }
      case Experiment::Region: {
        const SimplexSampler sampler{inst.nodes, spec.samples, derive_seed(inst.seed, 2)};
        const auto stars = sample_delta_stars(ThresholdKernel(h, rv, equal_contributions(h)), SampleSet::draw(sampler));
        bool first = true;
        for (double d : spec.delta_grid) {
          v << (first ? "" : ",") << format_double(proportion_at(stars, d, sampler.seed).proportion);
          first = false;
        }
        break;
      }
      default: throw InvalidInput("experiment not supported by sweep");
    }
    values = v.str();
  } catch (const std::exception& e) {
    error = csv_safe(e.what());
    values = std::string(column_count(cols) - 1, ',');
  }
  row << graph_part << ',' << values << ',' << error;
  return row.str();
}

namespace {

// Length of the prefix made of complete lines.
std::size_t complete_prefix(const std::string& text) {
  const auto last = text.rfind('\n');
  return last == std::string::npos ? 0 : last + 1;
}

}  // namespace

SweepSummary run_sweep(const SweepSpec& spec, const std::string& out_dir, unsigned jobs) {
  spec.validate();
  fs::create_directories(out_dir);
  const auto manifest_path = (fs::path(out_dir) / "manifest.json").string();
  const auto results_path = (fs::path(out_dir) / "results.csv").string();
  const auto timing_path = (fs::path(out_dir) / "timing.csv").string();

  nlohmann::ordered_json manifest;
  manifest["spec"] = to_json(spec);
  manifest["code_version"] = HGCOOP_VERSION;
  manifest["seed_rule"] = "instance seed = derive_seed(base_seed, cell, replicate) (splitmix64 mix); "
                          "nodes from derive_seed(seed, 0), hypergraph from derive_seed(seed, 1), samples from derive_seed(seed, 2)";
  manifest["tasks"] = spec.task_count();
  const std::string manifest_text = manifest.dump(2) + "\n";

  SweepSummary summary;
  const std::string header = sweep_header(spec) + "\n";
  std::size_t done = 0;
  if (fs::exists(results_path)) {
    if (!fs::exists(manifest_path) || read_text_file(manifest_path) != manifest_text)
      throw InvalidInput("output directory " + out_dir + " holds results from a different manifest");
    auto existing = read_text_file(results_path);
    existing.resize(complete_prefix(existing));
    if (existing.rfind(header, 0) != 0) throw InvalidInput("existing results.csv has an unexpected header");
    done = static_cast<std::size_t>(std::count(existing.begin(), existing.end(), '\n')) - 1;
    write_text_file(results_path, existing);
    summary.resumed = done;
    for (std::size_t pos = header.size(); pos < existing.size();) {
      const auto nl = existing.find('\n', pos);
      if (existing[nl - 1] != ',') ++summary.failed;  // error column filled
      pos = nl + 1;
    }
  } else {
    write_text_file(manifest_path, manifest_text);
    write_text_file(results_path, header);
    write_text_file(timing_path, "cell,replicate,seconds\n");
  }

  std::ofstream results(results_path, std::ios::app | std::ios::binary);
  std::ofstream timing(timing_path, std::ios::app | std::ios::binary);
  const std::size_t total = spec.task_count();
  const std::size_t batch = std::max<std::size_t>(1, 4 * std::max(1u, jobs));
  for (std::size_t start = done; start < total; start += batch) {
    const std::size_t end = std::min(total, start + batch);
    std::vector<std::string> rows(end - start);
    std::vector<double> seconds(end - start);
    parallel_for(end - start, jobs, [&](std::size_t t) {
      const std::size_t task = start + t;
      const auto inst = sweep_instance(spec, task / spec.replicates, task % spec.replicates);
      const auto t0 = std::chrono::steady_clock::now();
      rows[t] = sweep_row(spec, inst);
      seconds[t] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const std::size_t task = start + t;
      results << rows[t] << '\n';
      timing << task / spec.replicates << ',' << task % spec.replicates << ',' << seconds[t] << '\n';
      if (rows[t].back() != ',') ++summary.failed;
    }
    results.flush();
    timing.flush();
    if (!results) throw InvalidInput("failed writing " + results_path);
  }
  summary.rows = total;
  return summary;
}

InterventionStats intervention_stats(std::string_view results_csv) {
  InterventionStats s;
  std::istringstream in{std::string(results_csv)};
  std::string line;
  std::getline(in, line);
  std::vector<std::string> head;
  {
    std::istringstream h(line);
    std::string f;
    while (std::getline(h, f, ',')) head.push_back(f);
  }
  const auto col = [&](const std::string& name) {
    const auto it = std::find(head.begin(), head.end(), name);
    if (it == head.end()) throw InvalidInput("results file lacks column " + name);
    return static_cast<std::size_t>(it - head.begin());
  };
  const auto cb = col("delta_star_baseline"), cr = col("delta_star_redistributed"), cn = col("delta_star_nudged"),
             cc = col("delta_star_combined"), ce = col("error");
  std::size_t feasible = 0, red = 0, nud = 0, comb = 0, not_above = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string x;
    while (std::getline(ls, x, ',')) f.push_back(x);
    if (f.size() < head.size()) f.resize(head.size());
    if (!f[ce].empty()) continue;
    const double b = std::stod(f[cb]), r = std::stod(f[cr]), n = std::stod(f[cn]), c = std::stod(f[cc]);
    ++s.instances;
    feasible += b <= 1.0 + kDefaultTolerance;
    red += r < b;
    nud += n < b;
    comb += c < b;
    not_above += c <= b;
  }
  if (s.instances) {
    const double n = static_cast<double>(s.instances);
    s.baseline_feasible = feasible / n;
    s.redistribution_lowers = red / n;
    s.nudge_lowers = nud / n;
    s.combined_lowers = comb / n;
    s.combined_not_above = not_above / n;
  }
  return s;
}

}  // namespace hgcoop
