#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "hgcoop/empirical.hpp"
#include "hgcoop/errors.hpp"
#include "hgcoop/harness.hpp"
#include "hgcoop/io.hpp"
#include "hgcoop/region_sampler.hpp"

namespace hgcoop {

namespace {

std::size_t parse_count(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  try {
    std::size_t used = 0;
    v = std::stoul(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InvalidInput("bad " + std::string(what) + " in structure name: '" + std::string(s) + "'");
  }
  return v;
}

std::map<std::string, NodeId> label_index(const Hypergraph& h) {
  std::map<std::string, NodeId> idx;
  for (NodeId i = 0; i < h.node_count(); ++i) idx[h.label(i)] = i;
  return idx;
}

// node,value CSV onto a dense vector; every node exactly once.
std::vector<double> node_values(const Hypergraph& h, const std::string& path, std::vector<std::string>* problems) {
  const auto t = empirical::parse_csv(read_text_file(path));
  const auto cn = t.column("node"), cv = t.column("value");
  const auto idx = label_index(h);
  std::vector<double> out(h.node_count(), std::nan(""));
  auto report = [&](const std::string& msg) {
    if (!problems) throw InvalidInput(path + ": " + msg);
    problems->push_back(path + ": " + msg);
  };
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto it = idx.find(t.rows[r][cn]);
    if (it == idx.end()) {
      report("line " + std::to_string(t.line[r]) + ": unknown node '" + t.rows[r][cn] + "'");
      continue;
    }
    if (!std::isnan(out[it->second])) report("line " + std::to_string(t.line[r]) + ": node listed twice");
    out[it->second] = empirical::parse_number(t, r, cv);
  }
  for (NodeId i = 0; i < h.node_count(); ++i)
    if (std::isnan(out[i])) report("node " + h.label(i) + " has no value");
  return out;
}

struct ContributionRow {
  std::size_t line;
  std::string node;
  std::size_t edge;
  double value;
};

std::vector<ContributionRow> contribution_rows(const std::string& path) {
  const auto t = empirical::parse_csv(read_text_file(path));
  const auto cn = t.column("node"), ce = t.column("hyperedge"), cv = t.column("value");
  std::vector<ContributionRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double e = empirical::parse_number(t, r, ce);
    if (e < 0 || e != std::floor(e))
      throw InvalidInput(path + ": line " + std::to_string(t.line[r]) + ": hyperedge must be a nonnegative integer");
    rows.push_back({t.line[r], t.rows[r][cn], static_cast<std::size_t>(e), empirical::parse_number(t, r, cv)});
  }
  return rows;
}

std::string short_double(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

Hypergraph named_structure(std::string_view name) {
  const auto colon = name.find(':');
  const auto base = name.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
  if (base == "fully-connected") return structures::fully_connected(parse_count(arg, "node count"), 3);
  if (base == "circulant") return structures::circulant(parse_count(arg, "node count"), 3);
  if (!arg.empty()) throw InvalidInput("structure '" + std::string(base) + "' takes no argument");
  if (base == "two-edge") return structures::two_edge();
  if (base == "ring-of-four") return structures::ring_of_four();
  if (base == "chain-of-three") return structures::chain_of_three();
  if (base == "six-node") return structures::six_node_three_regular();
  throw InvalidInput("unknown structure '" + std::string(name) +
                     "' (fully-connected:N, circulant:N, two-edge, ring-of-four, chain-of-three, six-node)");
}

LoadedInstance default_instance(Hypergraph h, double r_default) {
  const std::size_t n = h.node_count();
  auto x = equal_contributions(h);
  const auto eq = EndowmentVector::equal(n);
  return {std::move(h), {eq.values().begin(), eq.values().end()}, std::vector<double>(n, r_default), std::move(x)};
}

LoadedInstance load_instance(const InstanceFiles& files, double r_default, GameOptions options) {
  if (files.hypergraph.empty()) throw InvalidInput("a hypergraph file is required");
  LoadedInstance inst = default_instance(load_hyperedge_file(files.hypergraph), r_default);
  const Hypergraph& h = inst.graph;
  if (!files.endowments.empty()) {
    inst.e = node_values(h, files.endowments, nullptr);
    EndowmentVector(inst.e, 1e-9);
  }
  if (!files.productivity.empty()) inst.r = node_values(h, files.productivity, nullptr);
  ProductivityProfile prof(inst.r);
  if (!options.relaxed_productivity && !prof.in_dilemma_range(h.edge_size()))
    throw InvalidInput("productivity outside the dilemma range (1, " + std::to_string(h.edge_size()) + ")");
  if (!files.contributions.empty()) {
    const auto idx = label_index(h);
    std::vector<ContributionMatrix::Entry> entries;
    for (const auto& row : contribution_rows(files.contributions)) {
      const auto it = idx.find(row.node);
      if (it == idx.end())
        throw InvalidInput(files.contributions + ": line " + std::to_string(row.line) + ": unknown node '" + row.node + "'");
      if (row.edge >= h.edge_count())
        throw InvalidInput(files.contributions + ": line " + std::to_string(row.line) + ": no hyperedge " +
                           std::to_string(row.edge));
      entries.push_back({it->second, static_cast<EdgeId>(row.edge), row.value});
    }
    inst.x = ContributionMatrix::from_entries(h, entries);
    inst.x.validate(h, 1e-9);
  }
  return inst;
}

ValidationReport validate_instance(const InstanceFiles& files, double tolerance) {
  ValidationReport rep;
  auto fail = [&](std::string msg) {
    rep.valid = false;
    rep.diagnostics.push_back(std::move(msg));
  };
  std::optional<Hypergraph> graph;
  try {
    if (files.hypergraph.empty()) throw InvalidInput("no hypergraph file given");
    graph = load_hyperedge_file(files.hypergraph);
  } catch (const std::exception& e) {
    fail(std::string("hypergraph: ") + e.what());
    return rep;
  }
  const Hypergraph& h = *graph;
  for (NodeId i : h.isolated_nodes()) fail("isolated node " + h.label(i));

  if (!files.endowments.empty()) {
    try {
      std::vector<std::string> problems;
      const auto e = node_values(h, files.endowments, &problems);
      for (auto& p : problems) fail(p);
      double sum = 0.0;
      for (NodeId i = 0; i < h.node_count(); ++i) {
        if (std::isnan(e[i])) continue;
        if (e[i] < 0.0 || e[i] > 1.0) fail("endowment range violation at node " + h.label(i) + ": " + short_double(e[i]));
        sum += e[i];
      }
      if (std::abs(sum - 1.0) > tolerance)
        fail("simplex violation at " + short_double(std::abs(sum - 1.0)) + ": endowments sum to " + short_double(sum));
    } catch (const std::exception& ex) {
      fail(ex.what());
    }
  }
  if (!files.productivity.empty()) {
    try {
      std::vector<std::string> problems;
      const auto r = node_values(h, files.productivity, &problems);
      for (auto& p : problems) fail(p);
      const double sigma = static_cast<double>(h.edge_size());
      for (NodeId i = 0; i < h.node_count(); ++i)
        if (!std::isnan(r[i]) && !(r[i] > 1.0 && r[i] < sigma))
          fail("dilemma-range violation at node " + h.label(i) + ": r = " + short_double(r[i]) + " outside (1, " +
               short_double(sigma) + ")");
    } catch (const std::exception& ex) {
      fail(ex.what());
    }
  }
  if (!files.contributions.empty()) {
    try {
      const auto idx = label_index(h);
      std::vector<double> row(h.node_count(), 0.0);
      for (const auto& c : contribution_rows(files.contributions)) {
        const auto it = idx.find(c.node);
        const std::string where = "(node " + c.node + ", hyperedge " + std::to_string(c.edge) + ")";
        if (it == idx.end() || c.edge >= h.edge_count()) {
          fail("unknown " + where + " at line " + std::to_string(c.line));
          continue;
        }
        const auto mem = h.members(static_cast<EdgeId>(c.edge));
        if (std::find(mem.begin(), mem.end(), it->second) == mem.end()) {
          fail("support violation at " + where);
          continue;
        }
        if (c.value < 0.0 || c.value > 1.0) fail("contribution range violation at " + where + ": " + short_double(c.value));
        row[it->second] += c.value;
      }
      for (NodeId i = 0; i < h.node_count(); ++i) {
        if (row[i] > 1.0 + tolerance)
          fail("row-sum violation at node " + h.label(i) + ": contributions sum to " + short_double(row[i]));
        else if (row[i] < 1.0 - tolerance)
          rep.diagnostics.push_back("note: node " + h.label(i) + " is not at full cooperation (row sum " +
                                    short_double(row[i]) + ")");
      }
    } catch (const std::exception& ex) {
      fail(ex.what());
    }
  }
  return rep;
}

}  // namespace hgcoop
