#include "hgcoop/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "hgcoop/errors.hpp"
#include "hgcoop/io.hpp"
#include "hgcoop/rng.hpp"

namespace hgcoop {

Hypergraph::Hypergraph(std::size_t node_count, std::size_t edge_size,
                       std::vector<std::vector<NodeId>> hyperedges,
                       std::vector<std::string> labels)
    : node_count_(node_count), edge_size_(edge_size), labels_(std::move(labels)) {
  if (edge_size_ < 2) throw InvalidInput("hyperedge size must be at least 2");
  if (!labels_.empty() && labels_.size() != node_count_)
    throw InvalidInput("label count does not match node count");

  members_.reserve(hyperedges.size() * edge_size_);
  std::vector<std::size_t> degree(node_count_, 0);
  for (std::size_t e = 0; e < hyperedges.size(); ++e) {
    const auto& edge = hyperedges[e];
    if (edge.size() != edge_size_) {
      throw InvalidInput("hyperedge " + std::to_string(e) + " has " + std::to_string(edge.size()) +
                         " members, expected " + std::to_string(edge_size_));
    }
    for (std::size_t a = 0; a < edge.size(); ++a) {
      if (edge[a] >= node_count_)
        throw InvalidInput("hyperedge " + std::to_string(e) + " references node " +
                           std::to_string(edge[a]) + " out of range");
      for (std::size_t b = 0; b < a; ++b)
        if (edge[a] == edge[b])
          throw InvalidInput("hyperedge " + std::to_string(e) + " repeats node " +
                             std::to_string(edge[a]));
      ++degree[edge[a]];
      members_.push_back(edge[a]);
    }
  }

  offsets_.assign(node_count_ + 1, 0);
  for (std::size_t i = 0; i < node_count_; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  incidence_.resize(members_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  const std::size_t m = edge_count();
  for (std::size_t e = 0; e < m; ++e) {
    for (std::size_t s = 0; s < edge_size_; ++s) {
      const NodeId i = members_[e * edge_size_ + s];
      incidence_[cursor[i]++] = {static_cast<EdgeId>(e), static_cast<std::uint32_t>(s)};
    }
  }
}

std::optional<std::uint32_t> Hypergraph::slot_of(NodeId i, EdgeId e) const {
  const auto row = members(e);
  for (std::uint32_t s = 0; s < row.size(); ++s)
    if (row[s] == i) return s;
  return std::nullopt;
}

std::vector<NodeId> Hypergraph::isolated_nodes() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < node_count_; ++i)
    if (hyperdegree(i) == 0) out.push_back(i);
  return out;
}

std::string Hypergraph::label(NodeId i) const {
  return labels_.empty() ? std::to_string(i) : labels_[i];
}

Hypergraph Hypergraph::relabeled(std::span<const NodeId> perm) const {
  if (perm.size() != node_count_) throw InvalidInput("permutation size mismatch");
  std::vector<std::vector<NodeId>> edges(edge_count());
  for (std::size_t e = 0; e < edges.size(); ++e)
    for (NodeId v : members(static_cast<EdgeId>(e))) edges[e].push_back(perm[v]);
  std::vector<std::string> labels;
  if (!labels_.empty()) {
    labels.resize(node_count_);
    for (std::size_t i = 0; i < node_count_; ++i) labels[perm[i]] = labels_[i];
  }
  return Hypergraph(node_count_, edge_size_, std::move(edges), std::move(labels));
}

std::vector<std::size_t> hyperdegrees(const Hypergraph& h) {
  std::vector<std::size_t> k(h.node_count());
  for (NodeId i = 0; i < h.node_count(); ++i) k[i] = h.hyperdegree(i);
  return k;
}

// ---------------------------------------------------------------------------
// Generators

std::size_t target_edge_count(const GeneratorConfig& config) {
  if (config.nodes == 0 || config.edge_size < 2 || !(config.mean_hyperdegree > 0.0))
    throw InvalidInput("generator needs nodes >= 1, edge size >= 2 and a positive mean hyperdegree");
  const double exact =
      static_cast<double>(config.nodes) * config.mean_hyperdegree / static_cast<double>(config.edge_size);
  const auto m = static_cast<std::size_t>(std::floor(exact + 0.5));
  if (m < 1) throw InvalidInput("mean hyperdegree too small: no hyperedge would be generated");
  return m;
}

double static_model_exponent(double gamma) {
  if (!(gamma > 2.0)) throw InvalidInput("static scale-free model needs gamma > 2");
  return 1.0 / (gamma - 1.0);
}

namespace {

void check_config(const GeneratorConfig& config) {
  if (config.nodes < config.edge_size)
    throw InvalidInput("need at least as many nodes as the hyperedge size");
  if (config.max_attempts == 0) throw InvalidInput("max_attempts must be positive");
}

// Robert Floyd's sampling of k distinct values from [0, n).
void sample_distinct_uniform(Engine& rng, std::size_t n, std::size_t k, std::vector<NodeId>& out) {
  out.clear();
  for (std::size_t j = n - k; j < n; ++j) {
    const auto t = static_cast<NodeId>(uniform_below(rng, j + 1));
    if (std::find(out.begin(), out.end(), t) == out.end())
      out.push_back(t);
    else
      out.push_back(static_cast<NodeId>(j));
  }
  std::sort(out.begin(), out.end());
}

template <typename DrawEdge>
Hypergraph generate_covering(const GeneratorConfig& config, Engine& rng, DrawEdge draw_edge) {
  const std::size_t m = target_edge_count(config);
  std::vector<std::vector<NodeId>> edges(m);
  std::vector<std::size_t> degree(config.nodes);
  for (std::size_t attempt = 0; attempt < config.max_attempts; ++attempt) {
    std::fill(degree.begin(), degree.end(), 0);
    for (auto& edge : edges) {
      draw_edge(rng, edge);
      for (NodeId v : edge) ++degree[v];
    }
    if (std::find(degree.begin(), degree.end(), 0) == degree.end())
      return Hypergraph(config.nodes, config.edge_size, std::move(edges));
  }
  throw InvalidInput("cannot cover all nodes after " + std::to_string(config.max_attempts) +
                     " attempts: mean hyperdegree too small for " + std::to_string(config.nodes) +
                     " nodes");
}

}  // namespace

Hypergraph generate_er(const GeneratorConfig& config) {
  if (config.kind != GeneratorKind::ER) throw InvalidInput("generate_er called with a non-ER config");
  check_config(config);
  Engine rng(config.seed);
  return generate_covering(config, rng, [&](Engine& g, std::vector<NodeId>& edge) {
    sample_distinct_uniform(g, config.nodes, config.edge_size, edge);
  });
}

Hypergraph generate_ba(const GeneratorConfig& config) {
  if (config.kind != GeneratorKind::BA) throw InvalidInput("generate_ba called with a non-BA config");
  check_config(config);
  const double alpha = static_model_exponent(config.gamma);
  std::vector<double> cumulative(config.nodes);
  double total = 0.0;
  for (std::size_t i = 0; i < config.nodes; ++i) {
    total += std::pow(static_cast<double>(i + 1), -alpha);
    cumulative[i] = total;
  }
  Engine rng(config.seed);
  return generate_covering(config, rng, [&](Engine& g, std::vector<NodeId>& edge) {
    edge.clear();
    while (edge.size() < config.edge_size) {
      const double u = uniform01(g) * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      if (it == cumulative.end()) --it;
      const auto v = static_cast<NodeId>(it - cumulative.begin());
      if (std::find(edge.begin(), edge.end(), v) == edge.end()) edge.push_back(v);
    }
    std::sort(edge.begin(), edge.end());
  });
}

Hypergraph generate(const GeneratorConfig& config) {
  return config.kind == GeneratorKind::ER ? generate_er(config) : generate_ba(config);
}

GeneratorKind parse_generator_kind(std::string_view text) {
  if (text == "ER" || text == "er") return GeneratorKind::ER;
  if (text == "BA" || text == "ba") return GeneratorKind::BA;
  throw InvalidInput("unknown generator kind '" + std::string(text) + "' (expected ER or BA)");
}

std::string_view to_string(GeneratorKind kind) { return kind == GeneratorKind::ER ? "ER" : "BA"; }

// ---------------------------------------------------------------------------
// Hyperedge-list files

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Hypergraph load_hyperedge_list(std::string_view text, std::optional<std::size_t> dimension_filter) {
  if (dimension_filter && *dimension_filter < 2) throw InvalidInput("dimension filter must be >= 2");

  std::vector<std::vector<std::string>> kept;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }

    std::vector<std::string> edge;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto comma = line.find(',', start);
      if (comma == std::string_view::npos) comma = line.size();
      const auto label = trim(line.substr(start, comma - start));
      if (label.empty()) throw InvalidInput("line " + std::to_string(line_no) + ": empty node label");
      if (std::find(edge.begin(), edge.end(), label) != edge.end())
        throw InvalidInput("line " + std::to_string(line_no) + ": duplicate member '" +
                           std::string(label) + "' in hyperedge");
      edge.emplace_back(label);
      start = comma + 1;
      if (comma == line.size()) break;
    }
    if (!dimension_filter || edge.size() == *dimension_filter) kept.push_back(std::move(edge));
    if (end == text.size()) break;
  }

  if (kept.empty()) throw InvalidInput("no hyperedges left after filtering");
  const std::size_t sigma = dimension_filter ? *dimension_filter : kept.front().size();
  for (const auto& edge : kept)
    if (edge.size() != sigma)
      throw InvalidInput("mixed hyperedge sizes; pass a dimension filter to select one size");

  std::unordered_map<std::string, NodeId> index;
  std::vector<std::string> labels;
  std::vector<std::vector<NodeId>> edges;
  edges.reserve(kept.size());
  for (const auto& edge : kept) {
    std::vector<NodeId> ids;
    for (const auto& label : edge) {
      auto [it, inserted] = index.try_emplace(label, static_cast<NodeId>(labels.size()));
      if (inserted) labels.push_back(label);
      ids.push_back(it->second);
    }
    edges.push_back(std::move(ids));
  }
  const std::size_t n = labels.size();
  return Hypergraph(n, sigma, std::move(edges), std::move(labels));
}

Hypergraph load_hyperedge_file(const std::string& path, std::optional<std::size_t> dimension_filter) {
  return load_hyperedge_list(read_text_file(path), dimension_filter);
}

std::string serialize_hyperedge_list(const Hypergraph& h) {
  std::string out;
  std::vector<NodeId> row;
  for (EdgeId e = 0; e < h.edge_count(); ++e) {
    const auto m = h.members(e);
    row.assign(m.begin(), m.end());
    std::sort(row.begin(), row.end());
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (s) out += ',';
      out += h.label(row[s]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace structures {

Hypergraph fully_connected(std::size_t nodes, std::size_t edge_size) {
  if (edge_size > nodes) throw InvalidInput("hyperedge size exceeds node count");
  std::vector<std::vector<NodeId>> edges;
  std::vector<NodeId> pick(edge_size);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    edges.push_back(pick);
    std::size_t pos = edge_size;
    while (pos > 0 && pick[pos - 1] == nodes - edge_size + pos - 1) --pos;
    if (pos == 0) break;
    ++pick[pos - 1];
    for (std::size_t j = pos; j < edge_size; ++j) pick[j] = pick[j - 1] + 1;
  }
  return Hypergraph(nodes, edge_size, std::move(edges));
}

Hypergraph two_edge() { return Hypergraph(4, 3, {{0, 1, 2}, {1, 2, 3}}); }

Hypergraph ring_of_four() { return Hypergraph(6, 3, {{0, 1, 2}, {1, 2, 3}, {3, 4, 5}, {4, 5, 0}}); }

Hypergraph chain_of_three() { return Hypergraph(6, 3, {{0, 1, 2}, {1, 2, 3}, {3, 4, 5}}); }

Hypergraph six_node_three_regular() {
  return Hypergraph(6, 3, {{0, 1, 2}, {3, 4, 5}, {0, 1, 3}, {2, 4, 5}, {0, 2, 4}, {1, 3, 5}});
}

Hypergraph circulant(std::size_t nodes, std::size_t edge_size) {
  if (edge_size > nodes) throw InvalidInput("hyperedge size exceeds node count");
  std::vector<std::vector<NodeId>> edges(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t s = 0; s < edge_size; ++s) edges[i].push_back(static_cast<NodeId>((i + s) % nodes));
  return Hypergraph(nodes, edge_size, std::move(edges));
}

}  // namespace structures

}  // namespace hgcoop
