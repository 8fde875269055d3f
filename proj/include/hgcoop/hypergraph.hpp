#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hgcoop {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

// One pin of the incidence structure: node i sits at `slot` of hyperedge `edge`.
struct Incidence {
  EdgeId edge;
  std::uint32_t slot;
};

// Uniform hypergraph: every hyperedge has exactly edge_size() distinct members.
// Members are stored flat, edge-major; per-node incidence is kept in CSR form.
// Immutable after construction.
class Hypergraph {
 public:
  Hypergraph() = default;

  // Throws InvalidInput on out-of-range or repeated members, or on a hyperedge
  // whose size differs from edge_size.
  Hypergraph(std::size_t node_count, std::size_t edge_size,
             std::vector<std::vector<NodeId>> hyperedges,
             std::vector<std::string> labels = {});

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_size() const { return edge_size_; }
  std::size_t edge_count() const { return edge_size_ == 0 ? 0 : members_.size() / edge_size_; }

  std::span<const NodeId> members(EdgeId e) const {
    return {members_.data() + static_cast<std::size_t>(e) * edge_size_, edge_size_};
  }
  std::span<const Incidence> incidence(NodeId i) const {
    return {incidence_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t hyperdegree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }

  // Position of node i inside hyperedge e, if it is a member.
  std::optional<std::uint32_t> slot_of(NodeId i, EdgeId e) const;

  std::vector<NodeId> isolated_nodes() const;
  bool has_isolated_nodes() const { return !isolated_nodes().empty(); }

  // Empty unless the hypergraph came from a labelled source.
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(NodeId i) const;

  // The same hypergraph with node i renamed to perm[i].
  Hypergraph relabeled(std::span<const NodeId> perm) const;

  bool operator==(const Hypergraph& other) const {
    return node_count_ == other.node_count_ && edge_size_ == other.edge_size_ &&
           members_ == other.members_;
  }

 private:
  std::size_t node_count_ = 0;
  std::size_t edge_size_ = 0;
  std::vector<NodeId> members_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> incidence_;
  std::vector<std::string> labels_;
};

std::vector<std::size_t> hyperdegrees(const Hypergraph& h);

enum class GeneratorKind { ER, BA };

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::ER;
  std::size_t nodes = 0;
  double mean_hyperdegree = 0.0;
  std::size_t edge_size = 3;
  double gamma = 2.5;  // BA only
  std::uint64_t seed = 0;
  std::size_t max_attempts = 1000;
};

// round(N * <k> / sigma) with halves rounded up.
std::size_t target_edge_count(const GeneratorConfig& config);

// Static-model exponent alpha = 1 / (gamma - 1).
double static_model_exponent(double gamma);

// Each hyperedge takes edge_size distinct nodes uniformly at random; a draw
// that leaves any node uncovered is thrown away and redrawn from the same
// engine. Throws InvalidInput("cannot cover all nodes ...") once
// max_attempts draws have failed.
Hypergraph generate_er(const GeneratorConfig& config);

// Static scale-free model: node i has weight (i+1)^(-alpha), and each
// hyperedge picks edge_size distinct nodes with probability proportional to
// weight. Same retry rule as generate_er.
Hypergraph generate_ba(const GeneratorConfig& config);

Hypergraph generate(const GeneratorConfig& config);

GeneratorKind parse_generator_kind(std::string_view text);
std::string_view to_string(GeneratorKind kind);

// Comma-separated labels, one hyperedge per line, '#' starts a comment line.
// With dimension_filter = d only hyperedges of exactly d members are kept and
// nodes that no longer appear anywhere are dropped; labels are indexed in
// first-seen order among the kept hyperedges.
Hypergraph load_hyperedge_list(std::string_view text,
                               std::optional<std::size_t> dimension_filter = std::nullopt);
Hypergraph load_hyperedge_file(const std::string& path,
                               std::optional<std::size_t> dimension_filter = std::nullopt);

// Canonical text form: members sorted by index, edges in construction order,
// written with their labels when the hypergraph has them.
std::string serialize_hyperedge_list(const Hypergraph& h);

// Small named structures used throughout the figure recipes.
namespace structures {
// All C(n, sigma) hyperedges.
Hypergraph fully_connected(std::size_t nodes, std::size_t edge_size);
// {0,1,2}, {1,2,3}: two triads sharing two players.
Hypergraph two_edge();
// {0,1,2}, {1,2,3}, {3,4,5}, {4,5,0}: six players, every hyperdegree 2.
Hypergraph ring_of_four();
// {0,1,2}, {1,2,3}, {3,4,5}: hyperdegrees (1,2,2,2,1,1).
Hypergraph chain_of_three();
// Six players, six triads, every hyperdegree 3.
Hypergraph six_node_three_regular();
// Consecutive windows {i, i+1, ..., i+sigma-1} mod n: hyperdegree sigma everywhere.
Hypergraph circulant(std::size_t nodes, std::size_t edge_size);
}  // namespace structures

}  // namespace hgcoop
