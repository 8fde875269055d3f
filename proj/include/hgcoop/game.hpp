#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hgcoop/hypergraph.hpp"

namespace hgcoop {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultTolerance = 1e-12;

// Endowment shares on the unit simplex.
class EndowmentVector {
 public:
  EndowmentVector() = default;
  // Throws InvalidInput unless every share is in [0, 1] and they sum to 1
  // within `tolerance`.
  explicit EndowmentVector(std::vector<double> shares, double tolerance = kDefaultTolerance);

  static EndowmentVector equal(std::size_t n);

  std::size_t size() const { return shares_.size(); }
  double operator[](std::size_t i) const { return shares_[i]; }
  std::span<const double> values() const { return shares_; }

 private:
  std::vector<double> shares_;
};

// Per-player productivity multipliers (all positive).
class ProductivityProfile {
 public:
  ProductivityProfile() = default;
  explicit ProductivityProfile(std::vector<double> r);

  static ProductivityProfile symmetric(std::size_t n, double r);

  std::size_t size() const { return r_.size(); }
  double operator[](std::size_t i) const { return r_[i]; }
  std::span<const double> values() const { return r_; }

  // 1 < r_i < sigma for every player.
  bool in_dilemma_range(std::size_t sigma) const;

 private:
  std::vector<double> r_;
};

// Fractions x_ik, stored per incidence pin (hyperedge, slot) so the support
// can never leave the hypergraph's incidence structure.
class ContributionMatrix {
 public:
  ContributionMatrix() = default;
  explicit ContributionMatrix(const Hypergraph& h);  // all zero

  struct Entry {
    NodeId node;
    EdgeId edge;
    double value;
  };
  // Throws InvalidInput when an entry names a non-incident (node, hyperedge) pair.
  static ContributionMatrix from_entries(const Hypergraph& h, std::span<const Entry> entries);

  std::size_t edge_count() const { return edge_count_; }
  std::size_t edge_size() const { return edge_size_; }

  double at(EdgeId e, std::uint32_t slot) const { return x_[e * edge_size_ + slot]; }
  double& at(EdgeId e, std::uint32_t slot) { return x_[e * edge_size_ + slot]; }
  // x_ik, zero off the incidence structure.
  double get(const Hypergraph& h, NodeId i, EdgeId e) const;

  double row_sum(const Hypergraph& h, NodeId i) const;
  void zero_row(const Hypergraph& h, NodeId i);

  std::span<const double> pins() const { return x_; }
  std::span<double> pins() { return x_; }

  bool is_full_cooperation(const Hypergraph& h, double tolerance = kDefaultTolerance) const;
  // Entries in [0,1] and row sums at most 1 (+tolerance); throws InvalidInput otherwise.
  void validate(const Hypergraph& h, double tolerance = kDefaultTolerance) const;

  std::vector<Entry> entries(const Hypergraph& h) const;

 private:
  std::size_t edge_count_ = 0;
  std::size_t edge_size_ = 0;
  std::vector<double> x_;
};

struct GameOptions {
  double tolerance = kDefaultTolerance;
  // Accept r outside (1, sigma); negative sigma - r_i then clamps to a zero
  // threshold. Sensitivity studies only.
  bool relaxed_productivity = false;
};

class GameInstance {
 public:
  // Throws InvalidInput on dimension mismatch, on productivity outside the
  // dilemma range (unless relaxed) or on an invalid contribution matrix.
  GameInstance(std::shared_ptr<const Hypergraph> graph, EndowmentVector e, ProductivityProfile r,
               ContributionMatrix x, double delta = 1.0, GameOptions options = {});
  GameInstance(Hypergraph graph, EndowmentVector e, ProductivityProfile r, ContributionMatrix x,
               double delta = 1.0, GameOptions options = {});

  const Hypergraph& graph() const { return *graph_; }
  std::shared_ptr<const Hypergraph> shared_graph() const { return graph_; }
  const EndowmentVector& endowments() const { return e_; }
  const ProductivityProfile& productivity() const { return r_; }
  const ContributionMatrix& contributions() const { return x_; }
  double delta() const { return delta_; }
  const GameOptions& options() const { return options_; }

  GameInstance with_delta(double delta) const;

 private:
  std::shared_ptr<const Hypergraph> graph_;
  EndowmentVector e_;
  ProductivityProfile r_;
  ContributionMatrix x_;
  double delta_;
  GameOptions options_;
};

// Payoff of player i:
//   u_i = sum_k a_ik / sigma * sum_j r_j x_jk e_j + (1 - sum_k x_ik) e_i.
double payoff(const Hypergraph& h, std::span<const double> e, std::span<const double> r,
              const ContributionMatrix& x, NodeId i);
double payoff(const GameInstance& g, NodeId i);

struct DeviationPayoffs {
  double full;         // everyone cooperates
  double solo_defect;  // i withholds everything, the rest keep cooperating
  double all_defect;   // nobody contributes: e_i
};
// Throws InvalidInput unless the game is at full cooperation.
DeviationPayoffs deviation_payoffs(const GameInstance& g, NodeId i);

// (sigma - r_i) e_i / D_i with D_i = sum_k a_ik sum_{j != i} r_j x_jk e_j.
// Zero numerator gives 0 even when D_i = 0; a positive numerator over D_i = 0
// gives +inf.
double node_threshold(const GameInstance& g, NodeId i);

enum class Feasibility { FeasibleBelowOne, Infeasible };
std::string_view to_string(Feasibility f);

struct ThresholdReport {
  std::vector<double> per_node;
  double delta_star = 0.0;  // max over players with e_i > 0
  Feasibility feasibility = Feasibility::Infeasible;
};

ThresholdReport threshold_report(const GameInstance& g);

// Direct check, for every player with e_i > 0,
//   delta * (u_solo - u_all_defect) >= u_solo - u_full.
bool grim_is_equilibrium(const GameInstance& g);

// Columns node_id,e_i,r_i,k_i,delta_i_star; +inf written as `inf`.
std::string threshold_report_csv(const GameInstance& g, const ThresholdReport& report);

// Fixed (H, r, X): thresholds as a function of the endowment vector alone.
// delta_i*(e) = n_i e_i / (C e)_i, with n_i = sigma - r_i and a sparse
// nonnegative coupling matrix C (diagonal zero).
class ThresholdKernel {
 public:
  ThresholdKernel(const Hypergraph& h, std::span<const double> r, const ContributionMatrix& x,
                  GameOptions options = {});

  std::size_t size() const { return numerators_.size(); }
  double numerator(NodeId i) const { return numerators_[i]; }

  struct Term {
    NodeId node;
    double weight;
  };
  std::span<const Term> coupling(NodeId i) const {
    return {terms_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  double denominator(std::span<const double> e, NodeId i) const;
  double threshold(std::span<const double> e, NodeId i) const;
  std::vector<double> thresholds(std::span<const double> e) const;
  double delta_star(std::span<const double> e) const;

 private:
  std::vector<double> numerators_;
  std::vector<std::size_t> offsets_;
  std::vector<Term> terms_;
};

// Same convention as node_threshold for a ratio of precomputed parts.
double threshold_ratio(double numerator, double denominator);

}  // namespace hgcoop
