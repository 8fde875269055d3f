#pragma once

#include <Eigen/SparseCore>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hgcoop/game.hpp"
#include "hgcoop/hypergraph.hpp"

namespace hgcoop {

// Pure strategies: option 0 is the all-zero row, option t (1..k_i) puts the
// whole endowment on the t-th incident hyperedge. States are mixed-radix
// numbers with player 0 varying fastest.
class StrategySpace {
 public:
  StrategySpace(const Hypergraph& h, std::size_t state_cap = 1'000'000);

  std::size_t players() const { return radix_.size(); }
  std::size_t state_count() const { return states_; }
  std::size_t option_count(NodeId i) const { return radix_[i]; }
  std::size_t stride(NodeId i) const { return stride_[i]; }

  std::size_t option(std::size_t state, NodeId i) const { return (state / stride_[i]) % radix_[i]; }
  std::size_t encode(std::span<const std::size_t> options) const;
  std::vector<std::size_t> decode(std::size_t state) const;

  ContributionMatrix contributions(const Hypergraph& h, std::size_t state) const;

 private:
  std::vector<std::size_t> radix_;
  std::vector<std::size_t> stride_;
  std::size_t states_ = 1;
};

struct EvolutionParams {
  double beta = 1.0;
  double epsilon = 0.0;
  double delta = 0.9;
  std::vector<double> v0;  // empty means uniform

  void validate(std::size_t states) const;
};

// Probability that a considered switch with own-payoff gain du is adopted.
using AdoptionRule = std::function<double(double du, const EvolutionParams&)>;

// Logistic (Fermi) adoption 1 / (1 + exp(-beta du)), inverted with
// probability epsilon.
double fermi_adoption(double du, const EvolutionParams& params);
inline constexpr const char* kFermiRuleName = "fermi-logistic-with-inversion-error";

// Fills u (one entry per player) for the contribution matrix x.
using PayoffModel = std::function<void(const ContributionMatrix& x, std::span<double> u)>;
PayoffModel public_goods_payoffs(const Hypergraph& h, std::span<const double> e, std::span<const double> r);

struct TransitionMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> p;
  std::size_t size() const { return static_cast<std::size_t>(p.rows()); }
};

// u_i for every state, row-major (state, player).
std::vector<double> state_payoffs(const Hypergraph& h, const StrategySpace& space, const PayoffModel& model,
                                  unsigned jobs = 1);

// One player chosen uniformly, one alternative option chosen uniformly,
// adopted with rule(u_i(new) - u_i(old)); remaining mass on the diagonal.
TransitionMatrix build_transition_matrix(const StrategySpace& space, std::span<const double> payoffs,
                                         const EvolutionParams& params, const AdoptionRule& rule = fermi_adoption,
                                         unsigned jobs = 1);
TransitionMatrix build_transition_matrix(const Hypergraph& h, const StrategySpace& space,
                                         std::span<const double> e, std::span<const double> r,
                                         const EvolutionParams& params, unsigned jobs = 1);

// v (I - delta P) = (1 - delta) v0. Dense LU up to kDenseStateLimit states,
// fixed-point iteration above.
inline constexpr std::size_t kDenseStateLimit = 4096;
std::vector<double> steady_state(const TransitionMatrix& t, const EvolutionParams& params);

// max-norm residual of v (I - delta P) - (1 - delta) v0.
double steady_state_residual(const TransitionMatrix& t, std::span<const double> v, const EvolutionParams& params);

// Pi = sum_s v_s sum_i u_i(s).
double expected_total_payoff(const StrategySpace& space, std::span<const double> v, std::span<const double> payoffs);

struct ChainResult {
  std::size_t state_count = 0;
  EvolutionParams params;
  std::vector<double> v;
  double total_payoff = 0.0;
  double residual = 0.0;
  std::string update_rule = kFermiRuleName;
};

ChainResult solve_chain(const Hypergraph& h, std::span<const double> e, std::span<const double> r,
                        const EvolutionParams& params, unsigned jobs = 1, std::size_t state_cap = 1'000'000);

// state_count, params, sparse v (entries >= 1e-12), Pi_total, update_rule.
std::string chain_report_json(const ChainResult& result);

}  // namespace hgcoop
