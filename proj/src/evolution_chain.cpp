#include "hgcoop/evolution_chain.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "hgcoop/errors.hpp"
#include "hgcoop/parallel.hpp"
#include "json.hpp"

namespace hgcoop {

StrategySpace::StrategySpace(const Hypergraph& h, std::size_t state_cap) {
  const std::size_t n = h.node_count();
  radix_.resize(n);
  stride_.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    radix_[i] = h.hyperdegree(i) + 1;
    stride_[i] = states_;
    if (states_ > state_cap / radix_[i])
      throw InvalidInput("strategy space exceeds the cap of " + std::to_string(state_cap) + " states");
    states_ *= radix_[i];
  }
}

std::size_t StrategySpace::encode(std::span<const std::size_t> options) const {
  if (options.size() != players()) throw InvalidInput("option vector length does not match player count");
  std::size_t s = 0;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (options[i] >= radix_[i]) throw InvalidInput("option index out of range");
    s += options[i] * stride_[i];
  }
  return s;
}

std::vector<std::size_t> StrategySpace::decode(std::size_t state) const {
  std::vector<std::size_t> out(players());
  for (NodeId i = 0; i < players(); ++i) out[i] = option(state, i);
  return out;
}

ContributionMatrix StrategySpace::contributions(const Hypergraph& h, std::size_t state) const {
  ContributionMatrix x(h);
  for (NodeId i = 0; i < players(); ++i) {
    const std::size_t o = option(state, i);
    if (o == 0) continue;
    const auto& pin = h.incidence(i)[o - 1];
    x.at(pin.edge, pin.slot) = 1.0;
  }
  return x;
}

void EvolutionParams::validate(std::size_t states) const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be a nonnegative finite number");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in [0,1]");
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in [0,1) for the discounted steady state");
  if (!v0.empty()) {
    if (v0.size() != states) throw InvalidInput("initial distribution length does not match the state count");
    double total = 0.0;
    for (double p : v0) {
      if (!(p >= 0.0)) throw InvalidInput("initial distribution has a negative entry");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-10) throw InvalidInput("initial distribution does not sum to 1");
  }
}

double fermi_adoption(double du, const EvolutionParams& params) {
  const double a = 1.0 / (1.0 + std::exp(-params.beta * du));
  return (1.0 - params.epsilon) * a + params.epsilon * (1.0 - a);
}

PayoffModel public_goods_payoffs(const Hypergraph& h, std::span<const double> e, std::span<const double> r) {
  if (e.size() != h.node_count() || r.size() != h.node_count())
    throw InvalidInput("endowment or productivity length does not match node count");
  std::vector<double> ev(e.begin(), e.end()), rv(r.begin(), r.end());
  const Hypergraph* hp = &h;
  return [hp, ev = std::move(ev), rv = std::move(rv)](const ContributionMatrix& x, std::span<double> u) {
    const Hypergraph& g = *hp;
    const double sigma = static_cast<double>(g.edge_size());
    for (NodeId i = 0; i < g.node_count(); ++i) u[i] = 0.0;
    std::vector<double> row(g.node_count(), 0.0);
    for (EdgeId k = 0; k < g.edge_count(); ++k) {
      const auto mem = g.members(k);
      double pot = 0.0;
      for (std::uint32_t s = 0; s < mem.size(); ++s) {
        pot += rv[mem[s]] * x.at(k, s) * ev[mem[s]];
        row[mem[s]] += x.at(k, s);
      }
      for (NodeId j : mem) u[j] += pot / sigma;
    }
    for (NodeId i = 0; i < g.node_count(); ++i) u[i] += (1.0 - row[i]) * ev[i];
  };
}

std::vector<double> state_payoffs(const Hypergraph& h, const StrategySpace& space, const PayoffModel& model,
                                  unsigned jobs) {
  const std::size_t n = space.players();
  std::vector<double> u(space.state_count() * n);
  constexpr std::size_t block = 1024;
  const std::size_t blocks = (space.state_count() + block - 1) / block;
  parallel_for(blocks, jobs, [&](std::size_t b) {
    const std::size_t end = std::min(space.state_count(), (b + 1) * block);
    for (std::size_t s = b * block; s < end; ++s)
      model(space.contributions(h, s), std::span<double>(u.data() + s * n, n));
  });
  return u;
}

TransitionMatrix build_transition_matrix(const StrategySpace& space, std::span<const double> payoffs,
                                         const EvolutionParams& params, const AdoptionRule& rule, unsigned jobs) {
  const std::size_t states = space.state_count();
  const std::size_t n = space.players();
  params.validate(states);
  if (payoffs.size() != states * n) throw InvalidInput("payoff table does not match the strategy space");
  using Triplet = Eigen::Triplet<double, std::int64_t>;
  constexpr std::size_t block = 1024;
  const std::size_t blocks = (states + block - 1) / block;
  std::vector<std::vector<Triplet>> parts(blocks);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    auto& out = parts[b];
    const std::size_t end = std::min(states, (b + 1) * block);
    for (std::size_t s = b * block; s < end; ++s) {
      double stay = 1.0;
      for (NodeId i = 0; i < n; ++i) {
        const std::size_t k = space.option_count(i) - 1;  // alternatives
        if (k == 0) continue;
        const std::size_t cur = space.option(s, i);
        const double pick = 1.0 / (static_cast<double>(n) * static_cast<double>(k));
        for (std::size_t o = 0; o < k + 1; ++o) {
          if (o == cur) continue;
          const std::size_t t = s - cur * space.stride(i) + o * space.stride(i);
          const double du = payoffs[t * n + i] - payoffs[s * n + i];
          const double p = pick * rule(du, params);
          if (p > 0.0) {
            out.emplace_back(static_cast<std::int64_t>(s), static_cast<std::int64_t>(t), p);
            stay -= p;
          }
        }
      }
      out.emplace_back(static_cast<std::int64_t>(s), static_cast<std::int64_t>(s), std::max(0.0, stay));
    }
  });
  std::vector<Triplet> all;
  for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  TransitionMatrix t;
  t.p.resize(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
  t.p.setFromTriplets(all.begin(), all.end());
  t.p.makeCompressed();
  return t;
}

TransitionMatrix build_transition_matrix(const Hypergraph& h, const StrategySpace& space,
                                         std::span<const double> e, std::span<const double> r,
                                         const EvolutionParams& params, unsigned jobs) {
  const auto u = state_payoffs(h, space, public_goods_payoffs(h, e, r), jobs);
  return build_transition_matrix(space, u, params, fermi_adoption, jobs);
}

namespace {

Eigen::VectorXd initial(const TransitionMatrix& t, const EvolutionParams& params) {
  const auto n = static_cast<Eigen::Index>(t.size());
  if (params.v0.empty()) return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return Eigen::Map<const Eigen::VectorXd>(params.v0.data(), n);
}

}  // namespace

std::vector<double> steady_state(const TransitionMatrix& t, const EvolutionParams& params) {
  params.validate(t.size());
  const auto n = static_cast<Eigen::Index>(t.size());
  const Eigen::VectorXd v0 = initial(t, params);
  const Eigen::VectorXd rhs = (1.0 - params.delta) * v0;
  Eigen::VectorXd v;
  if (t.size() <= kDenseStateLimit) {
    // (I - delta P)^T v = (1 - delta) v0
    Eigen::MatrixXd a = -params.delta * Eigen::MatrixXd(t.p).transpose();
    a.diagonal().array() += 1.0;
    v = a.partialPivLu().solve(rhs);
  } else {
    const Eigen::SparseMatrix<double, Eigen::ColMajor> pt = t.p.transpose();
    v = v0;
    bool converged = false;
    for (int it = 0; it < 1'000'000; ++it) {
      Eigen::VectorXd next = rhs + params.delta * (pt * v);
      const double change = (next - v).cwiseAbs().maxCoeff();
      v.swap(next);
      // Remaining error is at most change * delta / (1 - delta).
      if (change * params.delta <= 1e-10 * (1.0 - params.delta) * 1e-2) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalFailure("steady-state iteration did not converge");
  }
  if (!v.allFinite()) throw NumericalFailure("steady-state solve produced non-finite values");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index s = 0; s < n; ++s) out[static_cast<std::size_t>(s)] = v(s);
  return out;
}

double steady_state_residual(const TransitionMatrix& t, std::span<const double> v, const EvolutionParams& params) {
  const auto n = static_cast<Eigen::Index>(t.size());
  if (v.size() != t.size()) throw InvalidInput("distribution length does not match the chain");
  const Eigen::Map<const Eigen::VectorXd> vv(v.data(), n);
  const Eigen::VectorXd lhs = vv - params.delta * (t.p.transpose() * vv);
  return (lhs - (1.0 - params.delta) * initial(t, params)).cwiseAbs().maxCoeff();
}

double expected_total_payoff(const StrategySpace& space, std::span<const double> v, std::span<const double> payoffs) {
  const std::size_t n = space.players();
  if (v.size() != space.state_count() || payoffs.size() != v.size() * n)
    throw InvalidInput("distribution or payoff table does not match the strategy space");
  double pi = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (v[s] == 0.0) continue;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += payoffs[s * n + i];
    pi += v[s] * total;
  }
  return pi;
}

ChainResult solve_chain(const Hypergraph& h, std::span<const double> e, std::span<const double> r,
                        const EvolutionParams& params, unsigned jobs, std::size_t state_cap) {
  const StrategySpace space(h, state_cap);
  const auto u = state_payoffs(h, space, public_goods_payoffs(h, e, r), jobs);
  const auto t = build_transition_matrix(space, u, params, fermi_adoption, jobs);
  ChainResult out;
  out.state_count = space.state_count();
  out.params = params;
  out.v = steady_state(t, params);
  out.residual = steady_state_residual(t, out.v, params);
  out.total_payoff = expected_total_payoff(space, out.v, u);
  return out;
}

std::string chain_report_json(const ChainResult& result) {
  nlohmann::ordered_json j;
  j["state_count"] = result.state_count;
  j["params"] = {{"beta", result.params.beta}, {"epsilon", result.params.epsilon}, {"delta", result.params.delta}};
  j["update_rule"] = result.update_rule;
  auto v = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < result.v.size(); ++s)
    if (result.v[s] >= 1e-12) v.push_back({{"state", s}, {"p", result.v[s]}});
  j["v"] = std::move(v);
  j["Pi_total"] = result.total_payoff;
  j["residual"] = result.residual;
  return j.dump(2);
}

}  // namespace hgcoop
