#include "hgcoop/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hgcoop/errors.hpp"

namespace hgcoop {

EndowmentVector::EndowmentVector(std::vector<double> shares, double tolerance) : shares_(std::move(shares)) {
  if (shares_.empty()) throw InvalidInput("endowment vector is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < shares_.size(); ++i) {
    const double v = shares_[i];
    if (!(v >= 0.0 && v <= 1.0))
      throw InvalidInput("endowment " + std::to_string(i) + " = " + std::to_string(v) + " outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    std::ostringstream msg;
    msg << "endowments sum to " << sum << ", off the simplex by " << std::abs(sum - 1.0);
    throw InvalidInput(msg.str());
  }
}

EndowmentVector EndowmentVector::equal(std::size_t n) {
  if (n == 0) throw InvalidInput("endowment vector is empty");
  return EndowmentVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProductivityProfile::ProductivityProfile(std::vector<double> r) : r_(std::move(r)) {
  for (std::size_t i = 0; i < r_.size(); ++i)
    if (!(r_[i] > 0.0) || !std::isfinite(r_[i]))
      throw InvalidInput("productivity " + std::to_string(i) + " must be positive and finite");
}

ProductivityProfile ProductivityProfile::symmetric(std::size_t n, double r) {
  return ProductivityProfile(std::vector<double>(n, r));
}

bool ProductivityProfile::in_dilemma_range(std::size_t sigma) const {
  const double s = static_cast<double>(sigma);
  return std::all_of(r_.begin(), r_.end(), [s](double v) { return v > 1.0 && v < s; });
}

// ---------------------------------------------------------------------------

ContributionMatrix::ContributionMatrix(const Hypergraph& h)
    : edge_count_(h.edge_count()), edge_size_(h.edge_size()), x_(h.edge_count() * h.edge_size(), 0.0) {}

ContributionMatrix ContributionMatrix::from_entries(const Hypergraph& h, std::span<const Entry> entries) {
  ContributionMatrix x(h);
  for (const auto& entry : entries) {
    if (entry.node >= h.node_count() || entry.edge >= h.edge_count())
      throw InvalidInput("contribution entry (" + std::to_string(entry.node) + ", " +
                         std::to_string(entry.edge) + ") out of range");
    const auto slot = h.slot_of(entry.node, entry.edge);
    if (!slot)
      throw InvalidInput("support violation: node " + std::to_string(entry.node) +
                         " is not a member of hyperedge " + std::to_string(entry.edge));
    x.at(entry.edge, *slot) = entry.value;
  }
  return x;
}

double ContributionMatrix::get(const Hypergraph& h, NodeId i, EdgeId e) const {
  const auto slot = h.slot_of(i, e);
  return slot ? at(e, *slot) : 0.0;
}

double ContributionMatrix::row_sum(const Hypergraph& h, NodeId i) const {
  double s = 0.0;
  for (const auto& inc : h.incidence(i)) s += at(inc.edge, inc.slot);
  return s;
}

void ContributionMatrix::zero_row(const Hypergraph& h, NodeId i) {
  for (const auto& inc : h.incidence(i)) at(inc.edge, inc.slot) = 0.0;
}

bool ContributionMatrix::is_full_cooperation(const Hypergraph& h, double tolerance) const {
  for (NodeId i = 0; i < h.node_count(); ++i)
    if (std::abs(row_sum(h, i) - 1.0) > tolerance) return false;
  return true;
}

void ContributionMatrix::validate(const Hypergraph& h, double tolerance) const {
  if (edge_count_ != h.edge_count() || edge_size_ != h.edge_size())
    throw InvalidInput("contribution matrix shape does not match the hypergraph");
  for (EdgeId e = 0; e < edge_count_; ++e)
    for (std::uint32_t s = 0; s < edge_size_; ++s) {
      const double v = at(e, s);
      if (!(v >= 0.0 && v <= 1.0))
        throw InvalidInput("contribution of node " + std::to_string(h.members(e)[s]) + " to hyperedge " +
                           std::to_string(e) + " outside [0,1]");
    }
  for (NodeId i = 0; i < h.node_count(); ++i)
    if (row_sum(h, i) > 1.0 + tolerance)
      throw InvalidInput("contribution row " + std::to_string(i) + " sums above 1");
}

std::vector<ContributionMatrix::Entry> ContributionMatrix::entries(const Hypergraph& h) const {
  std::vector<Entry> out;
  for (NodeId i = 0; i < h.node_count(); ++i)
    for (const auto& inc : h.incidence(i)) out.push_back({i, inc.edge, at(inc.edge, inc.slot)});
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_productivity(const ProductivityProfile& r, std::size_t sigma, const GameOptions& options) {
  if (!options.relaxed_productivity && !r.in_dilemma_range(sigma))
    throw InvalidInput("productivity outside the social-dilemma range 1 < r < " + std::to_string(sigma));
}

double clamp_numerator(double sigma_minus_r, const GameOptions& options) {
  return options.relaxed_productivity ? std::max(0.0, sigma_minus_r) : sigma_minus_r;
}

}  // namespace

GameInstance::GameInstance(std::shared_ptr<const Hypergraph> graph, EndowmentVector e, ProductivityProfile r,
                           ContributionMatrix x, double delta, GameOptions options)
    : graph_(std::move(graph)), e_(std::move(e)), r_(std::move(r)), x_(std::move(x)), delta_(delta),
      options_(options) {
  if (!graph_) throw InvalidInput("game needs a hypergraph");
  const std::size_t n = graph_->node_count();
  if (e_.size() != n) throw InvalidInput("endowment vector length does not match node count");
  if (r_.size() != n) throw InvalidInput("productivity profile length does not match node count");
  if (!(delta_ >= 0.0 && delta_ <= 1.0)) throw InvalidInput("continuation probability must lie in [0,1]");
  check_productivity(r_, graph_->edge_size(), options_);
  x_.validate(*graph_, options_.tolerance);
}

GameInstance::GameInstance(Hypergraph graph, EndowmentVector e, ProductivityProfile r, ContributionMatrix x,
                           double delta, GameOptions options)
    : GameInstance(std::make_shared<const Hypergraph>(std::move(graph)), std::move(e), std::move(r),
                   std::move(x), delta, options) {}

GameInstance GameInstance::with_delta(double delta) const {
  return GameInstance(graph_, e_, r_, x_, delta, options_);
}

double payoff(const Hypergraph& h, std::span<const double> e, std::span<const double> r,
              const ContributionMatrix& x, NodeId i) {
  const double sigma = static_cast<double>(h.edge_size());
  double shared = 0.0;
  double given = 0.0;
  for (const auto& inc : h.incidence(i)) {
    const auto members = h.members(inc.edge);
    double pot = 0.0;
    for (std::uint32_t s = 0; s < members.size(); ++s) pot += r[members[s]] * x.at(inc.edge, s) * e[members[s]];
    shared += pot / sigma;
    given += x.at(inc.edge, inc.slot);
  }
  return shared + (1.0 - given) * e[i];
}

double payoff(const GameInstance& g, NodeId i) {
  if (i >= g.graph().node_count()) throw InvalidInput("player index out of range");
  return payoff(g.graph(), g.endowments().values(), g.productivity().values(), g.contributions(), i);
}

DeviationPayoffs deviation_payoffs(const GameInstance& g, NodeId i) {
  const auto& h = g.graph();
  if (i >= h.node_count()) throw InvalidInput("player index out of range");
  if (!g.contributions().is_full_cooperation(h, g.options().tolerance))
    throw InvalidInput("deviation payoffs need a full-cooperation contribution matrix");
  const auto e = g.endowments().values();
  const auto r = g.productivity().values();
  ContributionMatrix solo = g.contributions();
  solo.zero_row(h, i);
  return {payoff(h, e, r, g.contributions(), i), payoff(h, e, r, solo, i), e[i]};
}

double threshold_ratio(double numerator, double denominator) {
  if (numerator <= 0.0) return 0.0;
  if (denominator <= 0.0) return kInfinity;
  return numerator / denominator;
}

namespace {

double direct_denominator(const GameInstance& g, NodeId i) {
  const auto& h = g.graph();
  const auto e = g.endowments().values();
  const auto r = g.productivity().values();
  double d = 0.0;
  for (const auto& inc : h.incidence(i)) {
    const auto members = h.members(inc.edge);
    for (std::uint32_t s = 0; s < members.size(); ++s)
      if (s != inc.slot) d += r[members[s]] * g.contributions().at(inc.edge, s) * e[members[s]];
  }
  return d;
}

}  // namespace

double node_threshold(const GameInstance& g, NodeId i) {
  if (i >= g.graph().node_count()) throw InvalidInput("player index out of range");
  const double sigma = static_cast<double>(g.graph().edge_size());
  const double numerator = clamp_numerator(sigma - g.productivity()[i], g.options()) * g.endowments()[i];
  return threshold_ratio(numerator, direct_denominator(g, i));
}

std::string_view to_string(Feasibility f) {
  return f == Feasibility::FeasibleBelowOne ? "feasible" : "infeasible";
}

ThresholdReport threshold_report(const GameInstance& g) {
  if (!g.contributions().is_full_cooperation(g.graph(), g.options().tolerance))
    throw InvalidInput("threshold report needs a full-cooperation contribution matrix");
  ThresholdReport report;
  const std::size_t n = g.graph().node_count();
  report.per_node.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    report.per_node[i] = node_threshold(g, i);
    if (g.endowments()[i] > 0.0) report.delta_star = std::max(report.delta_star, report.per_node[i]);
  }
  report.feasibility = report.delta_star <= 1.0 + g.options().tolerance ? Feasibility::FeasibleBelowOne
                                                                       : Feasibility::Infeasible;
  return report;
}

bool grim_is_equilibrium(const GameInstance& g) {
  for (NodeId i = 0; i < g.graph().node_count(); ++i) {
    if (!(g.endowments()[i] > 0.0)) continue;
    const auto u = deviation_payoffs(g, i);
    const double gain = u.solo_defect - u.full;
    if (g.delta() * (u.solo_defect - u.all_defect) < gain - g.options().tolerance) return false;
  }
  return true;
}

std::string threshold_report_csv(const GameInstance& g, const ThresholdReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "node_id,e_i,r_i,k_i,delta_i_star\n";
  const auto& h = g.graph();
  for (NodeId i = 0; i < h.node_count(); ++i) {
    out << h.label(i) << ',' << g.endowments()[i] << ',' << g.productivity()[i] << ',' << h.hyperdegree(i) << ',';
    if (std::isinf(report.per_node[i]))
      out << "inf";
    else
      out << report.per_node[i];
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

ThresholdKernel::ThresholdKernel(const Hypergraph& h, std::span<const double> r, const ContributionMatrix& x,
                                 GameOptions options) {
  const std::size_t n = h.node_count();
  if (r.size() != n) throw InvalidInput("productivity profile length does not match node count");
  check_productivity(ProductivityProfile(std::vector<double>(r.begin(), r.end())), h.edge_size(), options);
  x.validate(h, options.tolerance);

  const double sigma = static_cast<double>(h.edge_size());
  numerators_.resize(n);
  offsets_.assign(n + 1, 0);
  std::vector<double> row(n, 0.0);
  std::vector<NodeId> touched;
  for (NodeId i = 0; i < n; ++i) {
    numerators_[i] = clamp_numerator(sigma - r[i], options);
    touched.clear();
    for (const auto& inc : h.incidence(i)) {
      const auto members = h.members(inc.edge);
      for (std::uint32_t s = 0; s < members.size(); ++s) {
        if (s == inc.slot) continue;
        const NodeId j = members[s];
        if (row[j] == 0.0) touched.push_back(j);
        row[j] += r[j] * x.at(inc.edge, s);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (NodeId j : touched) {
      if (row[j] > 0.0) terms_.push_back({j, row[j]});
      row[j] = 0.0;
    }
    offsets_[i + 1] = terms_.size();
  }
}

double ThresholdKernel::denominator(std::span<const double> e, NodeId i) const {
  double d = 0.0;
  for (const auto& t : coupling(i)) d += t.weight * e[t.node];
  return d;
}

double ThresholdKernel::threshold(std::span<const double> e, NodeId i) const {
  return threshold_ratio(numerators_[i] * e[i], denominator(e, i));
}

std::vector<double> ThresholdKernel::thresholds(std::span<const double> e) const {
  std::vector<double> out(size());
  for (NodeId i = 0; i < size(); ++i) out[i] = threshold(e, i);
  return out;
}

double ThresholdKernel::delta_star(std::span<const double> e) const {
  double best = 0.0;
  for (NodeId i = 0; i < size(); ++i)
    if (e[i] > 0.0) best = std::max(best, threshold(e, i));
  return best;
}

}  // namespace hgcoop
