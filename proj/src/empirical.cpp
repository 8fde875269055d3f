#include "hgcoop/empirical.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "hgcoop/errors.hpp"
#include "hgcoop/game.hpp"
#include "hgcoop/region_sampler.hpp"

namespace hgcoop::empirical {

double authorship_weight(int position, bool corresponding) {
  if (position < 1) throw InvalidInput("author position must be at least 1");
  const double w = std::ldexp(1.0, -(position - 1));
  return corresponding ? std::max(w, 0.5) : w;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidInput("pearson: sequences differ in length");
  if (xs.size() < 2) throw InvalidInput("pearson: need at least two points");
  double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    mx += dx / n;
    my += dy / n;
    sxx += dx * (xs[i] - mx);
    syy += dy * (ys[i] - my);
    sxy += dx * (ys[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw InvalidInput("pearson: zero variance, correlation undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double contribution_score(double allocated, double total) {
  if (!(total > 0.0)) throw InvalidInput("contribution score needs a positive total endowment");
  if (!(allocated >= 0.0)) throw InvalidInput("allocation must be nonnegative");
  if (allocated > total * (1.0 + 1e-9)) throw InvalidInput("allocation exceeds total endowment");
  return std::min(1.0, allocated / total);
}

IncomeClass parse_income_class(std::string_view s) {
  if (s == "low") return IncomeClass::Low;
  if (s == "middle") return IncomeClass::Middle;
  if (s == "high") return IncomeClass::High;
  throw InvalidInput("unknown income class '" + std::string(s) + "' (expected low, middle or high)");
}

double gdp_rate(IncomeClass c) {
  switch (c) {
    case IncomeClass::Low: return 0.003;
    case IncomeClass::Middle: return 0.01;
    case IncomeClass::High: return 0.005;
  }
  return 0.0;
}

double gdp_based_endowment(IncomeClass c, double gdp, double assistance) {
  if (!(gdp >= 0.0) || !(assistance >= 0.0)) throw InvalidInput("gdp and assistance must be nonnegative");
  return gdp_rate(c) * gdp + assistance;
}

BandMeans band_means(std::span<const double> comember_means, std::span<const double> scores, double cut) {
  if (comember_means.size() != scores.size()) throw InvalidInput("band means: length mismatch");
  BandMeans out;
  double low = 0.0, high = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (comember_means[i] < cut) {
      low += scores[i];
      ++out.count_low;
    } else {
      high += scores[i];
      ++out.count_high;
    }
  }
  if (out.count_low) out.mean_low = low / static_cast<double>(out.count_low);
  if (out.count_high) out.mean_high = high / static_cast<double>(out.count_high);
  return out;
}

BandMeans score_by_degree_band(const Hypergraph& h, NodeId focal, const std::map<EdgeId, double>& scores,
                               double cut) {
  std::vector<double> means, values;
  for (const auto& [edge, score] : scores) {
    if (edge >= h.edge_count()) throw InvalidInput("scored hyperedge does not exist");
    const auto mem = h.members(edge);
    if (std::find(mem.begin(), mem.end(), focal) == mem.end())
      throw InvalidInput("focal node " + h.label(focal) + " is not in hyperedge " + std::to_string(edge));
    double total = 0.0;
    for (NodeId j : mem)
      if (j != focal) total += static_cast<double>(h.hyperdegree(j));
    means.push_back(total / static_cast<double>(mem.size() - 1));
    values.push_back(score);
  }
  return band_means(means, values, cut);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return c;
  throw InvalidInput("missing column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text, std::span<const std::string> required) {
  CsvTable t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw InvalidInput(at_line(line_no) + "expected " + std::to_string(t.header.size()) + " fields, found " +
                         std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c)
      if (fields[c].empty()) throw InvalidInput(at_line(line_no) + "missing value in column '" + t.header[c] + "'");
    t.rows.push_back(std::move(fields));
    t.line.push_back(line_no);
  }
  if (t.header.empty()) throw InvalidInput("CSV has no header row");
  for (const auto& name : required) t.column(name);
  return t;
}

double parse_number(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw InvalidInput(at_line(t.line[row]) + "column '" + t.header[col] + "' is not a finite number: '" + s + "'");
  return v;
}

MembershipTable::MembershipTable(std::vector<Membership> records) : records_(std::move(records)) {
  std::map<std::string, std::set<std::string>> actor_edges;
  for (std::size_t r = 0; r < records_.size(); ++r) {
    edges_[records_[r].edge].push_back(r);
    actor_edges[records_[r].actor].insert(records_[r].edge);
  }
  for (const auto& [edge, idx] : edges_) {
    std::vector<int> pos;
    std::set<std::string> who;
    for (auto r : idx) {
      pos.push_back(records_[r].position);
      if (!who.insert(records_[r].actor).second)
        throw InvalidInput("actor '" + records_[r].actor + "' listed twice in hyperedge '" + edge + "'");
    }
    std::sort(pos.begin(), pos.end());
    for (std::size_t k = 0; k < pos.size(); ++k)
      if (pos[k] != static_cast<int>(k + 1))
        throw InvalidInput("positions in hyperedge '" + edge + "' are not distinct and contiguous from 1");
  }
  for (const auto& [actor, set] : actor_edges) degree_[actor] = set.size();
}

std::size_t MembershipTable::hyperdegree(const std::string& actor) const {
  const auto it = degree_.find(actor);
  return it == degree_.end() ? 0 : it->second;
}

std::vector<std::string> MembershipTable::actors() const {
  std::vector<std::string> out;
  for (const auto& [a, d] : degree_) out.push_back(a);
  return out;
}

MembershipTable load_memberships(std::string_view text) {
  const std::string required[] = {"actor", "hyperedge"};
  const auto t = parse_csv(text, required);
  const auto ca = t.column("actor"), ce = t.column("hyperedge");
  const auto has = [&](const char* name) {
    return std::find(t.header.begin(), t.header.end(), name) != t.header.end();
  };
  const bool with_pos = has("position"), with_corr = has("corresponding");
  std::vector<Membership> records;
  std::map<std::string, int> next_position;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Membership m;
    m.actor = t.rows[r][ca];
    m.edge = t.rows[r][ce];
    if (with_pos) {
      const double p = parse_number(t, r, t.column("position"));
      if (p < 1 || p != std::floor(p)) throw InvalidInput(at_line(t.line[r]) + "position must be a positive integer");
      m.position = static_cast<int>(p);
    } else {
      m.position = ++next_position[m.edge];
    }
    if (with_corr) {
      const auto& v = t.rows[r][t.column("corresponding")];
      if (v == "1" || v == "true" || v == "yes")
        m.corresponding = true;
      else if (v == "0" || v == "false" || v == "no")
        m.corresponding = false;
      else
        throw InvalidInput(at_line(t.line[r]) + "corresponding must be 0/1, true/false or yes/no");
    }
    records.push_back(std::move(m));
  }
  return MembershipTable(std::move(records));
}

double comember_mean_degree(const MembershipTable& t, const std::string& edge, const std::string& focal,
                            CoMemberWeighting w) {
  const auto it = t.edges().find(edge);
  if (it == t.edges().end()) throw InvalidInput("unknown hyperedge '" + edge + "'");
  double num = 0.0, den = 0.0;
  bool found = false;
  for (auto r : it->second) {
    const auto& m = t.records()[r];
    if (m.actor == focal) {
      found = true;
      continue;
    }
    const double weight = w == CoMemberWeighting::Unweighted ? 1.0 : authorship_weight(m.position, m.corresponding);
    num += weight * static_cast<double>(t.hyperdegree(m.actor));
    den += weight;
  }
  if (!found) throw InvalidInput("focal actor '" + focal + "' is not in hyperedge '" + edge + "'");
  if (!(den > 0.0)) throw InvalidInput("hyperedge '" + edge + "' has no co-members");
  return num / den;
}

BandMeans authorship_bands(const MembershipTable& t, const std::string& focal, double cut, CoMemberWeighting w) {
  std::vector<double> means, scores;
  for (const auto& [edge, idx] : t.edges()) {
    for (auto r : idx) {
      const auto& m = t.records()[r];
      if (m.actor != focal || idx.size() < 2) continue;
      means.push_back(comember_mean_degree(t, edge, focal, w));
      scores.push_back(authorship_weight(m.position, m.corresponding));
    }
  }
  if (scores.empty()) throw InvalidInput("focal actor '" + focal + "' has no co-authored hyperedges");
  return band_means(means, scores, cut);
}

Correlation degree_endowment_correlation(const MembershipTable& t, const CsvTable& endowments) {
  const auto ca = endowments.column("actor"), ct = endowments.column("total");
  std::map<std::string, double> total;
  for (std::size_t r = 0; r < endowments.rows.size(); ++r) {
    const double v = parse_number(endowments, r, ct);
    if (v < 0.0) throw InvalidInput(at_line(endowments.line[r]) + "negative endowment");
    if (!total.emplace(endowments.rows[r][ca], v).second)
      throw InvalidInput(at_line(endowments.line[r]) + "duplicate actor '" + endowments.rows[r][ca] + "'");
  }
  Correlation c;
  for (const auto& [actor, v] : total) {
    const auto k = t.hyperdegree(actor);
    if (k == 0) continue;
    c.actors.push_back(actor);
    c.degree.push_back(static_cast<double>(k));
    c.endowment.push_back(v);
  }
  c.points = c.actors.size();
  c.rho = pearson(c.degree, c.endowment);
  return c;
}

double AffineRescale::operator()(double v) const {
  if (source_max == source_min) return 0.5 * (target_low + target_high);
  return target_low + (v - source_min) / (source_max - source_min) * (target_high - target_low);
}

AffineRescale dilemma_rescale(std::span<const double> values, std::size_t sigma, double margin) {
  if (values.empty()) throw InvalidInput("cannot rescale an empty column");
  if (!(margin > 0.0 && margin < 0.5)) throw InvalidInput("rescale margin must lie in (0, 0.5)");
  AffineRescale a;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  a.source_min = *lo;
  a.source_max = *hi;
  const double width = static_cast<double>(sigma) - 1.0;
  a.target_low = 1.0 + margin * width;
  a.target_high = static_cast<double>(sigma) - margin * width;
  return a;
}

WaterReport water_analysis(const CsvTable& attributes, const CsvTable& allocations, double cut, std::size_t sigma) {
  WaterReport out;
  const auto ca = attributes.column("actor"), cc = attributes.column("income_class"), cg = attributes.column("gdp"),
             cs = attributes.column("assistance"), cv = attributes.column("governance");
  std::map<std::string, double> governance;
  for (std::size_t r = 0; r < attributes.rows.size(); ++r) {
    const auto& actor = attributes.rows[r][ca];
    IncomeClass c{};
    try {
      c = parse_income_class(attributes.rows[r][cc]);
    } catch (const InvalidInput& e) {
      throw InvalidInput(at_line(attributes.line[r]) + e.what());
    }
    const double e = gdp_based_endowment(c, parse_number(attributes, r, cg), parse_number(attributes, r, cs));
    if (!out.endowment.emplace(actor, e).second)
      throw InvalidInput(at_line(attributes.line[r]) + "duplicate actor '" + actor + "'");
    governance[actor] = parse_number(attributes, r, cv);
  }

  const auto aa = allocations.column("actor"), ae = allocations.column("hyperedge"),
             av = allocations.column("allocation");
  std::vector<Membership> records;
  std::map<std::string, int> next;
  std::map<std::pair<std::string, std::string>, double> alloc;
  for (std::size_t r = 0; r < allocations.rows.size(); ++r) {
    const auto& actor = allocations.rows[r][aa];
    if (!out.endowment.count(actor))
      throw InvalidInput(at_line(allocations.line[r]) + "actor '" + actor + "' has no attribute row");
    const double v = parse_number(allocations, r, av);
    if (v < 0.0) throw InvalidInput(at_line(allocations.line[r]) + "negative allocation");
    const auto& edge = allocations.rows[r][ae];
    records.push_back({actor, edge, ++next[edge], false});
    alloc[{actor, edge}] = v;
  }
  const MembershipTable table(std::move(records));

  std::map<std::string, double> spent;
  for (const auto& [key, v] : alloc) spent[key.first] += v;
  for (const auto& [actor, v] : spent)
    if (v > out.endowment[actor] * (1.0 + 1e-9))
      throw InvalidInput("allocations of '" + actor + "' exceed its total endowment");

  std::vector<double> means, scores;
  for (const auto& [key, v] : alloc) {
    const auto& edge = key.second;
    if (table.edges().at(edge).size() < 2) continue;
    means.push_back(comember_mean_degree(table, edge, key.first));
    scores.push_back(contribution_score(v, out.endowment[key.first]));
  }
  out.bands = band_means(means, scores, cut);

  std::vector<double> k, e;
  for (const auto& actor : table.actors()) {
    out.hyperdegree[actor] = table.hyperdegree(actor);
    k.push_back(static_cast<double>(table.hyperdegree(actor)));
    e.push_back(out.endowment[actor]);
  }
  try {
    out.degree_endowment_rho = pearson(k, e);
  } catch (const InvalidInput&) {
  }

  // Threshold on the size-sigma basins: endowments normalised to the simplex,
  // productivity from the governance column, equal contributions.
  std::string text;
  for (const auto& [edge, idx] : table.edges()) {
    std::string line;
    for (auto r : idx) line += (line.empty() ? "" : ",") + table.records()[r].actor;
    text += line + "\n";
  }
  std::vector<double> gov_values;
  for (const auto& [a, g] : governance) gov_values.push_back(g);
  out.productivity_map = dilemma_rescale(gov_values, sigma);
  try {
    const auto h = load_hyperedge_list(text, sigma);
    if (!h.has_isolated_nodes()) {
      std::vector<double> ev(h.node_count()), rv(h.node_count());
      double total = 0.0;
      for (NodeId i = 0; i < h.node_count(); ++i) total += (ev[i] = out.endowment[h.label(i)]);
      if (total > 0.0) {
        for (auto& v : ev) v /= total;
        for (NodeId i = 0; i < h.node_count(); ++i) rv[i] = out.productivity_map(governance[h.label(i)]);
        const ThresholdKernel kernel(h, rv, equal_contributions(h));
        out.delta_star = kernel.delta_star(ev);
        out.basins_used = h.edge_count();
      }
    }
  } catch (const InvalidInput&) {
    // No basin of the requested size.
  }
  return out;
}

}  // namespace hgcoop::empirical
