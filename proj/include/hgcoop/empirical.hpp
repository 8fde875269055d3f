#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgcoop/hypergraph.hpp"

namespace hgcoop::empirical {

// 2^-(position-1); corresponding authors get max(that, 0.5).
double authorship_weight(int position, bool corresponding);

// Product-moment correlation, single pass (Welford co-moments). Throws
// InvalidInput on length mismatch, fewer than two points or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

double contribution_score(double allocated, double total);

enum class IncomeClass { Low, Middle, High };
IncomeClass parse_income_class(std::string_view s);
double gdp_rate(IncomeClass c);  // 0.003, 0.01, 0.005
double gdp_based_endowment(IncomeClass c, double gdp, double assistance);

struct BandMeans {
  std::optional<double> mean_low;   // co-member mean degree < cut
  std::optional<double> mean_high;  // >= cut
  std::size_t count_low = 0;
  std::size_t count_high = 0;
};

// Groups scores by the matching co-member mean degree.
BandMeans band_means(std::span<const double> comember_means, std::span<const double> scores, double cut);

// Fixed-size hypergraph version: scores per hyperedge id; every scored
// hyperedge must contain the focal node.
BandMeans score_by_degree_band(const Hypergraph& h, NodeId focal, const std::map<EdgeId, double>& scores,
                               double cut);

// Simple comma-separated table with a header row. Quoting is not supported.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line;  // source line of each row

  std::size_t column(std::string_view name) const;  // throws when absent
};
// Blank lines and '#' comments are skipped; ragged rows and empty fields are
// rejected with their line number.
CsvTable parse_csv(std::string_view text, std::span<const std::string> required = {});
double parse_number(const CsvTable& t, std::size_t row, std::size_t col);  // rejects NaN/inf/garbage

struct Membership {
  std::string actor;
  std::string edge;
  int position = 1;
  bool corresponding = false;
};

// Variable-size hyperedges (papers, basins) keyed by label.
class MembershipTable {
 public:
  explicit MembershipTable(std::vector<Membership> records);

  const std::vector<Membership>& records() const { return records_; }
  const std::map<std::string, std::vector<std::size_t>>& edges() const { return edges_; }
  std::size_t hyperdegree(const std::string& actor) const;
  std::vector<std::string> actors() const;  // sorted

 private:
  std::vector<Membership> records_;
  std::map<std::string, std::vector<std::size_t>> edges_;
  std::map<std::string, std::size_t> degree_;
};

// Columns actor,hyperedge[,position][,corresponding]. Positions within a
// hyperedge must be distinct and contiguous from 1.
MembershipTable load_memberships(std::string_view text);

enum class CoMemberWeighting { Unweighted, AuthorshipPerEdge };

// Mean hyperdegree of the co-members of `focal` in `edge`; with
// AuthorshipPerEdge the co-member degrees are weighted by their authorship
// weights, normalised within the hyperedge.
double comember_mean_degree(const MembershipTable& t, const std::string& edge, const std::string& focal,
                            CoMemberWeighting w = CoMemberWeighting::Unweighted);

// Focal actor's authorship weight per paper, banded by co-author mean degree.
BandMeans authorship_bands(const MembershipTable& t, const std::string& focal, double cut,
                           CoMemberWeighting w = CoMemberWeighting::Unweighted);

struct Correlation {
  double rho = 0.0;
  std::size_t points = 0;
  std::vector<std::string> actors;
  std::vector<double> degree, endowment;
};
// Pearson between hyperdegree and total endowment over actors present in
// both tables (endowment columns actor,total).
Correlation degree_endowment_correlation(const MembershipTable& t, const CsvTable& endowments);

struct AffineRescale {
  double source_min = 0.0, source_max = 0.0, target_low = 0.0, target_high = 0.0;
  double operator()(double v) const;
};
// Maps [min, max] of the values onto [1 + m, sigma - m], m = margin (sigma - 1).
AffineRescale dilemma_rescale(std::span<const double> values, std::size_t sigma, double margin = 0.05);

struct WaterReport {
  std::map<std::string, double> endowment;  // gdp-based allocation + assistance
  std::map<std::string, std::size_t> hyperdegree;
  BandMeans bands;                          // contribution scores by co-member degree
  std::optional<double> degree_endowment_rho;
  AffineRescale productivity_map;
  std::optional<double> delta_star;         // size-sigma basins, equal contributions
  std::size_t basins_used = 0;
};

// attributes: actor,income_class,gdp,assistance,governance
// allocations: actor,hyperedge,allocation
WaterReport water_analysis(const CsvTable& attributes, const CsvTable& allocations, double cut,
                           std::size_t sigma = 3);

}  // namespace hgcoop::empirical
