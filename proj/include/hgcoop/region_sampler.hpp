#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hgcoop/game.hpp"
#include "hgcoop/hypergraph.hpp"

namespace hgcoop {

// Uniform points on the (N-1)-simplex, produced in fixed-size chunks. Chunk c
// draws from its own engine seeded with derive_seed(seed, c), so the stream
// does not depend on how many threads produce it.
struct SimplexSampler {
  std::size_t dimension = 1;
  std::size_t sample_count = 200000;
  std::uint64_t seed = 0;
  std::size_t chunk_size = 4096;

  std::size_t chunk_count() const { return (sample_count + chunk_size - 1) / chunk_size; }
};

// Fills `out` (row-major, dimension values per point) with chunk `chunk`.
void sample_chunk(const SimplexSampler& sampler, std::size_t chunk, std::vector<double>& out);

// Sequential access to the same stream.
class SimplexStream {
 public:
  explicit SimplexStream(SimplexSampler sampler);
  // Next point, or false when sample_count points have been produced.
  bool next(std::vector<double>& point);

 private:
  SimplexSampler sampler_;
  std::size_t produced_ = 0;
  std::size_t chunk_ = 0;
  std::vector<double> buffer_;
};

// A materialised set of endowment points, reused across a sweep so curves
// over delta or p share their Monte Carlo noise.
class SampleSet {
 public:
  SampleSet(std::size_t dimension, std::vector<double> flat, std::uint64_t seed, bool grid = false);

  static SampleSet draw(const SimplexSampler& sampler, unsigned jobs = 1);
  // Barycentric lattice {a / steps : sum a = steps}; only for dimension <= 4.
  static SampleSet barycentric_grid(std::size_t dimension, std::size_t steps = 100);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return dimension_ == 0 ? 0 : flat_.size() / dimension_; }
  std::span<const double> point(std::size_t s) const { return {flat_.data() + s * dimension_, dimension_}; }
  std::uint64_t seed() const { return seed_; }
  bool is_grid() const { return grid_; }

 private:
  std::size_t dimension_;
  std::vector<double> flat_;
  std::uint64_t seed_;
  bool grid_;
};

// x_ik = 1 / k_i on the incidence structure. Throws on isolated nodes.
ContributionMatrix equal_contributions(const Hypergraph& h);

// Hyperdegree-2 players send p to their primary hyperedge and 1 - p to the
// other one; hyperdegree-1 players send everything to their only hyperedge.
struct BiasAssignment {
  std::vector<std::optional<EdgeId>> primary_edge;  // indexed by node
  double p = 0.5;
};

// Throws InvalidInput for hyperdegree > 2 (or 0), a missing primary edge, or
// a primary edge that does not contain the node.
ContributionMatrix biased_contributions(const Hypergraph& h, const BiasAssignment& bias);

struct ProportionEstimate {
  double proportion = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// delta*(e) for every point of the set.
std::vector<double> sample_delta_stars(const ThresholdKernel& kernel, const SampleSet& samples, unsigned jobs = 1);

// Fraction of points with delta*(e) <= delta + tolerance.
ProportionEstimate proportion_at(std::span<const double> delta_stars, double delta, std::uint64_t seed,
                                 double tolerance = kDefaultTolerance);

ProportionEstimate feasible_proportion(const Hypergraph& h, std::span<const double> r, const ContributionMatrix& x,
                                       double delta, const SampleSet& samples, unsigned jobs = 1,
                                       GameOptions options = {});
ProportionEstimate feasible_proportion(const Hypergraph& h, std::span<const double> r, const ContributionMatrix& x,
                                       double delta, const SimplexSampler& sampler, unsigned jobs = 1,
                                       GameOptions options = {});

}  // namespace hgcoop
