#include "hgcoop/region_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "hgcoop/errors.hpp"
#include "hgcoop/parallel.hpp"
#include "hgcoop/rng.hpp"

namespace hgcoop {

void sample_chunk(const SimplexSampler& sampler, std::size_t chunk, std::vector<double>& out) {
  if (sampler.dimension == 0) throw InvalidInput("simplex dimension must be at least 1");
  if (sampler.chunk_size == 0) throw InvalidInput("chunk size must be positive");
  const std::size_t first = chunk * sampler.chunk_size;
  const std::size_t count = first >= sampler.sample_count
                                ? 0
                                : std::min(sampler.chunk_size, sampler.sample_count - first);
  const std::size_t n = sampler.dimension;
  out.resize(count * n);
  Engine rng(derive_seed(sampler.seed, chunk));
  for (std::size_t s = 0; s < count; ++s) {
    double* p = out.data() + s * n;
    if (n == 1) {
      p[0] = 1.0;
      continue;
    }
    // Normalised i.i.d. exponentials are uniform on the simplex (flat Dirichlet).
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = exponential1(rng);
      total += p[i];
    }
    if (!(total > 0.0)) {  // every draw was exactly zero
      std::fill(p, p + n, 1.0 / static_cast<double>(n));
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) p[i] /= total;
  }
}

SimplexStream::SimplexStream(SimplexSampler sampler) : sampler_(sampler) {}

bool SimplexStream::next(std::vector<double>& point) {
  if (produced_ >= sampler_.sample_count) return false;
  const std::size_t offset = produced_ % sampler_.chunk_size;
  if (offset == 0) sample_chunk(sampler_, chunk_++, buffer_);
  const std::size_t n = sampler_.dimension;
  point.assign(buffer_.begin() + static_cast<std::ptrdiff_t>(offset * n),
               buffer_.begin() + static_cast<std::ptrdiff_t>((offset + 1) * n));
  ++produced_;
  return true;
}

SampleSet::SampleSet(std::size_t dimension, std::vector<double> flat, std::uint64_t seed, bool grid)
    : dimension_(dimension), flat_(std::move(flat)), seed_(seed), grid_(grid) {
  if (dimension_ == 0 || flat_.size() % dimension_ != 0) throw InvalidInput("malformed sample set");
}

SampleSet SampleSet::draw(const SimplexSampler& sampler, unsigned jobs) {
  std::vector<double> flat(sampler.sample_count * sampler.dimension);
  parallel_for(sampler.chunk_count(), jobs, [&](std::size_t c) {
    std::vector<double> buf;
    sample_chunk(sampler, c, buf);
    std::copy(buf.begin(), buf.end(), flat.begin() + static_cast<std::ptrdiff_t>(c * sampler.chunk_size * sampler.dimension));
  });
  return SampleSet(sampler.dimension, std::move(flat), sampler.seed);
}

SampleSet SampleSet::barycentric_grid(std::size_t dimension, std::size_t steps) {
  if (dimension == 0 || dimension > 4) throw InvalidInput("barycentric grid mode supports 1 to 4 players");
  if (steps == 0) throw InvalidInput("grid needs at least one step");
  std::vector<double> flat;
  std::vector<std::size_t> a(dimension, 0);
  const double h = 1.0 / static_cast<double>(steps);
  // Enumerate compositions of `steps` into `dimension` nonnegative parts.
  auto emit = [&] {
    for (std::size_t i = 0; i < dimension; ++i) flat.push_back(static_cast<double>(a[i]) * h);
  };
  if (dimension == 1) {
    a[0] = steps;
    emit();
    return SampleSet(1, std::move(flat), 0, true);
  }
  std::vector<std::size_t> cut(dimension - 1, 0);
  while (true) {
    std::size_t prev = 0;
    for (std::size_t i = 0; i + 1 < dimension; ++i) {
      a[i] = cut[i] - prev;
      prev = cut[i];
    }
    a[dimension - 1] = steps - prev;
    emit();
    // Next non-decreasing sequence of cut points in [0, steps].
    std::size_t pos = dimension - 1;
    while (pos > 0 && cut[pos - 1] == steps) --pos;
    if (pos == 0) break;
    ++cut[pos - 1];
    for (std::size_t j = pos; j + 1 < dimension; ++j) cut[j] = cut[pos - 1];
  }
  return SampleSet(dimension, std::move(flat), 0, true);
}

ContributionMatrix equal_contributions(const Hypergraph& h) {
  ContributionMatrix x(h);
  for (NodeId i = 0; i < h.node_count(); ++i) {
    const auto inc = h.incidence(i);
    if (inc.empty()) throw InvalidInput("node " + h.label(i) + " is isolated; equal contributions undefined");
    const double share = 1.0 / static_cast<double>(inc.size());
    for (const auto& pin : inc) x.at(pin.edge, pin.slot) = share;
  }
  return x;
}

ContributionMatrix biased_contributions(const Hypergraph& h, const BiasAssignment& bias) {
  if (!(bias.p >= 0.0 && bias.p <= 1.0)) throw InvalidInput("bias p must lie in [0,1]");
  if (bias.primary_edge.size() != h.node_count()) throw InvalidInput("bias assignment must cover every node");
  ContributionMatrix x(h);
  for (NodeId i = 0; i < h.node_count(); ++i) {
    const auto inc = h.incidence(i);
    if (inc.size() == 1) {
      x.at(inc[0].edge, inc[0].slot) = 1.0;
      continue;
    }
    if (inc.size() != 2)
      throw InvalidInput("node " + h.label(i) + " has hyperdegree " + std::to_string(inc.size()) +
                         "; biased contributions need hyperdegree 1 or 2");
    const auto& primary = bias.primary_edge[i];
    if (!primary) throw InvalidInput("node " + h.label(i) + " has no primary hyperedge");
    const bool first = inc[0].edge == *primary;
    if (!first && inc[1].edge != *primary)
      throw InvalidInput("primary hyperedge of node " + h.label(i) + " does not contain it");
    x.at(inc[0].edge, inc[0].slot) = first ? bias.p : 1.0 - bias.p;
    x.at(inc[1].edge, inc[1].slot) = first ? 1.0 - bias.p : bias.p;
  }
  return x;
}

std::vector<double> sample_delta_stars(const ThresholdKernel& kernel, const SampleSet& samples, unsigned jobs) {
  if (kernel.size() != samples.dimension()) throw InvalidInput("sample dimension does not match the game");
  std::vector<double> out(samples.size());
  constexpr std::size_t block = 4096;
  const std::size_t blocks = (samples.size() + block - 1) / block;
  parallel_for(blocks, jobs, [&](std::size_t b) {
    const std::size_t end = std::min(samples.size(), (b + 1) * block);
    for (std::size_t s = b * block; s < end; ++s) out[s] = kernel.delta_star(samples.point(s));
  });
  return out;
}

ProportionEstimate proportion_at(std::span<const double> delta_stars, double delta, std::uint64_t seed,
                                 double tolerance) {
  ProportionEstimate est;
  est.samples = delta_stars.size();
  est.seed = seed;
  if (delta_stars.empty()) return est;
  const auto hits = std::count_if(delta_stars.begin(), delta_stars.end(),
                                  [&](double d) { return d <= delta + tolerance; });
  const double n = static_cast<double>(delta_stars.size());
  est.proportion = static_cast<double>(hits) / n;
  est.standard_error = std::sqrt(est.proportion * (1.0 - est.proportion) / n);
  return est;
}

ProportionEstimate feasible_proportion(const Hypergraph& h, std::span<const double> r, const ContributionMatrix& x,
                                       double delta, const SampleSet& samples, unsigned jobs, GameOptions options) {
  if (!x.is_full_cooperation(h, options.tolerance))
    throw InvalidInput("feasible proportion needs a full-cooperation contribution matrix");
  const ThresholdKernel kernel(h, r, x, options);
  const auto stars = sample_delta_stars(kernel, samples, jobs);
  return proportion_at(stars, delta, samples.seed(), options.tolerance);
}

ProportionEstimate feasible_proportion(const Hypergraph& h, std::span<const double> r, const ContributionMatrix& x,
                                       double delta, const SimplexSampler& sampler, unsigned jobs,
                                       GameOptions options) {
  if (sampler.dimension != h.node_count()) throw InvalidInput("sampler dimension does not match node count");
  return feasible_proportion(h, r, x, delta, SampleSet::draw(sampler, jobs), jobs, options);
}

}  // namespace hgcoop
