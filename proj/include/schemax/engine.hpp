#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "schemax/bitspace.hpp"
#include "schemax/crossover.hpp"
#include "schemax/mutation.hpp"
#include "schemax/popmodel.hpp"
#include "schemax/scalar.hpp"
#include "schemax/walsh.hpp"

namespace schemax {

/// One generation of the expected-behavior model: proportional selection,
/// then crossover, then mutation.
template <class S>
struct GaConfig {
  int len;
  FitnessFunction<S> fitness;
  CrossoverDistribution<S> crossover;
  MutationRates<S> mutation;

  GaConfig(int len_, FitnessFunction<S> f, CrossoverDistribution<S> chi,
           MutationRates<S> rates)
      : len(len_), fitness(std::move(f)), crossover(std::move(chi)),
        mutation(std::move(rates)) {
    if (crossover.len() != len || mutation.len() != len)
      throw std::invalid_argument("GaConfig: component lengths differ");
  }
};

/// Counter-based random stream keyed by (root seed, stream index, draw
/// index): the same key always reproduces the same sequence, and substreams
/// derived from one root are independent of the draw order elsewhere.
class RngStream {
 public:
  explicit RngStream(std::uint64_t root_seed, std::uint64_t stream_index = 0)
      : root_(root_seed),
        key_(mix(mix(root_seed) ^ (0xda942042e4dd58b5ULL * (stream_index + 1)))) {}

  RngStream substream(std::uint64_t index) const {
    return RngStream(root_, index);
  }

  std::uint64_t next_u64() {
    return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n), unbiased (multiply-shift with rejection).
  std::uint64_t next_below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool next_bool() { return next_u64() >> 63; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t root_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Expected next-generation distribution over the full string space.
template <class S>
PopulationVector<S> g_step(const PopulationVector<S>& x, const GaConfig<S>& cfg) {
  if (cfg.len != x.len())
    throw std::invalid_argument("g_step: length mismatch");
  return mutate_full(crossover_full(select(x, cfg.fitness), cfg.crossover),
                     cfg.mutation);
}

/// Exact schema averages of the expected next generation for the family
/// over u, without ever touching the full string space: selection averages
/// in the standard basis, crossover and mutation in the Walsh basis,
/// then back. Cost 2^order * order plus one fitness evaluation per member
/// (for one/two-point crossover); independent of the string length.
template <class S>
SchemaVector<S> schema_pipeline(const FinitePopulation& X, const Genome& u,
                                const GaConfig<S>& cfg) {
  if (cfg.len != X.len() || u.len != X.len())
    throw std::invalid_argument("schema_pipeline: length mismatch");
  SchemaVector<S> sel = schema_selection_averages(X, cfg.fitness, u);
  SchemaVector<S> shat = to_walsh(sel);
  SchemaVector<S> cross = crossover_schema_walsh(shat, cfg.crossover);
  SchemaVector<S> mut = mutate_schema_walsh(cross, cfg.mutation);
  return from_walsh(mut);
}

/// Full-space reference for schema_pipeline: run g_step densely, then
/// project. Test oracle; quadratic-space, so len <= 12.
template <class S>
SchemaVector<S> oracle_schema(const FinitePopulation& X, const Genome& u,
                              const GaConfig<S>& cfg) {
  if (X.len() > 12)
    throw std::invalid_argument("oracle_schema: dense reference, len <= 12");
  return schema_averages(g_step(normalize<S>(X), cfg), u);
}

/// Classical lower bound on the next-generation schema averages for
/// one-point crossover at rate c and uniform mutation rate p: the
/// post-selection averages scaled by (1 - c*L(u)/(len-1)) * (1-p)^order.
template <class S>
std::vector<S> holland_bound(const SchemaVector<S>& after_selection,
                             const GaConfig<S>& cfg) {
  detail::require_basis(after_selection, Basis::standard, "holland_bound");
  if (cfg.crossover.kind() != CrossoverKind::one_point)
    throw std::invalid_argument(
        "holland_bound: bound is specific to one-point crossover");
  if (!cfg.mutation.is_uniform())
    throw std::invalid_argument(
        "holland_bound: bound is specific to a uniform mutation rate");
  const Genome& u = after_selection.mask();
  S keep = scalar_traits<S>::one();
  if (!scalar_traits<S>::is_zero(cfg.crossover.rate()))
    keep -= cfg.crossover.rate() *
            scalar_traits<S>::from_int(defining_length(u)) /
            scalar_traits<S>::from_int(cfg.len - 1);
  std::vector<S> out = holland_mutation_bound(after_selection,
                                              cfg.mutation.uniform_rate());
  for (S& v : out) v *= keep;
  return out;
}

namespace detail {

// Cumulative weights for sampling; entries must be nonnegative doubles.
class DiscreteSampler {
 public:
  DiscreteSampler(std::vector<std::uint64_t> values, const std::vector<double>& w)
      : values_(std::move(values)) {
    cum_.reserve(w.size());
    double acc = 0;
    for (double x : w) cum_.push_back(acc += x);
    total_ = acc;
  }

  std::uint64_t draw(RngStream& rng) const {
    double target = rng.next_unit() * total_;
    std::size_t lo = 0, hi = cum_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cum_[mid] > target)
        hi = mid;
      else
        lo = mid + 1;
    }
    return values_[lo];
  }

 private:
  std::vector<std::uint64_t> values_;
  std::vector<double> cum_;
  double total_ = 0;
};

template <class S>
FinitePopulation counts_to_population(int len,
                                      const std::map<std::uint64_t, std::uint64_t>& counts) {
  std::vector<FinitePopulation::Member> members;
  members.reserve(counts.size());
  for (const auto& [g, c] : counts) members.emplace_back(Genome(g, len), c);
  return FinitePopulation(len, std::move(members));
}

}  // namespace detail

/// One finite-population generation: r independent draws from the expected
/// next-generation distribution. Up to dense_limit bits the distribution is
/// materialized and sampled directly; beyond that the draw is operational
/// (fitness-proportional parent pair, mask from the crossover distribution,
/// fair-coin child, independent per-bit mutation), whose per-sample law is
/// the same distribution by construction.
template <class S>
FinitePopulation finite_ga_step(const FinitePopulation& X, const GaConfig<S>& cfg,
                                RngStream& rng, int dense_limit = kMaxDenseLen) {
  if (cfg.len != X.len())
    throw std::invalid_argument("finite_ga_step: length mismatch");
  const int len = X.len();
  const std::uint64_t full = domain_size(len) - 1;
  std::map<std::uint64_t, std::uint64_t> counts;

  if (len <= dense_limit) {
    PopulationVector<S> y = g_step(normalize<S>(X), cfg);
    std::vector<std::uint64_t> values;
    std::vector<double> weights;
    for (std::uint64_t k = 0; k < y.size(); ++k) {
      if (scalar_traits<S>::is_zero(y[k])) continue;
      values.push_back(k);
      weights.push_back(scalar_traits<S>::to_double(y[k]));
    }
    detail::DiscreteSampler sampler(std::move(values), weights);
    for (std::uint64_t i = 0; i < X.size(); ++i) ++counts[sampler.draw(rng)];
    return detail::counts_to_population<S>(len, counts);
  }

  // Operational path: selection weights over the population members.
  std::vector<std::uint64_t> genomes;
  std::vector<double> weights;
  genomes.reserve(X.members().size());
  for (const auto& [g, count] : X.members()) {
    genomes.push_back(g.bits);
    weights.push_back(static_cast<double>(count) *
                      scalar_traits<S>::to_double(cfg.fitness(g)));
  }
  detail::DiscreteSampler parents(std::move(genomes), weights);

  std::vector<std::uint64_t> masks;
  std::vector<double> mask_weights;
  for (const auto& [m, w] : cfg.crossover.support()) {
    masks.push_back(m);
    mask_weights.push_back(scalar_traits<S>::to_double(w));
  }
  detail::DiscreteSampler mask_draw(std::move(masks), mask_weights);

  std::vector<double> flip(len);
  for (int i = 0; i < len; ++i)
    flip[i] = scalar_traits<S>::to_double(cfg.mutation.p(i));

  for (std::uint64_t s = 0; s < X.size(); ++s) {
    std::uint64_t i = parents.draw(rng);
    std::uint64_t j = parents.draw(rng);
    std::uint64_t m = mask_draw.draw(rng);
    if (rng.next_bool()) m = ~m & full;  // the sibling child uses the complement
    std::uint64_t child = (i & m) ^ (j & ~m & full);
    for (int b = 0; b < len; ++b)
      if (rng.next_unit() < flip[b]) child ^= std::uint64_t{1} << b;
    ++counts[child];
  }
  return detail::counts_to_population<S>(len, counts);
}

/// Generation-indexed exact schema averages: entry g is the expected
/// averages after g generations (entry 0 is the initial population's).
/// Beyond one generation this needs the dense model, hence len <= 20.
template <class S>
std::vector<SchemaVector<S>> trajectory(const FinitePopulation& X, const Genome& u,
                                        const GaConfig<S>& cfg, int generations) {
  if (generations < 0)
    throw std::invalid_argument("trajectory: negative generation count");
  std::vector<SchemaVector<S>> out;
  out.reserve(static_cast<std::size_t>(generations) + 1);
  if (X.len() <= kMaxDenseLen) {
    PopulationVector<S> x = normalize<S>(X);
    out.push_back(schema_averages(x, u));
    for (int g = 0; g < generations; ++g) {
      x = g_step(x, cfg);
      out.push_back(schema_averages(x, u));
    }
    return out;
  }
  if (generations > 1)
    throw std::invalid_argument(
        "trajectory: beyond one generation the expected population no longer "
        "has finite support; len <= 20 required");
  out.push_back(schema_averages<S>(X, u));
  if (generations == 1) out.push_back(schema_pipeline(X, u, cfg));
  return out;
}

}  // namespace schemax
