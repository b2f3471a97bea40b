#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "schemax/bitspace.hpp"
#include "schemax/scalar.hpp"

namespace schemax {

namespace detail {

// Validates a probability vector: entries nonnegative, mass summing to one
// (exactly in rational mode, within 1e-12 absolute in float mode; the float
// sum runs in extended precision so the check measures the data, not the
// accumulator).
template <class S>
void check_simplex(const std::vector<S>& entries, const char* what) {
  if constexpr (scalar_traits<S>::is_exact) {
    S sum = scalar_traits<S>::zero();
    for (const S& e : entries) {
      if (e < scalar_traits<S>::zero())
        throw numeric_contract_error(std::string(what) +
                                     ": negative probability mass");
      sum += e;
    }
    if (sum != scalar_traits<S>::one())
      throw numeric_contract_error(std::string(what) +
                                   ": mass does not sum to 1");
  } else {
    long double sum = 0.0L;
    for (double e : entries) {
      if (e < 0.0)
        throw numeric_contract_error(std::string(what) +
                                     ": negative probability mass");
      sum += e;
    }
    if (std::abs(static_cast<double>(sum - 1.0L)) > 1e-12)
      throw numeric_contract_error(std::string(what) +
                                   ": mass does not sum to 1 within 1e-12");
  }
}

}  // namespace detail

/// A point of the simplex over the full string space: dense nonnegative
/// entries indexed by genome value, summing to one. Allocation is limited
/// to len <= 20; longer strings stay in FinitePopulation / schema form.
template <class S>
class PopulationVector {
 public:
  PopulationVector(int len, std::vector<S> entries)
      : len_(len), entries_(std::move(entries)) {
    if (len < 1 || len > kMaxDenseLen)
      throw std::invalid_argument(
          "PopulationVector: dense form requires length in [1, " +
          std::to_string(kMaxDenseLen) + "], got " + std::to_string(len));
    if (entries_.size() != domain_size(len))
      throw std::invalid_argument("PopulationVector: expected 2^len entries");
    detail::check_simplex(entries_, "PopulationVector");
  }

  int len() const { return len_; }
  std::uint64_t size() const { return entries_.size(); }
  const std::vector<S>& entries() const { return entries_; }
  const S& operator[](std::uint64_t i) const { return entries_[i]; }
  const S& at(const Genome& g) const { return entries_[g.bits]; }

 private:
  int len_;
  std::vector<S> entries_;
};

/// A finite population: a multiset of genomes with positive counts.
class FinitePopulation {
 public:
  using Member = std::pair<Genome, std::uint64_t>;

  FinitePopulation(int len, std::vector<Member> members)
      : len_(len), members_(std::move(members)) {
    if (members_.empty())
      throw std::invalid_argument("FinitePopulation: population is empty");
    size_ = 0;
    for (const auto& [g, count] : members_) {
      if (g.len != len_)
        throw std::invalid_argument(
            "FinitePopulation: member length differs from population length");
      if (count == 0)
        throw std::invalid_argument("FinitePopulation: zero count");
      size_ += count;
    }
  }

  /// Convenience: each listed genome once.
  static FinitePopulation of(int len, const std::vector<std::uint64_t>& genomes) {
    std::vector<Member> m;
    m.reserve(genomes.size());
    for (std::uint64_t g : genomes) m.emplace_back(Genome(g, len), 1);
    return FinitePopulation(len, std::move(m));
  }

  int len() const { return len_; }
  std::uint64_t size() const { return size_; }  // r, total count
  const std::vector<Member>& members() const { return members_; }

 private:
  int len_;
  std::vector<Member> members_;
  std::uint64_t size_ = 0;
};

enum class Basis { standard, walsh };

/// Schema averages for one competing family: 2^popcount(u) entries indexed
/// by packed coset index, in either the standard or the Walsh basis.
template <class S>
class SchemaVector {
 public:
  SchemaVector(Genome u, Basis basis, std::vector<S> entries)
      : u_(u), basis_(basis), entries_(std::move(entries)) {
    if (entries_.size() != (std::uint64_t{1} << popcount(u)))
      throw std::invalid_argument("SchemaVector: expected 2^order entries");
    if (basis_ == Basis::standard) {
      detail::check_simplex(entries_, "SchemaVector");
    } else {
      // Row 0 of the family transform sums the unit mass: entry 0 must be
      // 2^(-order/2).
      S expect = scalar_traits<S>::pow2_half(-popcount(u));
      if constexpr (scalar_traits<S>::is_exact) {
        if (entries_[0] != expect)
          throw numeric_contract_error(
              "SchemaVector: Walsh entry 0 is not 2^(-order/2)");
      } else {
        if (std::abs(entries_[0] - expect) > 1e-9)
          throw numeric_contract_error(
              "SchemaVector: Walsh entry 0 is not 2^(-order/2)");
      }
    }
  }

  const Genome& mask() const { return u_; }
  int order() const { return popcount(u_); }
  Basis basis() const { return basis_; }
  std::uint64_t size() const { return entries_.size(); }
  const std::vector<S>& entries() const { return entries_; }
  const S& operator[](std::uint64_t packed) const { return entries_[packed]; }

 private:
  Genome u_;
  Basis basis_;
  std::vector<S> entries_;
};

namespace detail {
template <class S>
void require_basis(const SchemaVector<S>& s, Basis b, const char* op) {
  if (s.basis() != b)
    throw std::invalid_argument(std::string(op) + ": wrong schema basis");
}
}  // namespace detail

/// Fitness evaluator; values must be strictly positive wherever evaluated
/// (proportional selection needs a positive total).
template <class S>
class FitnessFunction {
 public:
  FitnessFunction(std::string name, std::function<S(const Genome&)> eval)
      : name_(std::move(name)), eval_(std::move(eval)) {}

  /// f(j) = number of ones in j.
  static FitnessFunction onemax() {
    return FitnessFunction("onemax", [](const Genome& g) {
      return scalar_traits<S>::from_int(popcount(g));
    });
  }

  /// f(j) = a + b * popcount(j).
  static FitnessFunction affine_popcount(S a, S b) {
    return FitnessFunction(
        "affine_popcount", [a, b](const Genome& g) {
          return a + b * scalar_traits<S>::from_int(popcount(g));
        });
  }

  /// Explicit table keyed by genome value; evaluation outside the table is
  /// an error.
  static FitnessFunction table(std::map<std::uint64_t, S> values) {
    return FitnessFunction(
        "table", [values = std::move(values)](const Genome& g) {
          auto it = values.find(g.bits);
          if (it == values.end())
            throw std::invalid_argument("fitness table: no entry for genome " +
                                        std::to_string(g.bits));
          return it->second;
        });
  }

  S operator()(const Genome& g) const {
    S v = eval_(g);
    if (!(v > scalar_traits<S>::zero()))
      throw std::invalid_argument("fitness must be strictly positive (genome " +
                                  std::to_string(g.bits) + ")");
    return v;
  }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::function<S(const Genome&)> eval_;
};

/// Normalized incidence vector of a finite population.
template <class S>
PopulationVector<S> normalize(const FinitePopulation& X) {
  if (X.len() > kMaxDenseLen)
    throw std::invalid_argument("normalize: population too long for dense form");
  std::vector<S> e(domain_size(X.len()), scalar_traits<S>::zero());
  S r = scalar_traits<S>::from_int(static_cast<long long>(X.size()));
  for (const auto& [g, count] : X.members())
    e[g.bits] += scalar_traits<S>::from_int(static_cast<long long>(count)) / r;
  return PopulationVector<S>(X.len(), std::move(e));
}

/// Schema averages of a dense population: packed entry k accumulates the
/// mass of the coset with fixed bits k on the set positions of u.
template <class S>
SchemaVector<S> schema_averages(const PopulationVector<S>& x, const Genome& u) {
  if (u.len != x.len())
    throw std::invalid_argument("schema_averages: mask length mismatch");
  std::vector<S> out(std::uint64_t{1} << popcount(u), scalar_traits<S>::zero());
  for (std::uint64_t j = 0; j < x.size(); ++j) {
    if (scalar_traits<S>::is_zero(x[j])) continue;
    out[pack(Genome(j, x.len()), u)] += x[j];
  }
  return SchemaVector<S>(u, Basis::standard, std::move(out));
}

/// Schema averages of a finite population, by bucketing members through
/// pack; cost is linear in member count plus 2^order, independent of len.
template <class S>
SchemaVector<S> schema_averages(const FinitePopulation& X, const Genome& u) {
  if (u.len != X.len())
    throw std::invalid_argument("schema_averages: mask length mismatch");
  std::vector<S> out(std::uint64_t{1} << popcount(u), scalar_traits<S>::zero());
  S r = scalar_traits<S>::from_int(static_cast<long long>(X.size()));
  for (const auto& [g, count] : X.members())
    out[pack(g, u)] += scalar_traits<S>::from_int(static_cast<long long>(count)) / r;
  return SchemaVector<S>(u, Basis::standard, std::move(out));
}

/// Proportional selection: reweight by fitness, renormalize.
template <class S>
PopulationVector<S> select(const PopulationVector<S>& x,
                           const FitnessFunction<S>& f) {
  std::vector<S> e(x.size(), scalar_traits<S>::zero());
  S total = scalar_traits<S>::zero();
  for (std::uint64_t j = 0; j < x.size(); ++j) {
    if (scalar_traits<S>::is_zero(x[j])) continue;
    e[j] = f(Genome(j, x.len())) * x[j];
    total += e[j];
  }
  if (!(total > scalar_traits<S>::zero()))
    throw std::invalid_argument("select: total fitness is not positive");
  for (S& v : e) v /= total;
  return PopulationVector<S>(x.len(), std::move(e));
}

/// Schema averages after proportional selection, computed directly from the
/// finite population: bucket fitness mass per coset, then normalize by the
/// population's total fitness. Cost: 2^order buckets plus one fitness
/// evaluation per member; no dense allocation over the string space.
template <class S>
SchemaVector<S> schema_selection_averages(const FinitePopulation& X,
                                          const FitnessFunction<S>& f,
                                          const Genome& u) {
  if (u.len != X.len())
    throw std::invalid_argument(
        "schema_selection_averages: mask length mismatch");
  std::vector<S> s(std::uint64_t{1} << popcount(u), scalar_traits<S>::zero());
  for (const auto& [g, count] : X.members())
    s[pack(g, u)] += scalar_traits<S>::from_int(static_cast<long long>(count)) * f(g);
  S total = scalar_traits<S>::zero();
  for (const S& v : s) total += v;
  if (!(total > scalar_traits<S>::zero()))
    throw std::invalid_argument(
        "schema_selection_averages: total fitness is not positive");
  for (S& v : s) v /= total;
  return SchemaVector<S>(u, Basis::standard, std::move(s));
}

/// Coarsens a schema-average vector to a sub-mask v of its mask u by summing
/// out the positions of u not in v.
template <class S>
SchemaVector<S> marginalize(const SchemaVector<S>& s, const Genome& v) {
  detail::require_basis(s, Basis::standard, "marginalize");
  const Genome& u = s.mask();
  if ((v & u) != v)
    throw std::invalid_argument("marginalize: target is not a sub-mask");
  std::vector<S> out(std::uint64_t{1} << popcount(v), scalar_traits<S>::zero());
  for (std::uint64_t t = 0; t < s.size(); ++t)
    out[pack(unpack(t, u) & v, v)] += s[t];
  return SchemaVector<S>(v, Basis::standard, std::move(out));
}

}  // namespace schemax
