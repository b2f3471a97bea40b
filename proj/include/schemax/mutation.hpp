#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "schemax/bitspace.hpp"
#include "schemax/popmodel.hpp"
#include "schemax/scalar.hpp"
#include "schemax/walsh.hpp"

namespace schemax {

/// Independent per-bit mutation: bit i flips with probability p_i. The
/// derived coordinates q_i = 1 - 2 p_i diagonalize the operator in the
/// Walsh basis. Rates above 1/2 are allowed (q_i goes negative).
template <class S>
class MutationRates {
 public:
  MutationRates(int len, std::vector<S> p) : len_(len), p_(std::move(p)) {
    if (len_ < 1 || len_ > kMaxLen)
      throw std::invalid_argument("MutationRates: bad length");
    if (p_.size() != static_cast<std::size_t>(len_))
      throw std::invalid_argument("MutationRates: need one rate per position");
    S two = scalar_traits<S>::from_int(2);
    q_.reserve(p_.size());
    for (const S& pi : p_) {
      if (pi < scalar_traits<S>::zero() || pi > scalar_traits<S>::one())
        throw std::invalid_argument("MutationRates: rate outside [0, 1]");
      q_.push_back(scalar_traits<S>::one() - two * pi);
    }
  }

  static MutationRates uniform(int len, S p) {
    return MutationRates(len, std::vector<S>(static_cast<std::size_t>(len), p));
  }

  int len() const { return len_; }
  const S& p(int i) const { return p_[i]; }
  const S& q(int i) const { return q_[i]; }
  const std::vector<S>& flip_probabilities() const { return p_; }

  bool is_uniform() const {
    for (const S& pi : p_)
      if (pi != p_[0]) return false;
    return true;
  }
  /// The common rate; only meaningful when is_uniform().
  const S& uniform_rate() const {
    if (!is_uniform())
      throw std::invalid_argument("MutationRates: rates are not uniform");
    return p_[0];
  }

 private:
  int len_;
  std::vector<S> p_, q_;
};

/// Product-form mass of one mutation mask:
/// prod_i p_i^(m_i) (1-p_i)^(1-m_i), with 0^0 read as 1.
template <class S>
S mu_mass(const Genome& m, const MutationRates<S>& rates) {
  if (m.len != rates.len())
    throw std::invalid_argument("mu_mass: length mismatch");
  S out = scalar_traits<S>::one();
  for (int i = 0; i < m.len; ++i)
    out *= m.bit(i) ? rates.p(i) : scalar_traits<S>::one() - rates.p(i);
  return out;
}

/// Mask distribution restricted to the family over u: the same product over
/// the set positions of u only. Sums to 1 over the subgroup of u.
template <class S>
SchemaVector<S> mu_schema(const Genome& u, const MutationRates<S>& rates) {
  if (u.len != rates.len())
    throw std::invalid_argument("mu_schema: length mismatch");
  std::vector<S> vec{scalar_traits<S>::one()};
  int stage = 0;
  for (std::uint64_t m = u.bits; m != 0; m &= m - 1, ++stage) {
    int pos = std::countr_zero(m);
    std::vector<S> next(vec.size() * 2, scalar_traits<S>::zero());
    S stay = scalar_traits<S>::one() - rates.p(pos);
    for (std::size_t i = 0; i < vec.size(); ++i) {
      next[i] = vec[i] * stay;
      next[i | (std::uint64_t{1} << stage)] = vec[i] * rates.p(pos);
    }
    vec = std::move(next);
  }
  return SchemaVector<S>(u, Basis::standard, std::move(vec));
}

namespace detail {

// prod_{i in I(k)} q_i for every packed k over the subgroup of u, filled in
// one pass along the subset lattice (2^order multiplies in total).
template <class S>
std::vector<S> subset_q_products(const Genome& u, const MutationRates<S>& rates) {
  std::vector<int> pos;
  for (std::uint64_t m = u.bits; m != 0; m &= m - 1)
    pos.push_back(std::countr_zero(m));
  std::vector<S> dp(std::uint64_t{1} << pos.size(), scalar_traits<S>::one());
  for (std::uint64_t t = 1; t < dp.size(); ++t)
    dp[t] = dp[t & (t - 1)] * rates.q(pos[std::countr_zero(t)]);
  return dp;
}

}  // namespace detail

/// Expected population after mutation. Diagonal in the Walsh basis: the
/// coefficient at k is scaled by prod_{i in I(k)} q_i; equal to the direct
/// convolution of the population with the mask distribution.
template <class S>
PopulationVector<S> mutate_full(const PopulationVector<S>& x,
                                const MutationRates<S>& rates) {
  if (rates.len() != x.len())
    throw std::invalid_argument("mutate_full: length mismatch");
  WalshVector<S> xhat = to_walsh_full(x);
  std::vector<S> qp = detail::subset_q_products(all_ones(x.len()), rates);
  for (std::uint64_t k = 0; k < x.size(); ++k) xhat.entries[k] *= qp[k];
  return from_walsh_full(xhat);
}

/// Walsh-basis schema mutation: entrywise scaling of the family coefficients
/// by prod_{i in I(k)} q_i. Works at any string length.
template <class S>
SchemaVector<S> mutate_schema_walsh(const SchemaVector<S>& shat,
                                    const MutationRates<S>& rates) {
  detail::require_basis(shat, Basis::walsh, "mutate_schema_walsh");
  if (rates.len() != shat.mask().len)
    throw std::invalid_argument("mutate_schema_walsh: length mismatch");
  std::vector<S> qp = detail::subset_q_products(shat.mask(), rates);
  std::vector<S> out(shat.entries());
  for (std::uint64_t k = 0; k < out.size(); ++k) out[k] *= qp[k];
  return SchemaVector<S>(shat.mask(), Basis::walsh, std::move(out));
}

/// Standard-basis schema mutation, routed through the Walsh diagonal form.
template <class S>
SchemaVector<S> mutate_schema(const SchemaVector<S>& s,
                              const MutationRates<S>& rates) {
  detail::require_basis(s, Basis::standard, "mutate_schema");
  return from_walsh(mutate_schema_walsh(to_walsh(s), rates));
}

/// Entrywise lower bounds after uniform-rate mutation: the input averages
/// scaled by (1-p)^order, the diagonal of the schema mutation operator.
template <class S>
std::vector<S> holland_mutation_bound(const SchemaVector<S>& s, const S& p) {
  detail::require_basis(s, Basis::standard, "holland_mutation_bound");
  if (p < scalar_traits<S>::zero() || p > scalar_traits<S>::one())
    throw std::invalid_argument("holland_mutation_bound: rate outside [0, 1]");
  S keep = scalar_traits<S>::one();
  S stay = scalar_traits<S>::one() - p;
  for (int i = 0; i < popcount(s.mask()); ++i) keep *= stay;
  std::vector<S> out(s.entries());
  for (S& v : out) v *= keep;
  return out;
}

}  // namespace schemax
