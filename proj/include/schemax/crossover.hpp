#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "schemax/bitspace.hpp"
#include "schemax/popmodel.hpp"
#include "schemax/scalar.hpp"
#include "schemax/walsh.hpp"

namespace schemax {

enum class CrossoverKind { one_point, two_point, uniform, custom };

/// A probability distribution over crossover masks, held as a sparse map
/// (zero-probability masks are dropped). Every downstream formula consumes
/// only the symmetrized weights (chi_m + chi_complement(m)) / 2, which are
/// computed once at construction.
template <class S>
class CrossoverDistribution {
 public:
  /// Mask 0 with probability 1-c; the length-1 prefix masks 2^i - 1,
  /// i = 1..len-1, with probability c/(len-1) each.
  static CrossoverDistribution one_point(int len, S c) {
    check_rate(c);
    std::map<std::uint64_t, S> m;
    if (c > scalar_traits<S>::zero()) {
      if (len < 2)
        throw std::invalid_argument("one_point: need len >= 2 when c > 0");
      S each = c / scalar_traits<S>::from_int(len - 1);
      for (int i = 1; i < len; ++i) m[(std::uint64_t{1} << i) - 1] = each;
    }
    add_nonzero(m, 0, scalar_traits<S>::one() - c);
    return CrossoverDistribution(len, CrossoverKind::one_point, c, std::move(m));
  }

  /// Mask 0 with probability 1-c; mass c spread uniformly over the interior
  /// run masks 2^a - 2^b, 1 <= b < a <= len-1.
  static CrossoverDistribution two_point(int len, S c) {
    check_rate(c);
    std::map<std::uint64_t, S> m;
    if (c > scalar_traits<S>::zero()) {
      if (len < 3)
        throw std::invalid_argument("two_point: need len >= 3 when c > 0");
      long long runs = static_cast<long long>(len - 1) * (len - 2) / 2;
      S each = c / scalar_traits<S>::from_int(runs);
      for (int a = 2; a < len; ++a)
        for (int b = 1; b < a; ++b)
          m[(std::uint64_t{1} << a) - (std::uint64_t{1} << b)] = each;
    }
    add_nonzero(m, 0, scalar_traits<S>::one() - c);
    return CrossoverDistribution(len, CrossoverKind::two_point, c, std::move(m));
  }

  /// Mass c spread as 2^-len over every mask, plus 1-c extra on mask 0.
  /// Materializes the full support, so it is limited to dense lengths.
  static CrossoverDistribution uniform(int len, S c) {
    check_rate(c);
    std::map<std::uint64_t, S> m;
    if (c > scalar_traits<S>::zero()) {
      if (len > kMaxDenseLen)
        throw std::invalid_argument(
            "uniform crossover: support has 2^len masks, need len <= " +
            std::to_string(kMaxDenseLen));
      S each = c * scalar_traits<S>::pow2_half(-2 * len);
      for (std::uint64_t k = 0; k < domain_size(len); ++k) m[k] = each;
    }
    add_nonzero(m, 0, scalar_traits<S>::one() - c);
    return CrossoverDistribution(len, CrossoverKind::uniform,
                                 std::move(c), std::move(m));
  }

  /// Explicit mask distribution, validated and taken verbatim.
  static CrossoverDistribution custom(int len, std::map<std::uint64_t, S> m) {
    return CrossoverDistribution(len, CrossoverKind::custom,
                                 scalar_traits<S>::zero(), std::move(m));
  }

  int len() const { return len_; }
  CrossoverKind kind() const { return kind_; }
  /// Crossover rate c; meaningful for the named constructions only.
  const S& rate() const { return rate_; }
  const std::map<std::uint64_t, S>& support() const { return support_; }
  /// The symmetrized weights: tilde_m = (chi_m + chi_complement(m)) / 2.
  const std::map<std::uint64_t, S>& symmetrized_support() const {
    return tilde_;
  }
  bool symmetrized() const { return symmetrized_; }

 private:
  CrossoverDistribution(int len, CrossoverKind kind, S rate,
                        std::map<std::uint64_t, S> support)
      : len_(len), kind_(kind), rate_(std::move(rate)),
        support_(std::move(support)) {
    if (len_ < 1 || len_ > kMaxLen)
      throw std::invalid_argument("CrossoverDistribution: bad length");
    const std::uint64_t full = domain_size(len_) - 1;
    S sum = scalar_traits<S>::zero();
    for (auto it = support_.begin(); it != support_.end();) {
      if (it->first > full)
        throw std::invalid_argument(
            "CrossoverDistribution: mask does not fit the string length");
      if (it->second < scalar_traits<S>::zero())
        throw std::invalid_argument(
            "CrossoverDistribution: negative mask probability");
      sum += it->second;
      it = scalar_traits<S>::is_zero(it->second) ? support_.erase(it) : ++it;
    }
    check_unit_sum(sum);
    S half = scalar_traits<S>::ratio(1, 2);
    for (const auto& [m, w] : support_) {
      tilde_[m] += w * half;
      tilde_[m ^ full] += w * half;
    }
    symmetrized_ = (tilde_ == support_);
  }

  static void check_rate(const S& c) {
    if (c < scalar_traits<S>::zero() || c > scalar_traits<S>::one())
      throw std::invalid_argument("crossover rate must be in [0, 1]");
  }

  static void check_unit_sum(const S& sum) {
    if constexpr (scalar_traits<S>::is_exact) {
      if (sum != scalar_traits<S>::one())
        throw std::invalid_argument(
            "CrossoverDistribution: mask probabilities must sum to 1");
    } else {
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument(
            "CrossoverDistribution: mask probabilities must sum to 1");
    }
  }

  static void add_nonzero(std::map<std::uint64_t, S>& m, std::uint64_t mask,
                          S w) {
    if (!scalar_traits<S>::is_zero(w)) m[mask] += w;
  }

  template <class T>
  friend CrossoverDistribution<T> symmetrize(const CrossoverDistribution<T>&);

  int len_;
  CrossoverKind kind_;
  S rate_;
  std::map<std::uint64_t, S> support_;
  std::map<std::uint64_t, S> tilde_;
  bool symmetrized_ = false;
};

/// The distribution whose support is the symmetrized weights; idempotent,
/// and interchangeable with the original in every crossover formula.
template <class S>
CrossoverDistribution<S> symmetrize(const CrossoverDistribution<S>& chi) {
  return CrossoverDistribution<S>(chi.len_, chi.kind_, chi.rate_, chi.tilde_);
}

namespace detail {

// Symmetrized weights grouped by the intersection of the mask with u; the
// crossover formulas for the family over u depend on the mask only through
// that intersection. For one/two-point operators this collapses the mask
// loop to O(order) groups.
template <class S>
std::map<std::uint64_t, S> group_masks_by(const CrossoverDistribution<S>& chi,
                                          const Genome& u) {
  std::map<std::uint64_t, S> groups;
  for (const auto& [m, w] : chi.symmetrized_support()) groups[m & u.bits] += w;
  return groups;
}

}  // namespace detail

/// Expected population after crossover, computed in the Walsh basis:
/// yhat_k = sqrt(n) * sum_m tilde_m * xhat_(k&m) * xhat_(k&~m).
template <class S>
PopulationVector<S> crossover_full(const PopulationVector<S>& x,
                                   const CrossoverDistribution<S>& chi) {
  if (chi.len() != x.len())
    throw std::invalid_argument("crossover_full: length mismatch");
  WalshVector<S> xhat = to_walsh_full(x);
  const std::uint64_t n = x.size(), full = n - 1;
  const S root_n = scalar_traits<S>::pow2_half(x.len());
  std::vector<S> yhat(n, scalar_traits<S>::zero());
  for (std::uint64_t k = 0; k < n; ++k) {
    S acc = scalar_traits<S>::zero();
    for (const auto& [m, w] : chi.symmetrized_support())
      acc += w * xhat.entries[k & m] * xhat.entries[k & ~m & full];
    yhat[k] = root_n * acc;
  }
  return from_walsh_full(WalshVector<S>{x.len(), std::move(yhat)});
}

/// Reference crossover: accumulates child mass pair by pair straight from
/// the definition (each parent pair i,j and mask m sends weight
/// x_i * x_j * tilde_m to child (i&m)^(j&~m)). Quadratic in the population
/// support; for tests only.
template <class S>
PopulationVector<S> crossover_oracle(const PopulationVector<S>& x,
                                     const CrossoverDistribution<S>& chi) {
  if (chi.len() != x.len())
    throw std::invalid_argument("crossover_oracle: length mismatch");
  if (x.len() > 12)
    throw std::invalid_argument("crossover_oracle: quadratic cost, len <= 12");
  const std::uint64_t n = x.size(), full = n - 1;
  std::vector<std::uint64_t> live;
  for (std::uint64_t i = 0; i < n; ++i)
    if (!scalar_traits<S>::is_zero(x[i])) live.push_back(i);
  std::vector<S> y(n, scalar_traits<S>::zero());
  for (std::uint64_t i : live)
    for (std::uint64_t j : live) {
      S xij = x[i] * x[j];
      for (const auto& [m, w] : chi.symmetrized_support())
        y[(i & m) ^ (j & ~m & full)] += xij * w;
    }
  return PopulationVector<S>(x.len(), std::move(y));
}

/// Walsh-basis schema crossover over the family of u:
/// yhat_k = sum_m tilde_m * xhat^(u&m)_(k&m) * xhat^(u&~m)_(k&~m),
/// where the sub-family coefficients are rescalings of the input,
/// xhat^(v)_j = 2^((order(u)-order(v))/2) * xhat^(u)_j. Grouping masks by
/// u&m and folding the two rescale factors leaves one constant
/// 2^(order/2) in front. Works at any string length.
template <class S>
SchemaVector<S> crossover_schema_walsh(const SchemaVector<S>& shat,
                                       const CrossoverDistribution<S>& chi) {
  detail::require_basis(shat, Basis::walsh, "crossover_schema_walsh");
  const Genome& u = shat.mask();
  if (chi.len() != u.len)
    throw std::invalid_argument("crossover_schema_walsh: length mismatch");
  std::map<std::uint64_t, S> groups = detail::group_masks_by(chi, u);
  std::vector<std::pair<std::uint64_t, S>> packed_groups;
  packed_groups.reserve(groups.size());
  for (const auto& [g, w] : groups)
    packed_groups.emplace_back(pack(Genome(g, u.len), u), w);
  const std::uint64_t sz = shat.size(), full = sz - 1;
  const S scale = scalar_traits<S>::pow2_half(popcount(u));
  std::vector<S> out(sz, scalar_traits<S>::zero());
  for (std::uint64_t k = 0; k < sz; ++k) {
    S acc = scalar_traits<S>::zero();
    for (const auto& [gp, w] : packed_groups)
      acc += w * shat[k & gp] * shat[k & ~gp & full];
    out[k] = scale * acc;
  }
  return SchemaVector<S>(u, Basis::walsh, std::move(out));
}

/// Standard-basis schema crossover over the family of u:
/// y_k = sum_m tilde_m * x^(u&m)_(k&m) * x^(u&~m)_(k&~m), with the sub-family
/// averages obtained by marginalization (memoized per distinct sub-mask).
/// This is an independent route from crossover_schema_walsh; the two agree.
template <class S>
SchemaVector<S> crossover_schema(const SchemaVector<S>& s,
                                 const CrossoverDistribution<S>& chi) {
  detail::require_basis(s, Basis::standard, "crossover_schema");
  const Genome& u = s.mask();
  if (chi.len() != u.len)
    throw std::invalid_argument("crossover_schema: length mismatch");
  std::map<std::uint64_t, S> groups = detail::group_masks_by(chi, u);
  std::map<std::uint64_t, SchemaVector<S>> marginals;
  auto marginal = [&](std::uint64_t v) -> const SchemaVector<S>& {
    auto it = marginals.find(v);
    if (it == marginals.end())
      it = marginals.emplace(v, marginalize(s, Genome(v, u.len))).first;
    return it->second;
  };
  const std::uint64_t sz = s.size();
  std::vector<S> out(sz, scalar_traits<S>::zero());
  for (std::uint64_t kp = 0; kp < sz; ++kp) {
    Genome k = unpack(kp, u);
    S acc = scalar_traits<S>::zero();
    for (const auto& [g, w] : groups) {
      Genome gm(g, u.len), gc = u ^ gm;
      acc += w * marginal(g)[pack(k & gm, gm)] * marginal(gc.bits)[pack(k & gc, gc)];
    }
    out[kp] = acc;
  }
  return SchemaVector<S>(u, Basis::standard, std::move(out));
}

/// Symmetrized mass of the masks that do not split u (every fixed position
/// inherited from one parent). For one-point crossover this equals
/// 1 - c * defining_length(u) / (len - 1).
template <class S>
S retention_probability(const Genome& u, const CrossoverDistribution<S>& chi) {
  if (chi.len() != u.len)
    throw std::invalid_argument("retention_probability: length mismatch");
  const std::uint64_t full = domain_size(u.len) - 1;
  S total = scalar_traits<S>::zero();
  for (const auto& [m, w] : chi.symmetrized_support())
    if ((u.bits & m) == u.bits || (u.bits & ~m & full) == u.bits) total += w;
  return total;
}

/// Entrywise lower bounds after crossover: the input averages scaled by the
/// retention probability. Not a probability vector (sums to the retention).
template <class S>
std::vector<S> holland_crossover_bound(const SchemaVector<S>& s,
                                       const CrossoverDistribution<S>& chi) {
  detail::require_basis(s, Basis::standard, "holland_crossover_bound");
  S keep = retention_probability(s.mask(), chi);
  std::vector<S> out(s.entries());
  for (S& v : out) v *= keep;
  return out;
}

/// Linkage equilibrium relative to mask m: the Walsh coefficients factor
/// across the split, sqrt(n) * xhat_(k&m) * xhat_(k&~m) == xhat_k for all k.
/// Populations with this property are fixed by crossover with mask m.
template <class S>
bool is_linkage_equilibrium(const PopulationVector<S>& x, const Genome& m,
                            double tol = 1e-9) {
  if (m.len != x.len())
    throw std::invalid_argument("is_linkage_equilibrium: length mismatch");
  WalshVector<S> xhat = to_walsh_full(x);
  const std::uint64_t n = x.size(), full = n - 1;
  const S root_n = scalar_traits<S>::pow2_half(x.len());
  for (std::uint64_t k = 0; k < n; ++k) {
    S diff = root_n * xhat.entries[k & m.bits] * xhat.entries[k & ~m.bits & full] -
             xhat.entries[k];
    if constexpr (scalar_traits<S>::is_exact) {
      if (!diff.is_zero()) return false;
    } else {
      if (std::abs(diff) > tol) return false;
    }
  }
  return true;
}

/// Schema-level form of the same test on the family over u: the averages
/// must factor into the two marginals induced by m, entry by entry.
template <class S>
bool is_linkage_equilibrium(const SchemaVector<S>& s, const Genome& m,
                            double tol = 1e-9) {
  detail::require_basis(s, Basis::standard, "is_linkage_equilibrium");
  const Genome& u = s.mask();
  if (m.len != u.len)
    throw std::invalid_argument("is_linkage_equilibrium: length mismatch");
  Genome gm = u & m, gc = u ^ gm;
  SchemaVector<S> a = marginalize(s, gm), b = marginalize(s, gc);
  for (std::uint64_t kp = 0; kp < s.size(); ++kp) {
    Genome k = unpack(kp, u);
    S diff = a[pack(k & gm, gm)] * b[pack(k & gc, gc)] - s[kp];
    if constexpr (scalar_traits<S>::is_exact) {
      if (!diff.is_zero()) return false;
    } else {
      if (std::abs(diff) > tol) return false;
    }
  }
  return true;
}

}  // namespace schemax
