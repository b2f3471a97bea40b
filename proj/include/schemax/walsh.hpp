#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "schemax/bitspace.hpp"
#include "schemax/popmodel.hpp"
#include "schemax/scalar.hpp"

namespace schemax {

/// In-place orthonormal Walsh-Hadamard transform of a power-of-two-sized
/// array: iterative butterflies, low stride first, then one global
/// 2^(-d/2) scale. Involutive: applying it twice restores the input.
template <class S>
void fwht_in_place(std::span<S> v) {
  const std::size_t n = v.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fwht: size must be a power of two");
  for (std::size_t h = 1; h < n; h *= 2) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        S x = v[j];
        S y = v[j + h];
        v[j] = x + y;
        v[j + h] = x - y;
      }
    }
  }
  const int d = std::countr_zero(n);
  if (d == 0) return;
  const S scale = scalar_traits<S>::pow2_half(-d);
  for (S& x : v) x *= scale;
}

/// A population written in the Walsh basis (dense over the string space).
template <class S>
struct WalshVector {
  int len;
  std::vector<S> entries;
};

namespace detail {

// Restores simplex membership after a float inverse transform: round-off
// negatives with total magnitude below 1e-10 are clamped to zero and the
// vector renormalized; anything larger (or any negative in rational mode)
// is a contract violation.
template <class S>
void restore_simplex(std::vector<S>& e) {
  if constexpr (scalar_traits<S>::is_exact) {
    for (const S& x : e)
      if (x < scalar_traits<S>::zero())
        throw numeric_contract_error(
            "inverse transform produced negative probability mass");
  } else {
    long double neg = 0.0L;
    for (double x : e)
      if (x < 0.0) neg -= x;
    if (neg == 0.0L) return;
    if (neg >= 1e-10)
      throw numeric_contract_error(
          "inverse transform produced negative mass beyond round-off");
    long double sum = 0.0L;
    for (double& x : e) {
      if (x < 0.0) x = 0.0;
      sum += x;
    }
    for (double& x : e) x = static_cast<double>(x / sum);
  }
}

}  // namespace detail

template <class S>
WalshVector<S> to_walsh_full(const PopulationVector<S>& x) {
  std::vector<S> e = x.entries();
  fwht_in_place(std::span<S>(e));
  return WalshVector<S>{x.len(), std::move(e)};
}

template <class S>
PopulationVector<S> from_walsh_full(const WalshVector<S>& xhat) {
  std::vector<S> e = xhat.entries;
  if (e.size() != domain_size(xhat.len))
    throw std::invalid_argument("from_walsh_full: expected 2^len entries");
  fwht_in_place(std::span<S>(e));
  detail::restore_simplex(e);
  return PopulationVector<S>(xhat.len, std::move(e));
}

template <class S>
SchemaVector<S> to_walsh(const SchemaVector<S>& s) {
  detail::require_basis(s, Basis::standard, "to_walsh");
  std::vector<S> e = s.entries();
  fwht_in_place(std::span<S>(e));
  return SchemaVector<S>(s.mask(), Basis::walsh, std::move(e));
}

template <class S>
SchemaVector<S> from_walsh(const SchemaVector<S>& shat) {
  detail::require_basis(shat, Basis::walsh, "from_walsh");
  std::vector<S> e = shat.entries();
  fwht_in_place(std::span<S>(e));
  detail::restore_simplex(e);
  return SchemaVector<S>(shat.mask(), Basis::standard, std::move(e));
}

/// Extracts the Walsh schema vector of the family over u straight from the
/// full-space Walsh coefficients: packed entry k is 2^((len-order)/2) times
/// coefficient k, for k in the subgroup of u. Equal to to_walsh of the
/// standard schema averages.
template <class S>
SchemaVector<S> schema_walsh_from_full(const WalshVector<S>& xhat,
                                       const Genome& u) {
  if (u.len != xhat.len)
    throw std::invalid_argument("schema_walsh_from_full: length mismatch");
  const S scale = scalar_traits<S>::pow2_half(xhat.len - popcount(u));
  std::vector<S> out;
  out.reserve(std::uint64_t{1} << popcount(u));
  for (Genome k : subgroup(u)) out.push_back(scale * xhat.entries[k.bits]);
  return SchemaVector<S>(u, Basis::walsh, std::move(out));
}

}  // namespace schemax
