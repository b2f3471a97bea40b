#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace schemax {

/// Longest representable string: a genome fits one 64-bit word with headroom.
inline constexpr int kMaxLen = 62;
/// Dense vectors indexed over the whole string space are only allocated up
/// to this length; everything above stays in sparse / per-family form.
inline constexpr int kMaxDenseLen = 20;

/// A fixed-length binary string, stored as an unsigned integer plus its
/// explicit length. All binary operations require equal lengths.
struct Genome {
  std::uint64_t bits = 0;
  int len = 1;

  Genome() = default;
  Genome(std::uint64_t bits_, int len_) : bits(bits_), len(len_) {
    if (len < 1 || len > kMaxLen)
      throw std::invalid_argument("Genome: length must be in [1, 62], got " +
                                  std::to_string(len));
    if (len < 64 && (bits >> len) != 0)
      throw std::invalid_argument("Genome: value does not fit in " +
                                  std::to_string(len) + " bits");
  }

  bool bit(int i) const { return (bits >> i) & 1u; }

  friend bool operator==(const Genome& a, const Genome& b) {
    return a.bits == b.bits && a.len == b.len;
  }
  friend bool operator!=(const Genome& a, const Genome& b) { return !(a == b); }
  friend bool operator<(const Genome& a, const Genome& b) {
    return a.len != b.len ? a.len < b.len : a.bits < b.bits;
  }
};

namespace detail {
inline void check_same_len(const Genome& a, const Genome& b, const char* op) {
  if (a.len != b.len)
    throw std::invalid_argument(std::string(op) + ": genome lengths differ (" +
                                std::to_string(a.len) + " vs " +
                                std::to_string(b.len) + ")");
}
}  // namespace detail

inline std::uint64_t domain_size(int len) { return std::uint64_t{1} << len; }

inline Genome all_ones(int len) { return Genome(domain_size(len) - 1, len); }

/// Bitwise xor; the group operation on the string space.
inline Genome operator^(const Genome& a, const Genome& b) {
  detail::check_same_len(a, b, "xor");
  return Genome(a.bits ^ b.bits, a.len);
}

/// Bitwise and.
inline Genome operator&(const Genome& a, const Genome& b) {
  detail::check_same_len(a, b, "and");
  return Genome(a.bits & b.bits, a.len);
}

/// Ones-complement within the string length.
inline Genome complement(const Genome& a) {
  return Genome(~a.bits & (domain_size(a.len) - 1), a.len);
}

/// Number of set bits.
inline int popcount(const Genome& a) { return std::popcount(a.bits); }

/// (-1)^(number of positions set in both strings).
inline int parity_product(const Genome& a, const Genome& b) {
  detail::check_same_len(a, b, "parity_product");
  return (std::popcount(a.bits & b.bits) & 1) ? -1 : +1;
}

/// Ascending enumeration of the subgroup {v : v & u == v}; 2^popcount(u)
/// elements, using the subset-stepping identity next = (cur - u) & u.
class SubgroupRange {
 public:
  class iterator {
   public:
    iterator(std::uint64_t cur, std::uint64_t mask, int len, bool done)
        : cur_(cur), mask_(mask), len_(len), done_(done) {}
    Genome operator*() const { return Genome(cur_, len_); }
    iterator& operator++() {
      cur_ = (cur_ - mask_) & mask_;
      done_ = (cur_ == 0);
      return *this;
    }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.done_ == b.done_ && (a.done_ || a.cur_ == b.cur_);
    }
    friend bool operator!=(const iterator& a, const iterator& b) {
      return !(a == b);
    }

   private:
    std::uint64_t cur_, mask_;
    int len_;
    bool done_;
  };

  explicit SubgroupRange(Genome u) : u_(u) {}
  iterator begin() const { return iterator(0, u_.bits, u_.len, false); }
  iterator end() const { return iterator(0, u_.bits, u_.len, true); }
  std::uint64_t size() const { return std::uint64_t{1} << popcount(u_); }

 private:
  Genome u_;
};

inline SubgroupRange subgroup(Genome u) { return SubgroupRange(u); }

/// Compresses the bits of j at the set positions of u into [0, 2^popcount(u)):
/// the t-th lowest set bit of u becomes bit t of the result.
inline std::uint64_t pack(const Genome& j, const Genome& u) {
  detail::check_same_len(j, u, "pack");
  std::uint64_t out = 0;
  int t = 0;
  for (std::uint64_t m = u.bits; m != 0; m &= m - 1, ++t)
    out |= ((j.bits >> std::countr_zero(m)) & 1u) << t;
  return out;
}

/// Right inverse of pack: expands i onto the set positions of u.
inline Genome unpack(std::uint64_t i, const Genome& u) {
  int order = popcount(u);
  if (order < 64 && i >= (std::uint64_t{1} << order))
    throw std::invalid_argument("unpack: packed index out of range");
  std::uint64_t out = 0;
  int t = 0;
  for (std::uint64_t m = u.bits; m != 0; m &= m - 1, ++t)
    out |= ((i >> t) & 1u) << std::countr_zero(m);
  return Genome(out, u.len);
}

/// Index of the highest set bit; 0 for the zero string.
inline int hi(const Genome& u) {
  return u.bits == 0 ? 0 : 63 - std::countl_zero(u.bits);
}

/// Index of the lowest set bit; len-1 for the zero string.
inline int lo(const Genome& u) {
  return u.bits == 0 ? u.len - 1 : std::countr_zero(u.bits);
}

/// hi(u) - lo(u), clamped to 0 for the zero string (whose literal value
/// would be negative and would break the crossover retention bound).
inline int defining_length(const Genome& u) {
  return u.bits == 0 ? 0 : hi(u) - lo(u);
}

}  // namespace schemax
