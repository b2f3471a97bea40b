#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace schemax {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Thrown when a stochastic-vector contract (nonnegativity / unit mass) is
/// violated beyond tolerance. The CLI maps this to exit code 3.
class numeric_contract_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact scalar: an arbitrary-precision rational times an optional factor of
/// sqrt(2). The value is q * 2^(h/2) with h normalized into {0, 1}; even
/// powers of two are folded into q. Closed under multiplication and
/// division; addition requires both operands to have the same sqrt(2)
/// parity (all pipeline sums do) and throws otherwise.
class Exact {
 public:
  Exact() = default;
  Exact(long long n) : q_(n) {}  // NOLINT: implicit by design, matches double
  Exact(BigRational q, long long h = 0) : q_(std::move(q)) { normalize(h); }

  static Exact ratio(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("Exact::ratio: zero denominator");
    return Exact(BigRational(num, den));
  }

  /// 2^(h/2) for any integer h (negative allowed).
  static Exact pow2_half(long long h) { return Exact(BigRational(1), h); }

  bool is_zero() const { return q_.is_zero(); }
  bool is_rational() const { return half_ == 0; }
  int sign() const { return q_.sign(); }

  /// Rational coefficient q in q * sqrt(2)^half.
  const BigRational& coefficient() const { return q_; }
  int sqrt2_parity() const { return half_; }

  /// The value as a plain rational; throws if a sqrt(2) factor remains.
  const BigRational& rational_value() const {
    if (half_ != 0)
      throw std::invalid_argument("Exact: value carries a sqrt(2) factor");
    return q_;
  }

  double to_double() const {
    double d = q_.convert_to<double>();
    return half_ ? d * kSqrt2 : d;
  }

  Exact abs() const {
    Exact r = *this;
    if (r.q_ < 0) r.q_ = -r.q_;
    return r;
  }

  std::string str() const {
    std::string s = numerator(q_).str();
    if (denominator(q_) != 1) s += "/" + denominator(q_).str();
    if (half_) s += "*sqrt(2)";
    return s;
  }

  Exact& operator+=(const Exact& o) {
    if (o.q_.is_zero()) return *this;
    if (q_.is_zero()) {
      *this = o;
      return *this;
    }
    if (half_ != o.half_)
      throw std::invalid_argument("Exact: sum of mixed sqrt(2) parities");
    q_ += o.q_;
    if (q_.is_zero()) half_ = 0;
    return *this;
  }
  Exact& operator-=(const Exact& o) { return *this += -o; }
  Exact& operator*=(const Exact& o) {
    q_ *= o.q_;
    normalize(half_ + o.half_);
    return *this;
  }
  Exact& operator/=(const Exact& o) {
    if (o.q_.is_zero()) throw std::invalid_argument("Exact: division by zero");
    q_ /= o.q_;
    normalize(half_ - o.half_);
    return *this;
  }

  Exact operator-() const {
    Exact r = *this;
    r.q_ = -r.q_;
    return r;
  }

  friend Exact operator+(Exact a, const Exact& b) { return a += b; }
  friend Exact operator-(Exact a, const Exact& b) { return a -= b; }
  friend Exact operator*(Exact a, const Exact& b) { return a *= b; }
  friend Exact operator/(Exact a, const Exact& b) { return a /= b; }

  friend bool operator==(const Exact& a, const Exact& b) {
    return a.half_ == b.half_ && a.q_ == b.q_;
  }
  friend bool operator!=(const Exact& a, const Exact& b) { return !(a == b); }

  friend bool operator<(const Exact& a, const Exact& b) {
    if (a.half_ == b.half_) return a.q_ < b.q_;
    // Mixed parity: order by sign, then by squared magnitude.
    int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa < sb;
    if (sa == 0) return false;
    BigRational qa = a.q_ * a.q_, qb = b.q_ * b.q_;
    if (a.half_) qa *= 2;
    if (b.half_) qb *= 2;
    return sa > 0 ? qa < qb : qb < qa;
  }
  friend bool operator>(const Exact& a, const Exact& b) { return b < a; }
  friend bool operator<=(const Exact& a, const Exact& b) { return !(b < a); }
  friend bool operator>=(const Exact& a, const Exact& b) { return !(a < b); }

 private:
  static constexpr double kSqrt2 = 1.4142135623730951;

  void normalize(long long h) {
    if (q_.is_zero()) {
      half_ = 0;
      return;
    }
    long long t = h >= 0 ? h / 2 : -((-h + 1) / 2);  // floor(h / 2)
    half_ = static_cast<int>(h - 2 * t);
    if (t > 0)
      q_ *= BigRational(BigInt(1) << t);
    else if (t < 0)
      q_ /= BigRational(BigInt(1) << -t);
  }

  BigRational q_{};
  int half_ = 0;
};

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool is_exact = false;
  static const char* mode_name() { return "float"; }
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_int(long long n) { return static_cast<double>(n); }
  static double ratio(long long num, long long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double pow2_half(long long h) {
    double even = std::ldexp(1.0, static_cast<int>(h >= 0 ? h / 2 : -((-h + 1) / 2)));
    return (h & 1) ? even * 1.4142135623730951 : even;
  }
  static double to_double(double v) { return v; }
  static bool is_zero(double v) { return v == 0.0; }
  static double abs(double v) { return std::fabs(v); }
  static std::string display(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
};

template <>
struct scalar_traits<Exact> {
  static constexpr bool is_exact = true;
  static const char* mode_name() { return "rational"; }
  static Exact zero() { return Exact(0); }
  static Exact one() { return Exact(1); }
  static Exact from_int(long long n) { return Exact(n); }
  static Exact ratio(long long num, long long den) { return Exact::ratio(num, den); }
  static Exact pow2_half(long long h) { return Exact::pow2_half(h); }
  static double to_double(const Exact& v) { return v.to_double(); }
  static bool is_zero(const Exact& v) { return v.is_zero(); }
  static Exact abs(const Exact& v) { return v.abs(); }
  static std::string display(const Exact& v) { return v.str(); }
};

}  // namespace schemax
