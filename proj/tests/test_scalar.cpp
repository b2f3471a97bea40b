#include "schemax/scalar.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

namespace schemax {
namespace {

TEST(Exact, CanonicalizesEvenSqrt2Powers) {
  EXPECT_EQ(Exact(BigRational(3), 2), Exact(6));
  EXPECT_EQ(Exact(BigRational(1), -2), Exact::ratio(1, 2));
  EXPECT_EQ(Exact(BigRational(5), 0), Exact(5));
  // Odd exponents keep exactly one sqrt(2).
  EXPECT_EQ(Exact::pow2_half(-3), Exact(BigRational(1, 4), 1));
  EXPECT_EQ(Exact::pow2_half(3), Exact(BigRational(2), 1));
  EXPECT_EQ(Exact::pow2_half(0), Exact(1));
}

TEST(Exact, ZeroHasNoParity) {
  Exact z = Exact::pow2_half(1) - Exact::pow2_half(1);
  EXPECT_TRUE(z.is_zero());
  EXPECT_TRUE(z.is_rational());
  EXPECT_EQ(z + Exact(3), Exact(3));
  EXPECT_EQ(Exact(3) + z, Exact(3));
  EXPECT_EQ(z + Exact::pow2_half(1), Exact::pow2_half(1));
}

TEST(Exact, AdditionSameParity) {
  EXPECT_EQ(Exact::ratio(1, 3) + Exact::ratio(1, 6), Exact::ratio(1, 2));
  Exact a = Exact::ratio(1, 2) * Exact::pow2_half(1);
  Exact b = Exact::ratio(1, 4) * Exact::pow2_half(1);
  EXPECT_EQ(a + b, Exact(BigRational(3, 4), 1));
}

TEST(Exact, AdditionMixedParityThrows) {
  EXPECT_THROW(Exact(1) + Exact::pow2_half(1), std::invalid_argument);
}

TEST(Exact, MultiplicationTracksSqrt2) {
  EXPECT_EQ(Exact::pow2_half(1) * Exact::pow2_half(1), Exact(2));
  EXPECT_EQ(Exact::pow2_half(-1) * Exact::pow2_half(1), Exact(1));
  EXPECT_EQ(Exact::ratio(3, 4) * Exact::ratio(2, 3), Exact::ratio(1, 2));
  EXPECT_EQ(Exact(1) / Exact::pow2_half(1), Exact::pow2_half(-1));
  EXPECT_THROW(Exact(1) / Exact(0), std::invalid_argument);
  EXPECT_THROW(Exact::ratio(1, 0), std::invalid_argument);
}

TEST(Exact, ComparisonAcrossParities) {
  EXPECT_LT(Exact(1), Exact::pow2_half(1));           // 1 < sqrt(2)
  EXPECT_LT(Exact::pow2_half(1), Exact::ratio(3, 2)); // sqrt(2) < 1.5
  EXPECT_LT(-Exact::pow2_half(1), Exact(-1));         // -sqrt(2) < -1
  EXPECT_LT(Exact(-2), Exact::pow2_half(1));
  EXPECT_GT(Exact::pow2_half(1), Exact(0));
  EXPECT_EQ(Exact(0) < Exact(0), false);
}

TEST(Exact, Conversions) {
  EXPECT_DOUBLE_EQ(Exact::ratio(1, 4).to_double(), 0.25);
  EXPECT_DOUBLE_EQ(Exact::pow2_half(-1).to_double(), 0.7071067811865476);
  EXPECT_EQ(Exact::ratio(8, 20).str(), "2/5");
  EXPECT_EQ(Exact(-3).str(), "-3");
  EXPECT_EQ((Exact::ratio(1, 2) * Exact::pow2_half(1)).str(), "1/2*sqrt(2)");
  EXPECT_EQ(Exact::ratio(2, 4).rational_value(), BigRational(1, 2));
  EXPECT_THROW(Exact::pow2_half(1).rational_value(), std::invalid_argument);
}

TEST(Exact, AbsAndSign) {
  EXPECT_EQ(Exact(-5).abs(), Exact(5));
  EXPECT_EQ(Exact(-5).sign(), -1);
  EXPECT_EQ(Exact(0).sign(), 0);
  EXPECT_EQ(Exact::pow2_half(1).sign(), 1);
}

TEST(ScalarTraits, FloatPow2Half) {
  EXPECT_DOUBLE_EQ(scalar_traits<double>::pow2_half(-1), 0.7071067811865476);
  EXPECT_DOUBLE_EQ(scalar_traits<double>::pow2_half(4), 4.0);
  EXPECT_DOUBLE_EQ(scalar_traits<double>::pow2_half(-4), 0.25);
  EXPECT_DOUBLE_EQ(scalar_traits<double>::pow2_half(3),
                   2.0 * 1.4142135623730951);
}

}  // namespace
}  // namespace schemax
