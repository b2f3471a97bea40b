#include "schemax/crossover.hpp"

#include <gtest/gtest.h>

#include <map>
#include <stdexcept>

#include "testutil.hpp"

namespace schemax {
namespace {

using testutil::rat;

SchemaVector<Exact> worked_selection_vector() {
  return SchemaVector<Exact>(Genome(0b01010, 5), Basis::standard,
                             {rat(7, 20), rat(8, 20), rat(1, 20), rat(4, 20)});
}

TEST(OnePoint, Support) {
  auto chi = CrossoverDistribution<Exact>::one_point(5, rat(1, 2));
  std::map<std::uint64_t, Exact> expected{{0, rat(1, 2)}, {1, rat(1, 8)},
                                          {3, rat(1, 8)}, {7, rat(1, 8)},
                                          {15, rat(1, 8)}};
  EXPECT_EQ(chi.support(), expected);
  EXPECT_EQ(chi.kind(), CrossoverKind::one_point);
  EXPECT_FALSE(chi.symmetrized());

  auto none = CrossoverDistribution<Exact>::one_point(5, Exact(0));
  EXPECT_EQ(none.support(), (std::map<std::uint64_t, Exact>{{0, Exact(1)}}));

  auto single = CrossoverDistribution<Exact>::one_point(2, Exact(1));
  EXPECT_EQ(single.support(), (std::map<std::uint64_t, Exact>{{1, Exact(1)}}));

  EXPECT_THROW(CrossoverDistribution<Exact>::one_point(1, rat(1, 2)),
               std::invalid_argument);
  EXPECT_NO_THROW(CrossoverDistribution<Exact>::one_point(1, Exact(0)));
  EXPECT_THROW(CrossoverDistribution<Exact>::one_point(5, Exact(2)),
               std::invalid_argument);
}

TEST(OtherFamilies, Construction) {
  auto uni = CrossoverDistribution<Exact>::uniform(2, Exact(1));
  std::map<std::uint64_t, Exact> quarter{{0, rat(1, 4)}, {1, rat(1, 4)},
                                         {2, rat(1, 4)}, {3, rat(1, 4)}};
  EXPECT_EQ(uni.support(), quarter);
  EXPECT_TRUE(uni.symmetrized());

  auto two0 = CrossoverDistribution<Exact>::two_point(4, Exact(0));
  EXPECT_EQ(two0.support(), (std::map<std::uint64_t, Exact>{{0, Exact(1)}}));

  auto two = CrossoverDistribution<Exact>::two_point(5, Exact(1));
  std::map<std::uint64_t, Exact> runs{{2, rat(1, 6)},  {6, rat(1, 6)},
                                      {4, rat(1, 6)},  {14, rat(1, 6)},
                                      {12, rat(1, 6)}, {8, rat(1, 6)}};
  EXPECT_EQ(two.support(), runs);
  EXPECT_THROW(CrossoverDistribution<Exact>::two_point(2, Exact(1)),
               std::invalid_argument);

  auto custom = CrossoverDistribution<Exact>::custom(
      5, {{0, rat(1, 2)}, {3, rat(1, 2)}});
  EXPECT_EQ(custom.support(),
            (std::map<std::uint64_t, Exact>{{0, rat(1, 2)}, {3, rat(1, 2)}}));
  EXPECT_THROW(CrossoverDistribution<Exact>::custom(5, {{0, rat(1, 2)}}),
               std::invalid_argument);
  EXPECT_THROW(CrossoverDistribution<Exact>::custom(
                   5, {{0, rat(3, 2)}, {3, rat(-1, 2)}}),
               std::invalid_argument);
  EXPECT_THROW(CrossoverDistribution<Exact>::custom(3, {{9, Exact(1)}}),
               std::invalid_argument);
}

TEST(Symmetrize, PointMassAndIdempotence) {
  auto clone = CrossoverDistribution<Exact>::custom(5, {{0, Exact(1)}});
  auto sym = symmetrize(clone);
  EXPECT_EQ(sym.support(),
            (std::map<std::uint64_t, Exact>{{0, rat(1, 2)}, {31, rat(1, 2)}}));
  EXPECT_TRUE(sym.symmetrized());
  EXPECT_EQ(symmetrize(sym).support(), sym.support());

  auto already = CrossoverDistribution<Exact>::uniform(3, Exact(1));
  EXPECT_EQ(symmetrize(already).support(), already.support());
}

TEST(Symmetrize, OnePointWeights) {
  auto chi = CrossoverDistribution<Exact>::one_point(5, rat(1, 2));
  std::map<std::uint64_t, Exact> expected{
      {0, rat(1, 4)},  {31, rat(1, 4)}, {1, rat(1, 16)},  {30, rat(1, 16)},
      {3, rat(1, 16)}, {28, rat(1, 16)}, {7, rat(1, 16)}, {24, rat(1, 16)},
      {15, rat(1, 16)}, {16, rat(1, 16)}};
  EXPECT_EQ(chi.symmetrized_support(), expected);
  EXPECT_EQ(symmetrize(chi).support(), expected);

  // The symmetrized distribution is interchangeable downstream.
  SchemaVector<Exact> s = worked_selection_vector();
  EXPECT_EQ(crossover_schema(s, chi).entries(),
            crossover_schema(s, symmetrize(chi)).entries());
}

TEST(CrossoverFull, CloningMasksAreIdentity) {
  RngStream rng(31);
  PopulationVector<Exact> x = testutil::random_population_vector<Exact>(rng, 4);
  auto clone = CrossoverDistribution<Exact>::custom(4, {{0, Exact(1)}});
  EXPECT_EQ(crossover_full(x, clone).entries(), x.entries());
  auto swap = CrossoverDistribution<Exact>::custom(4, {{15, Exact(1)}});
  EXPECT_EQ(crossover_full(x, swap).entries(), x.entries());
}

TEST(CrossoverFull, TwoBitUniformExample) {
  PopulationVector<Exact> x(2, {rat(1, 2), Exact(0), Exact(0), rat(1, 2)});
  auto chi = CrossoverDistribution<Exact>::uniform(2, Exact(1));
  PopulationVector<Exact> y = crossover_full(x, chi);
  EXPECT_EQ(y[0], rat(3, 8));
  EXPECT_EQ(y[1], rat(1, 8));
  EXPECT_EQ(y[2], rat(1, 8));
  EXPECT_EQ(y[3], rat(3, 8));
  EXPECT_EQ(crossover_oracle(x, chi).entries(), y.entries());
}

TEST(CrossoverOracle, DegenerateCases) {
  RngStream rng(32);
  PopulationVector<Exact> x1 = testutil::random_population_vector<Exact>(rng, 1);
  auto any1 = CrossoverDistribution<Exact>::custom(1, {{0, rat(1, 3)}, {1, rat(2, 3)}});
  EXPECT_EQ(crossover_oracle(x1, any1).entries(), x1.entries());

  PopulationVector<double> big(13, std::vector<double>(1 << 13, 1.0 / 8192));
  auto chi = CrossoverDistribution<double>::one_point(13, 0.5);
  EXPECT_THROW(crossover_oracle(big, chi), std::invalid_argument);
}

TEST(CrossoverOracleProperty, MatchesWalshRoute) {
  RngStream rng(33);
  // Exact agreement on sparse-support families.
  for (int trial = 0; trial < 40; ++trial) {
    int len = 1 + static_cast<int>(rng.next_below(6));
    PopulationVector<Exact> x = testutil::random_population_vector<Exact>(rng, len);
    int kind = len > 4 ? (trial % 3 == 2 ? 3 : trial % 3) : trial % 4;
    auto chi = testutil::crossover_family<Exact>(kind, len, rng);
    EXPECT_EQ(crossover_full(x, chi).entries(), crossover_oracle(x, chi).entries());
  }
  // Float agreement including dense uniform support up to len 8.
  for (int trial = 0; trial < 60; ++trial) {
    int len = 2 + static_cast<int>(rng.next_below(7));
    PopulationVector<double> x = testutil::random_population_vector<double>(rng, len);
    auto chi = testutil::crossover_family<double>(trial, len, rng);
    PopulationVector<double> a = crossover_full(x, chi);
    PopulationVector<double> b = crossover_oracle(x, chi);
    EXPECT_LT(testutil::max_abs_diff(a.entries(), b.entries()), 1e-12);
  }
}

TEST(CrossoverSchemaWalsh, WorkedExample) {
  SchemaVector<Exact> shat = to_walsh(worked_selection_vector());
  auto chi = CrossoverDistribution<Exact>::one_point(5, rat(1, 2));
  SchemaVector<Exact> yhat = crossover_schema_walsh(shat, chi);
  EXPECT_EQ(yhat[0], rat(20, 40));
  EXPECT_EQ(yhat[1], rat(-4, 40));
  EXPECT_EQ(yhat[2], rat(10, 40));
  EXPECT_EQ(yhat[3], rat(1, 40));
}

TEST(CrossoverSchemaWalsh, MassEntryAndCloning) {
  RngStream rng(34);
  Genome u = testutil::random_nonzero_mask(rng, 6);
  SchemaVector<Exact> shat =
      to_walsh(testutil::random_schema_vector<Exact>(rng, u));
  auto chi = testutil::crossover_family<Exact>(0, 6, rng);
  EXPECT_EQ(crossover_schema_walsh(shat, chi)[0], Exact::pow2_half(-popcount(u)));
  auto clone = CrossoverDistribution<Exact>::custom(6, {{0, Exact(1)}});
  EXPECT_EQ(crossover_schema_walsh(shat, clone).entries(), shat.entries());
}

TEST(CrossoverSchema, WorkedExample) {
  auto chi = CrossoverDistribution<Exact>::one_point(5, rat(1, 2));
  SchemaVector<Exact> y = crossover_schema(worked_selection_vector(), chi);
  EXPECT_EQ(y[0], rat(27, 80));
  EXPECT_EQ(y[1], rat(33, 80));
  EXPECT_EQ(y[2], rat(5, 80));
  EXPECT_EQ(y[3], rat(15, 80));
}

TEST(CrossoverSchema, InvariantFamilies) {
  RngStream rng(35);
  // Order-1 families cannot be split by any mask.
  Genome u1(0b00100, 5);
  SchemaVector<Exact> s1 = testutil::random_schema_vector<Exact>(rng, u1);
  for (int kind = 0; kind < 4; ++kind) {
    auto chi = testutil::crossover_family<Exact>(kind, 5, rng);
    EXPECT_EQ(crossover_schema(s1, chi).entries(), s1.entries());
  }
  // The all-ones mask clones with swapped roles.
  Genome u = testutil::random_nonzero_mask(rng, 5);
  SchemaVector<Exact> s = testutil::random_schema_vector<Exact>(rng, u);
  auto swap = CrossoverDistribution<Exact>::custom(5, {{31, Exact(1)}});
  EXPECT_EQ(crossover_schema(s, swap).entries(), s.entries());
}

TEST(CrossoverSchemaProperty, WalshAndStandardRoutesAgree) {
  RngStream rng(36);
  for (int trial = 0; trial < 60; ++trial) {
    int len = 1 + static_cast<int>(rng.next_below(8));
    Genome u = testutil::random_genome(rng, len);
    SchemaVector<Exact> s = testutil::random_schema_vector<Exact>(rng, u);
    auto chi = testutil::crossover_family<Exact>(trial, len, rng);
    SchemaVector<Exact> standard_route = crossover_schema(s, chi);
    SchemaVector<Exact> walsh_route =
        from_walsh(crossover_schema_walsh(to_walsh(s), chi));
    EXPECT_EQ(standard_route.entries(), walsh_route.entries());
  }
}

// Projection commutes with crossover: the schema averages of the crossed
// population equal the schema crossover of the schema averages.
TEST(CrossoverSchemaProperty, CommutesWithProjection) {
  RngStream rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    int len = 1 + static_cast<int>(rng.next_below(8));
    PopulationVector<Exact> x = testutil::random_population_vector<Exact>(rng, len);
    Genome u = testutil::random_genome(rng, len);
    auto chi = testutil::crossover_family<Exact>(trial, len, rng);
    SchemaVector<Exact> projected = schema_averages(crossover_full(x, chi), u);
    SchemaVector<Exact> in_family = crossover_schema(schema_averages(x, u), chi);
    EXPECT_EQ(projected.entries(), in_family.entries());
  }
}

TEST(Retention, WorkedExampleAndClosedForm) {
  auto chi = CrossoverDistribution<Exact>::one_point(5, rat(1, 2));
  EXPECT_EQ(retention_probability(Genome(0b01010, 5), chi), rat(3, 4));
  // Order-1 schemata are always retained.
  RngStream rng(38);
  for (int kind = 0; kind < 4; ++kind)
    EXPECT_EQ(retention_probability(Genome(0b00010, 5),
                                    testutil::crossover_family<Exact>(kind, 5, rng)),
              Exact(1));
  // For one-point crossover the mask enumeration matches the closed form
  // 1 - c * L(u) / (len - 1).
  for (int trial = 0; trial < 40; ++trial) {
    int len = 2 + static_cast<int>(rng.next_below(9));
    Genome u = testutil::random_nonzero_mask(rng, len);
    Exact c = rat(static_cast<long long>(rng.next_below(5)), 4);
    auto one = CrossoverDistribution<Exact>::one_point(len, c);
    Exact closed = Exact(1) - c * rat(defining_length(u), len - 1);
    EXPECT_EQ(retention_probability(u, one), closed);
  }
}

TEST(HollandCrossoverBound, ExactDominatesBound) {
  RngStream rng(39);
  for (int trial = 0; trial < 40; ++trial) {
    int len = 2 + static_cast<int>(rng.next_below(7));
    Genome u = testutil::random_genome(rng, len);
    SchemaVector<Exact> s = testutil::random_schema_vector<Exact>(rng, u);
    auto chi = testutil::crossover_family<Exact>(trial, len, rng);
    SchemaVector<Exact> y = crossover_schema(s, chi);
    std::vector<Exact> bound = holland_crossover_bound(s, chi);
    for (std::uint64_t k = 0; k < y.size(); ++k) EXPECT_GE(y[k], bound[k]);
  }
}

TEST(LinkageEquilibrium, ProductDistributions) {
  RngStream rng(40);
  for (int trial = 0; trial < 10; ++trial) {
    int len = 1 + static_cast<int>(rng.next_below(6));
    PopulationVector<Exact> x = testutil::product_population<Exact>(rng, len);
    for (int probe = 0; probe < 10; ++probe)
      EXPECT_TRUE(is_linkage_equilibrium(x, testutil::random_genome(rng, len)));
  }
}

TEST(LinkageEquilibrium, CorrelatedCounterexample) {
  PopulationVector<Exact> x(2, {rat(1, 2), Exact(0), Exact(0), rat(1, 2)});
  EXPECT_FALSE(is_linkage_equilibrium(x, Genome(1, 2)));
  EXPECT_TRUE(is_linkage_equilibrium(x, Genome(0, 2)));
  SchemaVector<Exact> s = schema_averages(x, all_ones(2));
  EXPECT_FALSE(is_linkage_equilibrium(s, Genome(1, 2)));
  EXPECT_TRUE(is_linkage_equilibrium(s, Genome(0, 2)));
}

// A population independent across the blocks of one split is fixed by any
// crossover whose masks respect that split, even when correlated inside.
TEST(LinkageEquilibrium, SingleMaskFixedPoint) {
  RngStream rng(41);
  const int len = 6;
  const std::uint64_t split = 0b001011;
  // Outer product of two arbitrary block distributions.
  Genome m(split, len);
  Genome mc = complement(m);
  std::vector<Exact> block_a, block_b;
  {
    SchemaVector<Exact> a = testutil::random_schema_vector<Exact>(rng, m);
    SchemaVector<Exact> b = testutil::random_schema_vector<Exact>(rng, mc);
    block_a = a.entries();
    block_b = b.entries();
  }
  std::vector<Exact> e(domain_size(len));
  for (std::uint64_t j = 0; j < e.size(); ++j)
    e[j] = block_a[pack(Genome(j, len) & m, m)] *
           block_b[pack(Genome(j, len) & mc, mc)];
  PopulationVector<Exact> x(len, std::move(e));

  EXPECT_TRUE(is_linkage_equilibrium(x, m));
  auto chi = CrossoverDistribution<Exact>::custom(
      len, {{0, rat(1, 4)}, {split, rat(1, 2)}, {complement(m).bits, rat(1, 4)}});
  EXPECT_EQ(crossover_full(x, chi).entries(), x.entries());
}

}  // namespace
}  // namespace schemax
