#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "schemax/engine.hpp"
#include "schemax/scalar.hpp"

namespace schemax {

/// A small end-to-end instance with exact expected values frozen for every
/// pipeline stage: five 5-bit genomes, table fitness, one-point crossover at
/// rate 1/2, uniform mutation at rate 1/8, family mask 01010. The `example`
/// CLI subcommand replays it and verifies each stage; the test suite pins
/// the same numbers.
struct ReferenceCase {
  FinitePopulation population;
  Genome u;
  GaConfig<Exact> cfg;

  struct Stage {
    std::string label;
    // Expected packed entries, one per schema in the family.
    std::vector<BigRational> expected;
  };
  // In pipeline order: initial averages, selection, selection (Walsh),
  // crossover (Walsh), crossover, schema mutation distribution,
  // mutation (Walsh), mutation.
  std::array<Stage, 8> stages;
};

inline ReferenceCase reference_case() {
  const int len = 5;
  FinitePopulation X = FinitePopulation::of(len, {6, 7, 10, 13, 21});
  std::map<std::uint64_t, Exact> table{
      {6, Exact(5)}, {7, Exact(3)}, {10, Exact(4)}, {13, Exact(1)}, {21, Exact(7)}};
  GaConfig<Exact> cfg(len, FitnessFunction<Exact>::table(std::move(table)),
                      CrossoverDistribution<Exact>::one_point(len, Exact::ratio(1, 2)),
                      MutationRates<Exact>::uniform(len, Exact::ratio(1, 8)));
  auto frac = [](long long n, long long d) { return BigRational(n, d); };
  ReferenceCase rc{
      std::move(X), Genome(10, len), std::move(cfg),
      {ReferenceCase::Stage{"initial schema averages",
                            {frac(1, 5), frac(2, 5), frac(1, 5), frac(1, 5)}},
       ReferenceCase::Stage{"after selection",
                            {frac(7, 20), frac(8, 20), frac(1, 20), frac(4, 20)}},
       ReferenceCase::Stage{"after selection (walsh)",
                            {frac(10, 20), frac(-2, 20), frac(5, 20), frac(1, 20)}},
       ReferenceCase::Stage{"after crossover (walsh)",
                            {frac(20, 40), frac(-4, 40), frac(10, 40), frac(1, 40)}},
       ReferenceCase::Stage{"after crossover",
                            {frac(27, 80), frac(33, 80), frac(5, 80), frac(15, 80)}},
       ReferenceCase::Stage{"schema mutation distribution",
                            {frac(49, 64), frac(7, 64), frac(7, 64), frac(1, 64)}},
       ReferenceCase::Stage{"after mutation (walsh)",
                            {frac(1, 2), frac(-3, 40), frac(3, 16), frac(9, 640)}},
       ReferenceCase::Stage{"after mutation",
                            {frac(401, 1280), frac(479, 1280), frac(143, 1280),
                             frac(257, 1280)}}}};
  return rc;
}

/// Computes the eight stage vectors of the reference case with the library
/// pipeline, in the same order as ReferenceCase::stages.
inline std::array<std::vector<Exact>, 8> reference_stage_values(const ReferenceCase& rc) {
  SchemaVector<Exact> initial = schema_averages<Exact>(rc.population, rc.u);
  SchemaVector<Exact> sel =
      schema_selection_averages(rc.population, rc.cfg.fitness, rc.u);
  SchemaVector<Exact> sel_hat = to_walsh(sel);
  SchemaVector<Exact> cross_hat = crossover_schema_walsh(sel_hat, rc.cfg.crossover);
  SchemaVector<Exact> cross = from_walsh(cross_hat);
  SchemaVector<Exact> mu = mu_schema(rc.u, rc.cfg.mutation);
  SchemaVector<Exact> mut_hat = mutate_schema_walsh(cross_hat, rc.cfg.mutation);
  SchemaVector<Exact> mut = from_walsh(mut_hat);
  return {initial.entries(),  sel.entries(), sel_hat.entries(),
          cross_hat.entries(), cross.entries(), mu.entries(),
          mut_hat.entries(),  mut.entries()};
}

}  // namespace schemax
