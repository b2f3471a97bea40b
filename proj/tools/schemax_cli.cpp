// Command-line front end: ingest populations and fitness tables, run the
// exact one-generation schema pipeline, validate it against the dense
// reference model, and sample finite populations against the exact values.
//
// Exit codes: 0 ok, 1 validation mismatch, 2 usage/parse error,
// 3 numerical contract violation.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "schemax/schemax.hpp"

namespace {

using namespace schemax;

enum class OutFormat { csv, json };

struct OutputOptions {
  std::string path;  // empty = stdout
  OutFormat format = OutFormat::csv;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  void write_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      os << (c ? "," : "") << columns[c];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << "\n";
    }
  }

  void write_json(std::ostream& os) const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json obj;
      for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
      arr.push_back(std::move(obj));
    }
    os << arr.dump(2) << "\n";
  }
};

int emit(const Table& table, const OutputOptions& out) {
  std::ofstream file;
  if (!out.path.empty()) {
    file.open(out.path);
    if (!file) throw std::invalid_argument("cannot open output file: " + out.path);
  }
  std::ostream& os = out.path.empty() ? std::cout : file;
  if (out.format == OutFormat::csv)
    table.write_csv(os);
  else
    table.write_json(os);
  return 0;
}

std::string schema_label(const Genome& u, std::uint64_t packed) {
  return format_pattern(u, unpack(packed, u));
}

// ---------------------------------------------------------------------------
// example: replay the stored reference instance and verify every stage
// ---------------------------------------------------------------------------

int run_example(const OutputOptions& out) {
  std::ofstream file;
  if (!out.path.empty()) {
    file.open(out.path);
    if (!file) throw std::invalid_argument("cannot open output file: " + out.path);
  }
  std::ostream& os = out.path.empty() ? std::cout : file;

  ReferenceCase rc = reference_case();
  os << "population:";
  for (const auto& [g, count] : rc.population.members()) {
    os << " " << format_genome(g);
    if (count != 1) os << "x" << count;
  }
  os << "  (r = " << rc.population.size() << ")\n";
  os << "fitness: 00110=5 00111=3 01010=4 01101=1 10101=7\n";
  os << "crossover: one-point, c = 1/2\n";
  os << "mutation: uniform, p = 1/8\n";
  os << "schema family over mask " << format_genome(rc.u) << ":";
  for (std::uint64_t kp = 0; kp < (std::uint64_t{1} << popcount(rc.u)); ++kp)
    os << " " << schema_label(rc.u, kp);
  os << "\n\n";

  auto values = reference_stage_values(rc);
  bool ok = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& stage = rc.stages[i];
    os << stage.label << ":";
    for (const Exact& v : values[i]) os << " " << v.str();
    os << "\n";
    for (std::size_t k = 0; k < values[i].size(); ++k) {
      if (values[i][k].rational_value() != stage.expected[k]) {
        ok = false;
        os << "  MISMATCH at entry " << k << ": expected "
           << stage.expected[k].str() << "\n";
      }
    }
  }
  os << "\n" << (ok ? "all stages match the stored reference values"
                    : "reference check FAILED") << "\n";
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// schema-avg
// ---------------------------------------------------------------------------

template <class S>
int run_schema_avg(const std::string& pop_file, const std::string& u_text,
                   const std::string& fitness_spec, const OutputOptions& out) {
  FinitePopulation X = load_population(pop_file);
  Genome u = parse_genome(u_text);
  if (u.len != X.len())
    throw std::invalid_argument("mask length differs from the population's");
  SchemaVector<S> s =
      fitness_spec.empty()
          ? schema_averages<S>(X, u)
          : schema_selection_averages(X, parse_fitness_spec<S>(fitness_spec), u);
  Table t;
  t.columns = {"schema", "value"};
  for (std::uint64_t kp = 0; kp < s.size(); ++kp)
    t.add_row({schema_label(u, kp), scalar_traits<S>::display(s[kp])});
  return emit(t, out);
}

// ---------------------------------------------------------------------------
// step: one-generation pipeline plus the classical lower bounds
// ---------------------------------------------------------------------------

template <class S>
int run_step(const Instance<S>& inst, const OutputOptions& out) {
  SchemaVector<S> sel =
      schema_selection_averages(inst.population, inst.cfg.fitness, inst.u);
  SchemaVector<S> z = from_walsh(mutate_schema_walsh(
      crossover_schema_walsh(to_walsh(sel), inst.cfg.crossover),
      inst.cfg.mutation));
  bool bounded = inst.cfg.crossover.kind() == CrossoverKind::one_point &&
                 inst.cfg.mutation.is_uniform();
  std::vector<S> bound;
  if (bounded) bound = holland_bound(sel, inst.cfg);
  Table t;
  t.columns = {"schema", "value", "bound", "slack"};
  for (std::uint64_t kp = 0; kp < z.size(); ++kp) {
    std::string b, slack;
    if (bounded) {
      b = scalar_traits<S>::display(bound[kp]);
      slack = scalar_traits<S>::display(z[kp] - bound[kp]);
    }
    t.add_row({schema_label(inst.u, kp), scalar_traits<S>::display(z[kp]), b, slack});
  }
  return emit(t, out);
}

// ---------------------------------------------------------------------------
// trajectory
// ---------------------------------------------------------------------------

template <class S>
int run_trajectory(const Instance<S>& inst, int generations,
                   const OutputOptions& out) {
  auto traj = trajectory(inst.population, inst.u, inst.cfg, generations);
  Table t;
  t.columns = {"generation", "schema", "value"};
  for (std::size_t g = 0; g < traj.size(); ++g)
    for (std::uint64_t kp = 0; kp < traj[g].size(); ++kp)
      t.add_row({std::to_string(g), schema_label(inst.u, kp),
                 scalar_traits<S>::display(traj[g][kp])});
  return emit(t, out);
}

// ---------------------------------------------------------------------------
// validate: randomized pipeline-vs-dense-reference and bound checks
// ---------------------------------------------------------------------------

template <class S>
bool close_enough(const S& a, const S& b) {
  if constexpr (scalar_traits<S>::is_exact)
    return a == b;
  else
    return std::abs(a - b) <= 1e-9;
}

template <class S>
int run_validate(int ell, int trials, std::uint64_t seed,
                 const OutputOptions& out) {
  if (ell < 2 || ell > 12)
    throw std::invalid_argument(
        "validate: ell must be in [2, 12] (the dense reference is quadratic)");
  RngStream rng(seed);
  int oracle_ok = 0, bound_ok = 0, bound_total = 0;
  for (int trial = 0; trial < trials; ++trial) {
    // Random population of 2..13 distinct draws with counts 1..3.
    std::vector<FinitePopulation::Member> members;
    int m = 2 + static_cast<int>(rng.next_below(12));
    for (int i = 0; i < m; ++i)
      members.emplace_back(Genome(rng.next_below(domain_size(ell)), ell),
                           1 + rng.next_below(3));
    FinitePopulation X(ell, std::move(members));
    std::map<std::uint64_t, S> table;
    for (const auto& [g, count] : X.members())
      table[g.bits] = scalar_traits<S>::from_int(1 + static_cast<long long>(rng.next_below(9)));
    FitnessFunction<S> fitness = FitnessFunction<S>::table(std::move(table));

    Genome u(1 + rng.next_below(domain_size(ell) - 1), ell);
    S c = scalar_traits<S>::ratio(static_cast<long long>(rng.next_below(3)), 2);
    int family = trial % 3;
    CrossoverDistribution<S> chi =
        family == 0   ? CrossoverDistribution<S>::one_point(ell, c)
        : family == 1 ? CrossoverDistribution<S>::two_point(ell, c)
                      : CrossoverDistribution<S>::uniform(ell, c);
    std::vector<S> p;
    bool uniform_p = family == 0;
    S p0 = scalar_traits<S>::ratio(static_cast<long long>(rng.next_below(9)), 16);
    for (int i = 0; i < ell; ++i)
      p.push_back(uniform_p
                      ? p0
                      : scalar_traits<S>::ratio(static_cast<long long>(rng.next_below(9)), 16));
    GaConfig<S> cfg(ell, std::move(fitness), std::move(chi),
                    MutationRates<S>(ell, std::move(p)));

    SchemaVector<S> fast = schema_pipeline(X, u, cfg);
    SchemaVector<S> slow = oracle_schema(X, u, cfg);
    bool match = true;
    for (std::uint64_t k = 0; k < fast.size(); ++k)
      match = match && close_enough(fast[k], slow[k]);
    oracle_ok += match;

    if (cfg.crossover.kind() == CrossoverKind::one_point &&
        cfg.mutation.is_uniform()) {
      ++bound_total;
      SchemaVector<S> sel = schema_selection_averages(X, cfg.fitness, u);
      std::vector<S> bound = holland_bound(sel, cfg);
      bool holds = true;
      for (std::uint64_t k = 0; k < fast.size(); ++k) {
        if constexpr (scalar_traits<S>::is_exact)
          holds = holds && fast[k] >= bound[k];
        else
          holds = holds && fast[k] - bound[k] >= -1e-12;
      }
      bound_ok += holds;
    }
  }

  std::ofstream file;
  if (!out.path.empty()) file.open(out.path);
  std::ostream& os = out.path.empty() ? std::cout : file;
  os << oracle_ok << "/" << trials << " oracle matches\n";
  os << bound_ok << "/" << bound_total << " bounds hold\n";
  return (oracle_ok == trials && bound_ok == bound_total) ? 0 : 1;
}

// ---------------------------------------------------------------------------
// montecarlo: seeded finite-population replicates against the exact values
// ---------------------------------------------------------------------------

template <class S>
int run_montecarlo(const Instance<S>& inst, int replicates, std::uint64_t seed,
                   const OutputOptions& out) {
  SchemaVector<S> z = schema_pipeline(inst.population, inst.u, inst.cfg);
  double r = static_cast<double>(inst.population.size());
  Table t;
  t.columns = {"replicate", "schema", "empirical", "exact", "abs_error", "sigma"};
  for (int rep = 0; rep < replicates; ++rep) {
    RngStream rng(seed, static_cast<std::uint64_t>(rep));
    FinitePopulation next = finite_ga_step(inst.population, inst.cfg, rng);
    SchemaVector<double> emp = schema_averages<double>(next, inst.u);
    for (std::uint64_t kp = 0; kp < z.size(); ++kp) {
      double exact = scalar_traits<S>::to_double(z[kp]);
      double sigma = std::sqrt(exact * (1.0 - exact) / r);
      t.add_row({std::to_string(rep), schema_label(inst.u, kp),
                 scalar_traits<double>::display(emp[kp]),
                 scalar_traits<S>::display(z[kp]),
                 scalar_traits<double>::display(std::abs(emp[kp] - exact)),
                 scalar_traits<double>::display(sigma)});
    }
  }
  return emit(t, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact expected schema averages of a simple genetic algorithm"};
  app.require_subcommand(1);

  OutputOptions out;
  std::string format_text = "csv";
  app.add_option("--out", out.path, "Output file (default: stdout)");
  app.add_option("--format", format_text, "Output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string mode_text;

  auto* cmd_example = app.add_subcommand(
      "example", "Replay the built-in reference instance with exact values");

  auto* cmd_avg = app.add_subcommand(
      "schema-avg", "Schema averages of a population file, optionally after selection");
  std::string avg_pop, avg_u, avg_fitness;
  cmd_avg->add_option("--pop", avg_pop, "Population file")->required();
  cmd_avg->add_option("--u", avg_u, "Fixed-position mask (binary string)")->required();
  cmd_avg->add_option("--fitness", avg_fitness,
                      "onemax | affine:<a>,<b> | file:<path> (selection averages)");
  cmd_avg->add_option("--mode", mode_text, "rational|float");

  auto* cmd_step = app.add_subcommand(
      "step", "Exact schema averages after one generation, with lower bounds");
  std::string step_config;
  cmd_step->add_option("--config", step_config, "Experiment config (JSON)")->required();
  cmd_step->add_option("--mode", mode_text, "rational|float (overrides config)");

  auto* cmd_traj = app.add_subcommand("trajectory",
                                      "Schema averages over several generations");
  std::string traj_config;
  int traj_generations = -1;
  cmd_traj->add_option("--config", traj_config, "Experiment config (JSON)")->required();
  cmd_traj->add_option("--generations", traj_generations,
                       "Generation count (overrides config)");
  cmd_traj->add_option("--mode", mode_text, "rational|float (overrides config)");

  auto* cmd_validate = app.add_subcommand(
      "validate", "Randomized checks of the pipeline against the dense reference");
  int val_ell = 0, val_trials = 0;
  std::uint64_t val_seed = 0;
  cmd_validate->add_option("--ell", val_ell, "String length (2..12)")->required();
  cmd_validate->add_option("--trials", val_trials, "Number of random instances")
      ->required();
  cmd_validate->add_option("--seed", val_seed, "Root seed");
  cmd_validate->add_option("--mode", mode_text, "rational|float");

  auto* cmd_mc = app.add_subcommand(
      "montecarlo", "Finite-population replicates against the exact averages");
  std::string mc_config;
  int mc_replicates = -1;
  std::uint64_t mc_seed = 0;
  bool mc_seed_set = false;
  cmd_mc->add_option("--config", mc_config, "Experiment config (JSON)")->required();
  cmd_mc->add_option("--replicates", mc_replicates, "Replicate count (overrides config)");
  cmd_mc->add_option("--seed", mc_seed, "Root seed (overrides config)")
      ->each([&](const std::string&) { mc_seed_set = true; });
  cmd_mc->add_option("--mode", mode_text, "rational|float (overrides config)");

  // Let --out / --format appear after the subcommand as well.
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  out.format = format_text == "json" ? OutFormat::json : OutFormat::csv;

  auto with_mode = [&](ArithMode mode, auto&& fn) -> int {
    if (mode == ArithMode::rational)
      return fn.template operator()<Exact>();
    return fn.template operator()<double>();
  };
  auto cli_mode = [&](ArithMode fallback) {
    return mode_text.empty() ? fallback : parse_mode(mode_text);
  };

  try {
    if (cmd_example->parsed()) return run_example(out);

    if (cmd_avg->parsed()) {
      return with_mode(cli_mode(ArithMode::rational), [&]<class S>() {
        return run_schema_avg<S>(avg_pop, avg_u, avg_fitness, out);
      });
    }

    if (cmd_step->parsed()) {
      ExperimentConfig config = load_config(step_config);
      return with_mode(cli_mode(config.mode), [&]<class S>() {
        return run_step<S>(load_instance<S>(config, step_config), out);
      });
    }

    if (cmd_traj->parsed()) {
      ExperimentConfig config = load_config(traj_config);
      int generations =
          traj_generations >= 0 ? traj_generations : config.generations;
      return with_mode(cli_mode(config.mode), [&]<class S>() {
        return run_trajectory<S>(load_instance<S>(config, traj_config),
                                 generations, out);
      });
    }

    if (cmd_validate->parsed()) {
      return with_mode(cli_mode(ArithMode::rational), [&]<class S>() {
        return run_validate<S>(val_ell, val_trials, val_seed, out);
      });
    }

    if (cmd_mc->parsed()) {
      ExperimentConfig config = load_config(mc_config);
      int replicates = mc_replicates >= 1 ? mc_replicates : config.replicates;
      std::uint64_t seed = mc_seed_set ? mc_seed : config.seed;
      return with_mode(cli_mode(config.mode), [&]<class S>() {
        return run_montecarlo<S>(load_instance<S>(config, mc_config), replicates,
                                 seed, out);
      });
    }
  } catch (const schemax::numeric_contract_error& e) {
    std::cerr << "numerical contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
