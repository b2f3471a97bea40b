#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "schemax/bitspace.hpp"
#include "schemax/crossover.hpp"
#include "schemax/engine.hpp"
#include "schemax/mutation.hpp"
#include "schemax/popmodel.hpp"
#include "schemax/scalar.hpp"

namespace schemax {

// ---------------------------------------------------------------------------
// Genome and pattern strings
// ---------------------------------------------------------------------------

/// Parses a fixed-width binary string, most-significant position first.
inline Genome parse_genome(std::string_view text) {
  if (text.empty() || text.size() > kMaxLen)
    throw std::invalid_argument("genome string must have 1..62 characters");
  std::uint64_t bits = 0;
  for (char c : text) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("genome string must be binary: '" +
                                  std::string(text) + "'");
    bits = (bits << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return Genome(bits, static_cast<int>(text.size()));
}

inline std::string format_genome(const Genome& g) {
  std::string s(static_cast<std::size_t>(g.len), '0');
  for (int i = 0; i < g.len; ++i)
    if (g.bit(i)) s[static_cast<std::size_t>(g.len - 1 - i)] = '1';
  return s;
}

/// A schema written as a coset: fixed-position mask plus the fixed values
/// (values only on fixed positions).
struct SchemaPattern {
  Genome fixed_mask;
  Genome fixed_values;
};

/// Parses a pattern string such as "10*01*": '*' marks a free position.
inline SchemaPattern parse_pattern(std::string_view text) {
  if (text.empty() || text.size() > kMaxLen)
    throw std::invalid_argument("pattern string must have 1..62 characters");
  std::uint64_t mask = 0, values = 0;
  for (char c : text) {
    mask <<= 1;
    values <<= 1;
    if (c == '0' || c == '1') {
      mask |= 1;
      values |= static_cast<std::uint64_t>(c == '1');
    } else if (c != '*') {
      throw std::invalid_argument("pattern string must use 0, 1, or *: '" +
                                  std::string(text) + "'");
    }
  }
  int len = static_cast<int>(text.size());
  return SchemaPattern{Genome(mask, len), Genome(values, len)};
}

/// Renders the schema with fixed positions u and fixed values v, '*' on the
/// free positions, most-significant position first.
inline std::string format_pattern(const Genome& u, const Genome& v) {
  detail::check_same_len(u, v, "format_pattern");
  std::string s(static_cast<std::size_t>(u.len), '*');
  for (int i = 0; i < u.len; ++i)
    if (u.bit(i)) s[static_cast<std::size_t>(u.len - 1 - i)] = v.bit(i) ? '1' : '0';
  return s;
}

// ---------------------------------------------------------------------------
// Scalar parsing: "p/q", integer, or plain decimal
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

inline BigInt parse_bigint(std::string_view s, const char* what) {
  bool neg = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty())
    throw std::invalid_argument(std::string(what) + ": missing digits");
  BigInt v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw std::invalid_argument(std::string(what) + ": bad digit '" +
                                  std::string(1, c) + "'");
    v = v * 10 + (c - '0');
  }
  return neg ? BigInt(-v) : v;
}

inline Exact parse_exact(std::string_view s) {
  s = trim(s);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_bigint(s.substr(0, slash), "rational");
    BigInt den = parse_bigint(s.substr(slash + 1), "rational");
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    return Exact(BigRational(num, den));
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view frac = s.substr(dot + 1);
    std::string digitsetc = std::string(s.substr(0, dot)) + std::string(frac);
    BigInt num = parse_bigint(digitsetc.empty() ? "0" : digitsetc, "decimal");
    BigInt den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    return Exact(BigRational(num, den));
  }
  return Exact(BigRational(parse_bigint(s, "number")));
}

inline double parse_double(std::string_view s) {
  s = trim(s);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    double num = parse_double(s.substr(0, slash));
    double den = parse_double(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    return num / den;
  }
  std::string owned(s);
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(owned, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + owned + "'");
  }
  if (used != owned.size())
    throw std::invalid_argument("not a number: '" + owned + "'");
  return v;
}

}  // namespace detail

template <class S>
S parse_scalar(std::string_view text) {
  if constexpr (scalar_traits<S>::is_exact)
    return detail::parse_exact(text);
  else
    return detail::parse_double(text);
}

// ---------------------------------------------------------------------------
// Population files: one "<binary-string> [count]" record per line,
// '#' starts a comment.
// ---------------------------------------------------------------------------

inline FinitePopulation parse_population(std::istream& in, int expected_len = 0) {
  std::vector<FinitePopulation::Member> members;
  std::string line;
  int len = expected_len;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    std::string genome_text, count_text, extra;
    if (!(row >> genome_text)) continue;
    Genome g = parse_genome(genome_text);
    if (len == 0) len = g.len;
    if (g.len != len)
      throw std::invalid_argument("population line " + std::to_string(lineno) +
                                  ": genome length differs from " +
                                  std::to_string(len));
    std::uint64_t count = 1;
    if (row >> count_text) {
      try {
        std::size_t used = 0;
        long long c = std::stoll(count_text, &used);
        if (used != count_text.size() || c <= 0) throw std::invalid_argument("");
        count = static_cast<std::uint64_t>(c);
      } catch (const std::exception&) {
        throw std::invalid_argument("population line " + std::to_string(lineno) +
                                    ": bad count '" + count_text + "'");
      }
    }
    if (row >> extra)
      throw std::invalid_argument("population line " + std::to_string(lineno) +
                                  ": trailing content '" + extra + "'");
    members.emplace_back(g, count);
  }
  if (members.empty())
    throw std::invalid_argument("population file has no records");
  return FinitePopulation(len, std::move(members));
}

inline FinitePopulation load_population(const std::string& path, int expected_len = 0) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open population file: " + path);
  return parse_population(in, expected_len);
}

// ---------------------------------------------------------------------------
// Fitness: "onemax", "affine:<a>,<b>", or a JSON table file mapping
// binary-string keys to numbers or "p/q" strings.
// ---------------------------------------------------------------------------

template <class S>
FitnessFunction<S> parse_fitness_table(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("fitness table must be a JSON object");
  std::map<std::uint64_t, S> table;
  for (const auto& [key, value] : j.items()) {
    Genome g = parse_genome(key);
    S v;
    if (value.is_string()) {
      v = parse_scalar<S>(value.template get<std::string>());
    } else if (value.is_number_integer()) {
      v = scalar_traits<S>::from_int(value.template get<long long>());
    } else if (value.is_number_float()) {
      if constexpr (scalar_traits<S>::is_exact)
        throw std::invalid_argument(
            "fitness table: use integers or \"p/q\" strings in rational mode");
      else
        v = value.template get<double>();
    } else {
      throw std::invalid_argument("fitness table: value for '" + key +
                                  "' must be a number or \"p/q\" string");
    }
    table[g.bits] = v;
  }
  return FitnessFunction<S>::table(std::move(table));
}

template <class S>
FitnessFunction<S> load_fitness_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open fitness table: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("fitness table " + path + ": " + e.what());
  }
  return parse_fitness_table<S>(j);
}

template <class S>
FitnessFunction<S> parse_fitness_spec(const std::string& spec) {
  if (spec == "onemax") return FitnessFunction<S>::onemax();
  if (spec.rfind("affine:", 0) == 0) {
    std::string args = spec.substr(7);
    auto comma = args.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("fitness spec: expected affine:<a>,<b>");
    return FitnessFunction<S>::affine_popcount(
        parse_scalar<S>(args.substr(0, comma)),
        parse_scalar<S>(args.substr(comma + 1)));
  }
  std::string path = spec.rfind("file:", 0) == 0 ? spec.substr(5) : spec;
  return load_fitness_table<S>(path);
}

// ---------------------------------------------------------------------------
// Crossover spec strings: 1pt:<c>, 2pt:<c>, uniform:<c>, file:<path>
// ---------------------------------------------------------------------------

template <class S>
CrossoverDistribution<S> parse_crossover_spec(const std::string& spec, int len) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument(
        "crossover spec must be 1pt:<c>, 2pt:<c>, uniform:<c>, or file:<path>");
  std::string head = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (head == "1pt")
    return CrossoverDistribution<S>::one_point(len, parse_scalar<S>(arg));
  if (head == "2pt")
    return CrossoverDistribution<S>::two_point(len, parse_scalar<S>(arg));
  if (head == "uniform")
    return CrossoverDistribution<S>::uniform(len, parse_scalar<S>(arg));
  if (head == "file") {
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("cannot open crossover file: " + arg);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("crossover file " + arg + ": " + e.what());
    }
    if (!j.is_object())
      throw std::invalid_argument("crossover file must be a JSON object");
    std::map<std::uint64_t, S> masses;
    for (const auto& [key, value] : j.items()) {
      Genome m = parse_genome(key);
      if (m.len != len)
        throw std::invalid_argument("crossover mask '" + key +
                                    "' does not match the string length");
      S w;
      if (value.is_string()) {
        w = parse_scalar<S>(value.template get<std::string>());
      } else if (value.is_number_integer()) {
        w = scalar_traits<S>::from_int(value.template get<long long>());
      } else if (value.is_number_float()) {
        if constexpr (scalar_traits<S>::is_exact)
          throw std::invalid_argument(
              "crossover file: use integers or \"p/q\" strings in rational mode");
        else
          w = value.template get<double>();
      } else {
        throw std::invalid_argument("crossover file: probability for '" + key +
                                    "' must be a number or \"p/q\" string");
      }
      masses[m.bits] = w;
    }
    return CrossoverDistribution<S>::custom(len, std::move(masses));
  }
  throw std::invalid_argument("unknown crossover spec '" + spec + "'");
}

// ---------------------------------------------------------------------------
// Mutation spec strings: p=<rate> or p=<r0>,<r1>,...
// ---------------------------------------------------------------------------

template <class S>
MutationRates<S> parse_mutation_spec(const std::string& spec, int len) {
  if (spec.rfind("p=", 0) != 0)
    throw std::invalid_argument("mutation spec must be p=<rate> or p=<r0>,<r1>,...");
  std::string args = spec.substr(2);
  std::vector<S> rates;
  std::size_t start = 0;
  while (true) {
    auto comma = args.find(',', start);
    std::string piece = args.substr(start, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - start);
    rates.push_back(parse_scalar<S>(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (rates.size() == 1) return MutationRates<S>::uniform(len, rates[0]);
  if (rates.size() != static_cast<std::size_t>(len))
    throw std::invalid_argument("mutation spec: expected 1 or " +
                                std::to_string(len) + " rates, got " +
                                std::to_string(rates.size()));
  return MutationRates<S>(len, std::move(rates));
}

// ---------------------------------------------------------------------------
// Experiment config (JSON)
// ---------------------------------------------------------------------------

enum class ArithMode { rational, fp };

inline ArithMode parse_mode(const std::string& s) {
  if (s == "rational") return ArithMode::rational;
  if (s == "float") return ArithMode::fp;
  throw std::invalid_argument("mode must be \"rational\" or \"float\"");
}

struct ExperimentConfig {
  int ell = 0;
  std::string population_file;
  std::string fitness = "onemax";
  std::string crossover = "1pt:0";
  std::string mutation = "p=0";
  std::string u;
  ArithMode mode = ArithMode::rational;
  std::uint64_t seed = 0;
  int generations = 1;
  int replicates = 1;
};

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    cfg.ell = j.at("ell").get<int>();
    cfg.population_file = j.at("population_file").get<std::string>();
    cfg.u = j.at("u").get<std::string>();
    if (j.contains("fitness")) cfg.fitness = j["fitness"].get<std::string>();
    if (j.contains("crossover")) cfg.crossover = j["crossover"].get<std::string>();
    if (j.contains("mutation")) cfg.mutation = j["mutation"].get<std::string>();
    if (j.contains("mode")) cfg.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("generations")) cfg.generations = j["generations"].get<int>();
    if (j.contains("replicates")) cfg.replicates = j["replicates"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  if (cfg.ell < 1 || cfg.ell > kMaxLen)
    throw std::invalid_argument("config: ell must be in [1, 62]");
  if (cfg.generations < 0 || cfg.replicates < 1)
    throw std::invalid_argument("config: bad generations/replicates");
  return cfg;
}

/// Joins a possibly relative path onto the directory of the config file.
inline std::string resolve_relative(const std::string& base_file,
                                    const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  auto slash = base_file.find_last_of('/');
  if (slash == std::string::npos) return path;
  return base_file.substr(0, slash + 1) + path;
}

/// Everything a command needs, typed for one arithmetic mode.
template <class S>
struct Instance {
  FinitePopulation population;
  Genome u;
  GaConfig<S> cfg;
};

template <class S>
Instance<S> load_instance(const ExperimentConfig& config,
                          const std::string& config_path) {
  FinitePopulation X =
      load_population(resolve_relative(config_path, config.population_file),
                      config.ell);
  Genome u = parse_genome(config.u);
  if (u.len != config.ell)
    throw std::invalid_argument("config: u mask length differs from ell");
  std::string fitness_spec = config.fitness;
  if (fitness_spec != "onemax" && fitness_spec.rfind("affine:", 0) != 0) {
    std::string path = fitness_spec.rfind("file:", 0) == 0 ? fitness_spec.substr(5)
                                                           : fitness_spec;
    fitness_spec = "file:" + resolve_relative(config_path, path);
  }
  std::string crossover_spec = config.crossover;
  if (crossover_spec.rfind("file:", 0) == 0)
    crossover_spec = "file:" + resolve_relative(config_path, crossover_spec.substr(5));
  GaConfig<S> cfg(config.ell, parse_fitness_spec<S>(fitness_spec),
                  parse_crossover_spec<S>(crossover_spec, config.ell),
                  parse_mutation_spec<S>(config.mutation, config.ell));
  return Instance<S>{std::move(X), u, std::move(cfg)};
}

}  // namespace schemax
