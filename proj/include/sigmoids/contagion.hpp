#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sigmoids/time_series.hpp"

namespace sigmoids {

struct PopulationConfig {
  double fraction = 1.0;    // share of the total population
  double immunity = 0.0;    // per-agent probability of immunity
  int incubation_days = 1;  // days between infection and the infectious day
};

enum class CaseCounting {
  Infection,  // cumulative infections (seeds count on day 0)
  Onset,      // cumulative infectious onsets
};

/// Well-mixed contagion over one or more sub-populations. Each infectious agent
/// is infectious for exactly one day, on which it makes Poisson(contact_rate)
/// contacts drawn uniformly from the whole population. A contacted agent that
/// is neither immune nor previously infected becomes infected and turns
/// infectious `incubation_days` later.
struct ContagionConfig {
  std::vector<PopulationConfig> populations{PopulationConfig{}};
  std::int64_t total_agents = 10000;
  std::int64_t initial_infected = 1;
  double contact_rate = 1.5;
  int horizon_days = 60;
  std::uint64_t seed = 0;
  CaseCounting counting = CaseCounting::Infection;
  // Seed only this population; otherwise seeds are drawn from everyone.
  std::optional<std::size_t> seed_population;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  // Agents per population; rounding remainder goes to the last one.
  [[nodiscard]] std::vector<std::int64_t> population_sizes() const;
};

// Cumulative cases for days 0..horizon_days. Bit-reproducible for a fixed seed.
[[nodiscard]] TimeSeries run_abm(const ContagionConfig& cfg);

// Mean of `runs` independent ABM runs with seeds cfg.seed ^ run.
[[nodiscard]] TimeSeries run_abm_mean(const ContagionConfig& cfg, int runs);

// Expected-value recursion of the same process: the chance that a susceptible
// escapes all I infectious agents on a day is exp(-contact_rate * I / N).
[[nodiscard]] TimeSeries run_meanfield(const ContagionConfig& cfg);

enum class NoiseKind { Additive, Multiplicative };

[[nodiscard]] std::string_view to_string(NoiseKind kind);
[[nodiscard]] NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Additive;
  double sigma = 0.0;
};

// y + eps or y (1 + eps) with eps ~ N(0, sigma^2) per sample.
[[nodiscard]] TimeSeries add_noise(const TimeSeries& series, const NoiseSpec& noise,
                                   std::uint64_t seed);

}  // namespace sigmoids
