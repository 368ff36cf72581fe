#include "sigmoids/contagion.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace sigmoids {

void ContagionConfig::validate() const {
  if (populations.empty()) throw std::invalid_argument("contagion: populations is empty");
  double total = 0.0;
  for (std::size_t p = 0; p < populations.size(); ++p) {
    const auto& pop = populations[p];
    const std::string where = "contagion: populations[" + std::to_string(p) + "].";
    if (!(pop.fraction > 0.0 && pop.fraction <= 1.0)) {
      throw std::invalid_argument(where + "fraction must be in (0, 1]");
    }
    if (!(pop.immunity >= 0.0 && pop.immunity <= 1.0)) {
      throw std::invalid_argument(where + "immunity must be in [0, 1]");
    }
    if (pop.incubation_days < 1) {
      throw std::invalid_argument(where + "incubation_days must be >= 1");
    }
    total += pop.fraction;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("contagion: population fractions sum to " + std::to_string(total) +
                                ", not 1");
  }
  if (total_agents < 1) throw std::invalid_argument("contagion: total_agents must be positive");
  if (initial_infected < 1) {
    throw std::invalid_argument("contagion: initial_infected must be positive");
  }
  if (initial_infected >= total_agents) {
    throw std::invalid_argument("contagion: initial_infected must be below total_agents");
  }
  if (!(contact_rate >= 0.0) || !std::isfinite(contact_rate)) {
    throw std::invalid_argument("contagion: contact_rate must be finite and non-negative");
  }
  if (horizon_days < 1) throw std::invalid_argument("contagion: horizon_days must be >= 1");
  if (seed_population) {
    if (*seed_population >= populations.size()) {
      throw std::invalid_argument("contagion: seed_population out of range");
    }
    if (initial_infected > population_sizes()[*seed_population]) {
      throw std::invalid_argument("contagion: seed_population smaller than initial_infected");
    }
  }
}

std::vector<std::int64_t> ContagionConfig::population_sizes() const {
  std::vector<std::int64_t> sizes(populations.size());
  std::int64_t assigned = 0;
  for (std::size_t p = 0; p + 1 < populations.size(); ++p) {
    sizes[p] = std::llround(populations[p].fraction * static_cast<double>(total_agents));
    assigned += sizes[p];
  }
  sizes.back() = total_agents - assigned;
  return sizes;
}

namespace {

std::vector<double> day_axis(int horizon) {
  std::vector<double> days(static_cast<std::size_t>(horizon) + 1);
  std::iota(days.begin(), days.end(), 0.0);
  return days;
}

}  // namespace

TimeSeries run_abm(const ContagionConfig& cfg) {
  cfg.validate();
  const auto sizes = cfg.population_sizes();
  const auto N = cfg.total_agents;
  const int horizon = cfg.horizon_days;
  std::mt19937_64 rng(cfg.seed);

  std::vector<std::uint8_t> group(static_cast<std::size_t>(N));
  std::vector<std::uint8_t> immune(static_cast<std::size_t>(N));
  std::vector<std::uint8_t> infected(static_cast<std::size_t>(N), 0);
  std::int64_t next = 0;
  std::int64_t seed_lo = 0, seed_count = N;
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    if (cfg.seed_population && *cfg.seed_population == p) {
      seed_lo = next;
      seed_count = sizes[p];
    }
    std::bernoulli_distribution is_immune(cfg.populations[p].immunity);
    for (std::int64_t i = 0; i < sizes[p]; ++i, ++next) {
      group[static_cast<std::size_t>(next)] = static_cast<std::uint8_t>(p);
      immune[static_cast<std::size_t>(next)] = is_immune(rng) ? 1 : 0;
    }
  }

  // onset[d] lists agents whose single infectious day is d.
  std::vector<std::vector<std::int64_t>> onset(static_cast<std::size_t>(horizon) + 1);
  std::vector<double> infections(static_cast<std::size_t>(horizon) + 1, 0.0);
  std::vector<double> onsets(static_cast<std::size_t>(horizon) + 1, 0.0);
  auto infect = [&](std::int64_t agent, int day) {
    infected[static_cast<std::size_t>(agent)] = 1;
    infections[static_cast<std::size_t>(day)] += 1.0;
    const int d = day + cfg.populations[group[static_cast<std::size_t>(agent)]].incubation_days;
    if (d <= horizon) onset[static_cast<std::size_t>(d)].push_back(agent);
  };

  // Seeds: partial Fisher-Yates over the eligible index range.
  {
    std::vector<std::int64_t> pool(static_cast<std::size_t>(seed_count));
    std::iota(pool.begin(), pool.end(), seed_lo);
    for (std::int64_t i = 0; i < cfg.initial_infected; ++i) {
      std::uniform_int_distribution<std::int64_t> pick(i, seed_count - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
      infect(pool[static_cast<std::size_t>(i)], 0);
    }
  }

  std::poisson_distribution<int> contacts(cfg.contact_rate > 0.0 ? cfg.contact_rate : 1.0);
  std::uniform_int_distribution<std::int64_t> anyone(0, N - 1);
  for (int day = 1; day <= horizon; ++day) {
    const auto& spreaders = onset[static_cast<std::size_t>(day)];
    onsets[static_cast<std::size_t>(day)] = static_cast<double>(spreaders.size());
    if (cfg.contact_rate <= 0.0) continue;
    for (std::size_t s = 0; s < spreaders.size(); ++s) {
      const int n = contacts(rng);
      for (int c = 0; c < n; ++c) {
        const auto j = anyone(rng);
        const auto ju = static_cast<std::size_t>(j);
        if (!infected[ju] && !immune[ju]) infect(j, day);
      }
    }
  }

  std::vector<double> cumulative(infections.size());
  double running = 0.0;
  for (std::size_t d = 0; d < cumulative.size(); ++d) {
    running += cfg.counting == CaseCounting::Infection ? infections[d] : onsets[d];
    cumulative[d] = running;
  }
  return TimeSeries(day_axis(horizon), std::move(cumulative));
}

TimeSeries run_abm_mean(const ContagionConfig& cfg, int runs) {
  if (runs < 1) throw std::invalid_argument("run_abm_mean: runs must be positive");
  std::vector<double> sum(static_cast<std::size_t>(cfg.horizon_days) + 1, 0.0);
  for (int r = 0; r < runs; ++r) {
    ContagionConfig c = cfg;
    c.seed = cfg.seed ^ static_cast<std::uint64_t>(r);
    const auto s = run_abm(c);
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += s.value(d);
  }
  for (double& v : sum) v /= runs;
  return TimeSeries(day_axis(cfg.horizon_days), std::move(sum));
}

TimeSeries run_meanfield(const ContagionConfig& cfg) {
  cfg.validate();
  const auto sizes = cfg.population_sizes();
  const auto P = sizes.size();
  const double N = static_cast<double>(cfg.total_agents);
  const double seeds = static_cast<double>(cfg.initial_infected);
  const auto days = static_cast<std::size_t>(cfg.horizon_days) + 1;

  // fresh[p][d]: expected infections in population p on day d.
  std::vector<std::vector<double>> fresh(P, std::vector<double>(days, 0.0));
  std::vector<double> susceptible(P);
  for (std::size_t p = 0; p < P; ++p) {
    const double Np = static_cast<double>(sizes[p]);
    const double seeded = cfg.seed_population ? (*cfg.seed_population == p ? seeds : 0.0)
                                              : seeds * Np / N;
    fresh[p][0] = seeded;
    susceptible[p] = (Np - seeded) * (1.0 - cfg.populations[p].immunity);
  }

  auto infectious_on = [&](std::size_t d) {
    double I = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      const auto rho = static_cast<std::size_t>(cfg.populations[p].incubation_days);
      if (d >= rho) I += fresh[p][d - rho];
    }
    return I;
  };

  for (std::size_t d = 1; d < days; ++d) {
    const double hit = -std::expm1(-cfg.contact_rate * infectious_on(d) / N);
    for (std::size_t p = 0; p < P; ++p) {
      fresh[p][d] = susceptible[p] * hit;
      susceptible[p] -= fresh[p][d];
    }
  }

  std::vector<double> cumulative(days);
  double running = 0.0;
  for (std::size_t d = 0; d < days; ++d) {
    if (cfg.counting == CaseCounting::Infection) {
      for (std::size_t p = 0; p < P; ++p) running += fresh[p][d];
    } else if (d > 0) {
      running += infectious_on(d);
    }
    cumulative[d] = running;
  }
  return TimeSeries(day_axis(cfg.horizon_days), std::move(cumulative));
}

std::string_view to_string(NoiseKind kind) {
  return kind == NoiseKind::Additive ? "additive" : "multiplicative";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "additive") return NoiseKind::Additive;
  if (name == "multiplicative") return NoiseKind::Multiplicative;
  throw std::invalid_argument("unknown noise model '" + std::string(name) +
                              "' (valid: additive, multiplicative)");
}

TimeSeries add_noise(const TimeSeries& series, const NoiseSpec& noise, std::uint64_t seed) {
  if (!(noise.sigma >= 0.0)) throw std::invalid_argument("add_noise: sigma must be >= 0");
  if (noise.sigma == 0.0) return series;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, noise.sigma);
  const auto y = series.values();
  std::vector<double> out(y.begin(), y.end());
  for (double& v : out) {
    const double e = eps(rng);
    v = noise.kind == NoiseKind::Additive ? v + e : v * (1.0 + e);
  }
  const auto t = series.times();
  return TimeSeries(std::vector<double>(t.begin(), t.end()), std::move(out));
}

}  // namespace sigmoids
