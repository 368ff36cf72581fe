#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "params.hpp"
#include "sigmoids/contagion.hpp"
#include "sigmoids/curves.hpp"
#include "sigmoids/damping.hpp"
#include "sigmoids/fitting.hpp"
#include "sigmoids/time_series.hpp"

namespace sigmoids::cli {

// {kind, L, exponent, slope, scale}
[[nodiscard]] DampingSpec parse_damping(const Block& b);

// {family, L, alpha, beta, shift}; the logistic may use {L, k, t0} instead.
[[nodiscard]] SigmoidSpec parse_curve(const Block& b);

// {populations: [{fraction, immunity, incubation_days}], total_agents, ...}
[[nodiscard]] ContagionConfig parse_contagion(const Block& b, std::uint64_t seed);

// {k_range, L_range, t0_range, step, known_k, noise_sigma}
[[nodiscard]] PriorSpec parse_prior(const Block& b);

// {n_starts, max_iterations, bounds: {L: [lo, hi], rate: [...], t0: [...]}}
[[nodiscard]] FitOptions parse_fit_options(const Block& b, std::uint64_t seed);

// {fixed: k} or {bracket: [lo, hi]}
[[nodiscard]] KPolicy parse_k_policy(const Block& b);

struct Dataset {
  TimeSeries observed;  // with noise, if any
  TimeSeries clean;
  std::string source;
  std::optional<double> true_L, true_t0, true_k;
};

/// data:
///   source: logistic | curve | ode | abm | meanfield | values
///   ...source fields..., times (not for contagion sources)
///   noise: {model: additive | multiplicative, sigma}
[[nodiscard]] Dataset load_dataset(const Block& b, std::uint64_t seed);

}  // namespace sigmoids::cli
