#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sigmoids/fitting.hpp"

namespace sigmoids {

std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::Uniform: return "uniform";
    case WeightKind::LinearRecency: return "linear-recency";
    case WeightKind::ExponentialRecency: return "exponential-recency";
  }
  return "unknown";
}

WeightKind parse_weight_kind(std::string_view name) {
  if (name == "uniform") return WeightKind::Uniform;
  if (name == "linear-recency") return WeightKind::LinearRecency;
  if (name == "exponential-recency") return WeightKind::ExponentialRecency;
  throw std::invalid_argument("unknown weight scheme '" + std::string(name) +
                              "' (valid: uniform, linear-recency, exponential-recency)");
}

std::vector<WeightScheme> default_weight_schemes() {
  return {{WeightKind::Uniform, std::nullopt},
          {WeightKind::LinearRecency, std::nullopt},
          {WeightKind::ExponentialRecency, std::nullopt}};
}

std::vector<double> scheme_weights(const WeightScheme& scheme, std::span<const double> t) {
  std::vector<double> w(t.size(), 1.0);
  if (t.size() < 2 || scheme.kind == WeightKind::Uniform) return w;
  const double span = t.back() - t.front();
  if (scheme.kind == WeightKind::LinearRecency) {
    // Oldest point keeps a spacing's worth of weight so none vanish.
    const double gap = span / static_cast<double>(t.size() - 1);
    for (std::size_t i = 0; i < t.size(); ++i) w[i] = (t[i] - t.front() + gap) / (span + gap);
    return w;
  }
  const double h = scheme.half_life.value_or(span / 4.0);
  if (!(h > 0.0)) throw std::invalid_argument("scheme_weights: half_life must be positive");
  for (std::size_t i = 0; i < t.size(); ++i) w[i] = std::exp2(-(t.back() - t[i]) / h);
  return w;
}

WeightedFitSelection modis_weighted_fit(const TimeSeries& prefix,
                                        std::span<const WeightScheme> schemes,
                                        SigmoidFamily family, const FitOptions& options) {
  if (schemes.size() < 2) throw std::invalid_argument("modis_weighted_fit: need at least 2 schemes");
  WeightedFitSelection out;
  for (const auto& scheme : schemes) {
    FitOptions o = options;
    o.weights = scheme_weights(scheme, prefix.times());
    out.candidates.push_back(fit_ls(prefix, family, o));
  }
  for (std::size_t i = 1; i < out.candidates.size(); ++i) {
    if (out.candidates[i].spec.L() > out.candidates[out.selected_index].spec.L()) {
      out.selected_index = i;
    }
  }
  out.selected = out.candidates[out.selected_index];
  return out;
}

SymmetricCompletion symmetric_completion(const TimeSeries& prefix, double t0, double y0) {
  if (prefix.empty() || prefix.back_time() < t0 || prefix.front_time() > t0) {
    throw std::invalid_argument("symmetric_completion: prefix does not reach t0");
  }
  std::vector<double> t, y;
  for (std::size_t i = prefix.size(); i-- > 0;) {
    if (prefix.time(i) < t0) {
      t.push_back(2.0 * t0 - prefix.time(i));
      y.push_back(2.0 * y0 - prefix.value(i));
    }
  }
  return {TimeSeries(std::move(t), std::move(y)), 2.0 * y0, y0};
}

SymmetricCompletion symmetric_completion(const TimeSeries& prefix, double t0) {
  if (prefix.empty() || prefix.back_time() < t0 || prefix.front_time() > t0) {
    throw std::invalid_argument("symmetric_completion: prefix does not reach t0");
  }
  return symmetric_completion(prefix, t0, prefix.interpolate(t0));
}

double herd_immunity_limit(double P, double R0) {
  if (!(P > 0.0)) throw std::domain_error("herd_immunity_limit: P must be positive");
  if (!(R0 > 1.0)) throw std::domain_error("herd_immunity_limit: R0 must exceed 1");
  return P * (1.0 - 1.0 / R0);
}

std::string_view to_string(DampingBelief belief) {
  switch (belief) {
    case DampingBelief::LinearOrFaster: return "linear-or-faster";
    case DampingBelief::FastEarlyDamping: return "fast-early-damping";
    case DampingBelief::Unknown: return "unknown";
  }
  return "unknown";
}

DampingBelief parse_damping_belief(std::string_view name) {
  if (name == "linear-or-faster") return DampingBelief::LinearOrFaster;
  if (name == "fast-early-damping") return DampingBelief::FastEarlyDamping;
  if (name == "unknown") return DampingBelief::Unknown;
  throw std::invalid_argument("unknown damping belief '" + std::string(name) +
                              "' (valid: linear-or-faster, fast-early-damping, unknown)");
}

BoundReport bound_report(const FitResult& fit, const TimeSeries& prefix, DampingBelief belief) {
  if (prefix.empty()) throw std::invalid_argument("bound_report: empty prefix");
  BoundReport r{};
  r.L_hat = fit.spec.L();
  r.y_last = prefix.value(prefix.size() - 1);
  switch (belief) {
    case DampingBelief::LinearOrFaster: r.label = "lower bound"; break;
    case DampingBelief::FastEarlyDamping: r.label = "upper bound"; break;
    case DampingBelief::Unknown: r.label = "unlabeled"; break;
  }
  r.doubling_ratio = std::abs(r.L_hat - 2.0 * r.y_last) / r.L_hat;
  r.doubling_artifact_suspected = r.doubling_ratio < 0.25;
  r.below_one_third = r.y_last < r.L_hat / 3.0;
  return r;
}

}  // namespace sigmoids
