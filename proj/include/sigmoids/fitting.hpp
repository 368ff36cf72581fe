#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sigmoids/curves.hpp"
#include "sigmoids/time_series.hpp"

namespace sigmoids {

// ---------------------------------------------------------------------------
// Least squares

// Box for (L, rate, t0). The families are fitted with alpha = 1, so t0 is the
// spec's shift and, for every family, the inflection time.
struct ParameterBounds {
  std::array<double, 3> lo;
  std::array<double, 3> hi;
};

inline constexpr std::array<const char*, 3> kFitParameterNames{"L", "rate", "t0"};

// L in (y_max, 50 y_max], rate in (0, 10 r] with r a log-linear slope over the
// earlier half of the positive samples, t0 in [t_first - span, t_last + 3 span].
[[nodiscard]] ParameterBounds default_bounds(const TimeSeries& prefix);

struct FitOptions {
  int n_starts = 16;
  std::uint64_t seed = 0;
  std::optional<ParameterBounds> bounds;
  std::vector<double> weights;  // per sample, multiplies squared residuals
  std::vector<std::array<double, 3>> extra_starts;

  double initial_damping = 1e-3;
  double damping_factor = 10.0;
  double rel_tol = 1e-10;
  int max_iterations = 200;
};

struct FitResult {
  SigmoidSpec spec = SigmoidSpec::logistic(1.0, 1.0, 0.0);
  double rmse = 0.0;  // unweighted, over the fitted window
  bool converged = false;
  int n_starts_used = 0;
  std::set<std::string> bounds_hit;
  bool degenerate_input = false;  // no increasing step anywhere in the prefix
};

// Multi-start Levenberg-Marquardt on the mean squared error, finite-difference
// Jacobian, Latin-hypercube starts (log L, log rate, linear t0).
[[nodiscard]] FitResult fit_ls(const TimeSeries& prefix, SigmoidFamily family,
                               const FitOptions& options = {});

// Root mean squared residual; weighted when weights are given.
[[nodiscard]] double rmse(const SigmoidSpec& spec, const TimeSeries& data,
                          std::span<const double> weights = {});

// ---------------------------------------------------------------------------
// Error surfaces (logistic)

struct KPolicy {
  std::optional<double> fixed;  // use this k everywhere
  double lo = 1e-3;             // otherwise minimise over k in [lo, hi]
  double hi = 10.0;

  static KPolicy fixed_k(double k) { return {k, 0.0, 0.0}; }
  static KPolicy bracket(double lo, double hi) { return {std::nullopt, lo, hi}; }
};

// rmse(i, j) for L = L_grid[i], t0 = t0_grid[j].
[[nodiscard]] Eigen::MatrixXd error_surface(const TimeSeries& prefix,
                                            std::span<const double> L_grid,
                                            std::span<const double> t0_grid,
                                            const KPolicy& k_policy);

// Minimising k for fixed (L, t0) under the policy, and the rmse it achieves.
struct KChoice {
  double k;
  double rmse;
};
[[nodiscard]] KChoice best_k(const TimeSeries& prefix, double L, double t0,
                             const KPolicy& k_policy);

// ---------------------------------------------------------------------------
// Bayesian grid posterior (logistic, uniform priors, Gaussian noise)

struct PriorSpec {
  std::array<double, 2> k_range{0.0, 4.0};
  std::array<double, 2> L_range{0.0, 2.0};
  std::array<double, 2> t0_range{-4.0, 4.0};
  double step = 1.0 / 50.0;
  std::optional<double> known_k;
  double noise_sigma = 0.05;

  void validate() const;
  // Inclusive axes, floor(range / step) + 1 points each; the k axis collapses to
  // the grid value nearest known_k when that is set.
  [[nodiscard]] std::vector<double> k_axis() const;
  [[nodiscard]] std::vector<double> L_axis() const;
  [[nodiscard]] std::vector<double> t0_axis() const;
};

struct ParameterSummary {
  double mean = 0.0;
  double sd = 0.0;
  double mode = 0.0;  // at the joint posterior mode
};

struct PosteriorSummary {
  ParameterSummary k, L, t0;
};

class PosteriorGrid {
 public:
  PosteriorGrid(std::vector<double> k, std::vector<double> L, std::vector<double> t0,
                std::vector<double> log_weights);

  [[nodiscard]] const std::vector<double>& k_axis() const noexcept { return k_; }
  [[nodiscard]] const std::vector<double>& L_axis() const noexcept { return L_; }
  [[nodiscard]] const std::vector<double>& t0_axis() const noexcept { return t0_; }
  // Normalised: the exponentials sum to one.
  [[nodiscard]] const std::vector<double>& log_weights() const noexcept { return log_w_; }

  [[nodiscard]] std::size_t index(std::size_t ik, std::size_t iL, std::size_t it0) const {
    return (ik * t0_.size() + it0) * L_.size() + iL;
  }
  [[nodiscard]] double probability(std::size_t ik, std::size_t iL, std::size_t it0) const;

  [[nodiscard]] std::vector<double> marginal_k() const;
  [[nodiscard]] std::vector<double> marginal_L() const;
  [[nodiscard]] std::vector<double> marginal_t0() const;
  [[nodiscard]] PosteriorSummary summary() const;

 private:
  std::vector<double> k_, L_, t0_;
  std::vector<double> log_w_;
};

[[nodiscard]] PosteriorGrid bayes_update(const TimeSeries& samples, const PriorSpec& prior);

/// bayes_update for many data sets on one set of sample times. The logistic
/// shape for every (k, t0) cell is computed once; L enters the squared error
/// quadratically, so each data set costs one pass over the grid.
class LogisticGridPosterior {
 public:
  LogisticGridPosterior(const PriorSpec& prior, std::vector<double> sample_times);

  [[nodiscard]] PosteriorSummary summarize(std::span<const double> values) const;
  [[nodiscard]] PosteriorGrid full(std::span<const double> values) const;

 private:
  template <class Visit>
  void sweep(std::span<const double> values, Visit&& visit) const;

  PriorSpec prior_;
  std::vector<double> times_, k_, L_, t0_;
  std::vector<double> shape_;  // [ik][it0][sample]
  std::vector<double> B_;      // sum of squared shapes per (ik, it0)
};

struct ReplicationConfig {
  int n_reps = 500;
  std::uint64_t seed = 0;
  std::vector<double> sample_times{-5, -4, -3, -2, -1};
  double true_k = 1.0, true_L = 1.0, true_t0 = 0.0;
  double sample_sigma = 0.05;
  PriorSpec prior;  // known_k is ignored; both variants are run
  double known_k = 1.0;
};

struct ReplicationTrial {
  std::vector<double> values;
  PosteriorSummary unknown_k;
  PosteriorSummary known_k;
};

struct ReplicationSummary {
  // Across trials: mean and sample sd of the per-trial posterior-mean L.
  double mean_L_unknown_k = 0.0, sd_L_unknown_k = 0.0;
  double mean_L_known_k = 0.0, sd_L_known_k = 0.0;
  // Same statistics for the per-trial posterior-mode L.
  double mean_mode_L_unknown_k = 0.0, sd_mode_L_unknown_k = 0.0;
  double mean_mode_L_known_k = 0.0, sd_mode_L_known_k = 0.0;
  // Average within-trial posterior sd of L.
  double mean_posterior_sd_unknown_k = 0.0, mean_posterior_sd_known_k = 0.0;
  // Share of trials where the known-k posterior sd of L is not above the
  // unknown-k one.
  double share_known_not_wider = 0.0;
  std::vector<ReplicationTrial> trials;
};

// Trial r draws its noise from mt19937_64(seed ^ r).
[[nodiscard]] ReplicationSummary replicate_known_k_experiment(const ReplicationConfig& cfg);

// ---------------------------------------------------------------------------
// Remedies

enum class WeightKind { Uniform, LinearRecency, ExponentialRecency };

[[nodiscard]] std::string_view to_string(WeightKind kind);
[[nodiscard]] WeightKind parse_weight_kind(std::string_view name);

struct WeightScheme {
  WeightKind kind = WeightKind::Uniform;
  std::optional<double> half_life;  // exponential only; default window / 4
};

[[nodiscard]] std::vector<WeightScheme> default_weight_schemes();
[[nodiscard]] std::vector<double> scheme_weights(const WeightScheme& scheme,
                                                 std::span<const double> times);

struct WeightedFitSelection {
  FitResult selected;
  std::size_t selected_index = 0;
  std::vector<FitResult> candidates;  // one per scheme, in order
};

// Fits under each scheme and keeps the one with the largest fitted L.
[[nodiscard]] WeightedFitSelection modis_weighted_fit(const TimeSeries& prefix,
                                                      std::span<const WeightScheme> schemes,
                                                      SigmoidFamily family = SigmoidFamily::Logistic,
                                                      const FitOptions& options = {});

struct SymmetricCompletion {
  TimeSeries continuation;  // (2 t0 - t, 2 y0 - y) for prefix samples before t0
  double L_estimate;        // 2 y0
  double y0;
};

// Point-reflection of the prefix about (t0, y0). Throws std::invalid_argument if
// the prefix does not reach t0.
[[nodiscard]] SymmetricCompletion symmetric_completion(const TimeSeries& prefix, double t0,
                                                       double y0);
// y0 interpolated from the prefix.
[[nodiscard]] SymmetricCompletion symmetric_completion(const TimeSeries& prefix, double t0);

// P (1 - 1/R0); throws std::domain_error when R0 <= 1.
[[nodiscard]] double herd_immunity_limit(double P, double R0);

enum class DampingBelief { LinearOrFaster, FastEarlyDamping, Unknown };

[[nodiscard]] std::string_view to_string(DampingBelief belief);
[[nodiscard]] DampingBelief parse_damping_belief(std::string_view name);

struct BoundReport {
  double L_hat;
  double y_last;
  std::string label;  // "lower bound", "upper bound" or "unlabeled"
  double doubling_ratio;  // |L_hat - 2 y_last| / L_hat
  bool doubling_artifact_suspected;  // ratio < 0.25
  bool below_one_third;              // y_last < L_hat / 3
};

[[nodiscard]] BoundReport bound_report(const FitResult& fit, const TimeSeries& prefix,
                                       DampingBelief belief);

}  // namespace sigmoids
