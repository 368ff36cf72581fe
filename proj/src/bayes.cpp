#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "sigmoids/fitting.hpp"

namespace sigmoids {

namespace {

std::vector<double> axis(const std::array<double, 2>& range, double step) {
  const auto n = static_cast<std::size_t>(std::floor((range[1] - range[0]) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = range[0] + step * static_cast<double>(i);
  return v;
}

double logistic_shape(double k, double t0, double t) {
  const double z = -k * (t - t0);
  return z > 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

struct Moments {
  double w = 0.0, x = 0.0, xx = 0.0;
  void add(double weight, double value) {
    w += weight;
    x += weight * value;
    xx += weight * value * value;
  }
  ParameterSummary summary(double mode) const {
    const double mean = x / w;
    return {mean, std::sqrt(std::max(0.0, xx / w - mean * mean)), mode};
  }
};

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (const double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) m += x;
  return v.empty() ? 0.0 : m / static_cast<double>(v.size());
}

}  // namespace

void PriorSpec::validate() const {
  auto check = [](const std::array<double, 2>& r, const char* name) {
    if (!std::isfinite(r[0]) || !std::isfinite(r[1]) || !(r[1] > r[0])) {
      throw std::invalid_argument(std::string("prior: ") + name + " must satisfy lo < hi");
    }
  };
  check(k_range, "k_range");
  check(L_range, "L_range");
  check(t0_range, "t0_range");
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("prior: step must be positive");
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("prior: noise_sigma must be positive");
  }
}

std::vector<double> PriorSpec::k_axis() const {
  auto full = axis(k_range, step);
  if (!known_k) return full;
  const auto nearest = std::min_element(full.begin(), full.end(), [&](double a, double b) {
    return std::abs(a - *known_k) < std::abs(b - *known_k);
  });
  return {*nearest};
}

std::vector<double> PriorSpec::L_axis() const { return axis(L_range, step); }
std::vector<double> PriorSpec::t0_axis() const { return axis(t0_range, step); }

PosteriorGrid::PosteriorGrid(std::vector<double> k, std::vector<double> L, std::vector<double> t0,
                             std::vector<double> log_weights)
    : k_(std::move(k)), L_(std::move(L)), t0_(std::move(t0)), log_w_(std::move(log_weights)) {
  if (log_w_.size() != k_.size() * L_.size() * t0_.size()) {
    throw std::invalid_argument("PosteriorGrid: weight count does not match the axes");
  }
}

double PosteriorGrid::probability(std::size_t ik, std::size_t iL, std::size_t it0) const {
  return std::exp(log_w_[index(ik, iL, it0)]);
}

std::vector<double> PosteriorGrid::marginal_k() const {
  std::vector<double> m(k_.size(), 0.0);
  for (std::size_t ik = 0; ik < k_.size(); ++ik)
    for (std::size_t it = 0; it < t0_.size(); ++it)
      for (std::size_t iL = 0; iL < L_.size(); ++iL) m[ik] += probability(ik, iL, it);
  return m;
}

std::vector<double> PosteriorGrid::marginal_L() const {
  std::vector<double> m(L_.size(), 0.0);
  for (std::size_t ik = 0; ik < k_.size(); ++ik)
    for (std::size_t it = 0; it < t0_.size(); ++it)
      for (std::size_t iL = 0; iL < L_.size(); ++iL) m[iL] += probability(ik, iL, it);
  return m;
}

std::vector<double> PosteriorGrid::marginal_t0() const {
  std::vector<double> m(t0_.size(), 0.0);
  for (std::size_t ik = 0; ik < k_.size(); ++ik)
    for (std::size_t it = 0; it < t0_.size(); ++it)
      for (std::size_t iL = 0; iL < L_.size(); ++iL) m[it] += probability(ik, iL, it);
  return m;
}

PosteriorSummary PosteriorGrid::summary() const {
  Moments mk, mL, mt;
  std::size_t best = 0;
  for (std::size_t ik = 0; ik < k_.size(); ++ik) {
    for (std::size_t it = 0; it < t0_.size(); ++it) {
      for (std::size_t iL = 0; iL < L_.size(); ++iL) {
        const std::size_t idx = index(ik, iL, it);
        const double p = std::exp(log_w_[idx]);
        mk.add(p, k_[ik]);
        mL.add(p, L_[iL]);
        mt.add(p, t0_[it]);
        if (log_w_[idx] > log_w_[best]) best = idx;
      }
    }
  }
  const std::size_t iL = best % L_.size();
  const std::size_t it = (best / L_.size()) % t0_.size();
  const std::size_t ik = best / (L_.size() * t0_.size());
  return {mk.summary(k_[ik]), mL.summary(L_[iL]), mt.summary(t0_[it])};
}

LogisticGridPosterior::LogisticGridPosterior(const PriorSpec& prior, std::vector<double> times)
    : prior_(prior),
      times_(std::move(times)),
      k_(prior.k_axis()),
      L_(prior.L_axis()),
      t0_(prior.t0_axis()) {
  prior.validate();
  if (times_.empty()) throw std::invalid_argument("bayes_update: no samples");
  const std::size_t n = times_.size();
  shape_.resize(k_.size() * t0_.size() * n);
  B_.resize(k_.size() * t0_.size());
  for (std::size_t ik = 0; ik < k_.size(); ++ik) {
    for (std::size_t it = 0; it < t0_.size(); ++it) {
      const std::size_t cell = ik * t0_.size() + it;
      double b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = logistic_shape(k_[ik], t0_[it], times_[i]);
        shape_[cell * n + i] = s;
        b += s * s;
      }
      B_[cell] = b;
    }
  }
}

// Calls visit(ik, it0, A, B, jstar, ll_max_cell) per (k, t0) cell after finding
// the global maximum of the log-likelihood, which it returns. Constant terms
// (sum of y^2, normalisation) are dropped: ll(L) = -(L^2 B - 2 L A) / (2 sigma^2).
template <class Visit>
void LogisticGridPosterior::sweep(std::span<const double> values, Visit&& visit) const {
  const std::size_t n = times_.size();
  if (values.size() != n) throw std::invalid_argument("bayes_update: sample count mismatch");
  const std::size_t cells = k_.size() * t0_.size();
  const double inv2s2 = 1.0 / (2.0 * prior_.noise_sigma * prior_.noise_sigma);
  const double L0 = L_.front(), dL = prior_.step;
  const auto last = static_cast<long>(L_.size()) - 1;

  std::vector<double> A(cells);
  std::vector<long> jstar(cells);
  double m = -HUGE_VAL;
  for (std::size_t c = 0; c < cells; ++c) {
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) a += values[i] * shape_[c * n + i];
    A[c] = a;
    const long j = std::clamp(std::lround((a / B_[c] - L0) / dL), 0L, last);
    jstar[c] = j;
    const double L = L_[static_cast<std::size_t>(j)];
    m = std::max(m, -(L * L * B_[c] - 2.0 * L * a) * inv2s2);
  }
  for (std::size_t c = 0; c < cells; ++c) {
    visit(c / t0_.size(), c % t0_.size(), A[c], B_[c], jstar[c], m, inv2s2);
  }
}

PosteriorSummary LogisticGridPosterior::summarize(std::span<const double> values) const {
  const std::size_t nL = L_.size();
  std::vector<double> row(nL);
  std::vector<double> by_k(k_.size(), 0.0), by_t0(t0_.size(), 0.0), by_L(nL, 0.0);
  double best = -1.0;
  std::size_t bk = 0, bt = 0, bL = 0;
  const double dL = prior_.step;

  sweep(values, [&](std::size_t ik, std::size_t it, double A, double B, long js, double m,
                    double inv2s2) {
    auto ll = [&](std::size_t j) { return -(L_[j] * L_[j] * B - 2.0 * L_[j] * A) * inv2s2; };
    // exp(ll_{j+1} - ll_j) changes by the constant factor q from one j to the next.
    auto step_ratio = [&](std::size_t j) {
      return std::exp(-((2.0 * L_[j] * dL + dL * dL) * B - 2.0 * dL * A) * inv2s2);
    };
    const double q = std::exp(-2.0 * dL * dL * B * inv2s2);
    const auto j0 = static_cast<std::size_t>(js);
    row[j0] = std::exp(ll(j0) - m);
    double r = 1.0;
    if (j0 + 1 < nL) r = step_ratio(j0);
    for (std::size_t j = j0 + 1; j < nL; ++j, r *= q) row[j] = row[j - 1] * r;
    if (j0 > 0) r = step_ratio(j0 - 1);
    for (std::size_t j = j0; j-- > 0; r /= q) row[j] = row[j + 1] / r;

    double total = 0.0;
    for (std::size_t j = 0; j < nL; ++j) {
      total += row[j];
      by_L[j] += row[j];
    }
    by_k[ik] += total;
    by_t0[it] += total;
    if (row[j0] > best) {
      best = row[j0];
      bk = ik;
      bt = it;
      bL = j0;
    }
  });

  Moments mk, mL, mt;
  for (std::size_t i = 0; i < k_.size(); ++i) mk.add(by_k[i], k_[i]);
  for (std::size_t i = 0; i < nL; ++i) mL.add(by_L[i], L_[i]);
  for (std::size_t i = 0; i < t0_.size(); ++i) mt.add(by_t0[i], t0_[i]);
  return {mk.summary(k_[bk]), mL.summary(L_[bL]), mt.summary(t0_[bt])};
}

PosteriorGrid LogisticGridPosterior::full(std::span<const double> values) const {
  const std::size_t nL = L_.size();
  std::vector<double> logw(k_.size() * t0_.size() * nL);
  double total = 0.0;
  sweep(values, [&](std::size_t ik, std::size_t it, double A, double B, long, double m,
                    double inv2s2) {
    const std::size_t base = (ik * t0_.size() + it) * nL;
    for (std::size_t j = 0; j < nL; ++j) {
      const double v = -(L_[j] * L_[j] * B - 2.0 * L_[j] * A) * inv2s2 - m;
      logw[base + j] = v;
      total += std::exp(v);
    }
  });
  const double log_total = std::log(total);
  for (double& v : logw) v -= log_total;
  return PosteriorGrid(k_, L_, t0_, std::move(logw));
}

PosteriorGrid bayes_update(const TimeSeries& samples, const PriorSpec& prior) {
  if (samples.empty()) throw std::invalid_argument("bayes_update: no samples");
  const auto t = samples.times();
  const LogisticGridPosterior engine(prior, std::vector<double>(t.begin(), t.end()));
  return engine.full(samples.values());
}

ReplicationSummary replicate_known_k_experiment(const ReplicationConfig& cfg) {
  if (cfg.n_reps < 1) throw std::invalid_argument("replicate_known_k_experiment: n_reps must be positive");
  if (!(cfg.sample_sigma >= 0.0)) {
    throw std::invalid_argument("replicate_known_k_experiment: sample_sigma must be >= 0");
  }
  PriorSpec unknown = cfg.prior;
  unknown.known_k.reset();
  PriorSpec known = cfg.prior;
  known.known_k = cfg.known_k;
  const LogisticGridPosterior post_unknown(unknown, cfg.sample_times);
  const LogisticGridPosterior post_known(known, cfg.sample_times);
  const SigmoidSpec truth = SigmoidSpec::logistic(cfg.true_L, cfg.true_k, cfg.true_t0);

  ReplicationSummary out;
  out.trials.reserve(static_cast<std::size_t>(cfg.n_reps));
  std::vector<double> mean_u, mean_k, mode_u, mode_k, sd_u, sd_k;
  int not_wider = 0;
  for (int r = 0; r < cfg.n_reps; ++r) {
    std::mt19937_64 rng(cfg.seed ^ static_cast<std::uint64_t>(r));
    std::normal_distribution<double> eps(0.0, cfg.sample_sigma > 0.0 ? cfg.sample_sigma : 1.0);
    ReplicationTrial trial;
    for (const double t : cfg.sample_times) {
      const double noise = cfg.sample_sigma > 0.0 ? eps(rng) : 0.0;
      trial.values.push_back(eval(truth, t) + noise);
    }
    trial.unknown_k = post_unknown.summarize(trial.values);
    trial.known_k = post_known.summarize(trial.values);
    mean_u.push_back(trial.unknown_k.L.mean);
    mean_k.push_back(trial.known_k.L.mean);
    mode_u.push_back(trial.unknown_k.L.mode);
    mode_k.push_back(trial.known_k.L.mode);
    sd_u.push_back(trial.unknown_k.L.sd);
    sd_k.push_back(trial.known_k.L.sd);
    if (trial.known_k.L.sd <= trial.unknown_k.L.sd) ++not_wider;
    out.trials.push_back(std::move(trial));
  }
  out.mean_L_unknown_k = mean_of(mean_u);
  out.sd_L_unknown_k = sample_sd(mean_u);
  out.mean_L_known_k = mean_of(mean_k);
  out.sd_L_known_k = sample_sd(mean_k);
  out.mean_mode_L_unknown_k = mean_of(mode_u);
  out.sd_mode_L_unknown_k = sample_sd(mode_u);
  out.mean_mode_L_known_k = mean_of(mode_k);
  out.sd_mode_L_known_k = sample_sd(mode_k);
  out.mean_posterior_sd_unknown_k = mean_of(sd_u);
  out.mean_posterior_sd_known_k = mean_of(sd_k);
  out.share_known_not_wider = static_cast<double>(not_wider) / cfg.n_reps;
  return out;
}

}  // namespace sigmoids
