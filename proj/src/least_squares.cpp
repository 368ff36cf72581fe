#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "sigmoids/fitting.hpp"

namespace sigmoids {

namespace {

using Params = std::array<double, 3>;

SigmoidSpec make_spec(SigmoidFamily family, const Params& p) {
  return {family, p[0], 1.0, p[1], p[2]};
}

bool is_degenerate(std::span<const double> y) {
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i] > y[i - 1]) return false;
  }
  return true;
}

class Objective {
 public:
  Objective(const TimeSeries& data, SigmoidFamily family, std::span<const double> weights)
      : t_(data.times()), y_(data.values()), family_(family) {
    w_.assign(weights.begin(), weights.end());
    if (w_.empty()) w_.assign(t_.size(), 1.0);
  }

  std::size_t size() const { return t_.size(); }

  void residuals(const Params& p, Eigen::VectorXd& r) const {
    const SigmoidSpec s = make_spec(family_, p);
    r.resize(static_cast<Eigen::Index>(t_.size()));
    for (std::size_t i = 0; i < t_.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = std::sqrt(w_[i]) * (eval(s, t_[i]) - y_[i]);
    }
  }

  double sse(const Params& p) const {
    Eigen::VectorXd r;
    residuals(p, r);
    return r.squaredNorm();
  }

 private:
  std::span<const double> t_, y_;
  SigmoidFamily family_;
  std::vector<double> w_;
};

struct LocalFit {
  Params p;
  double sse;
  bool converged;
};

Params clamp_into(Params p, const ParameterBounds& b) {
  for (int j = 0; j < 3; ++j) p[j] = std::clamp(p[j], b.lo[j], b.hi[j]);
  return p;
}

LocalFit levenberg_marquardt(const Objective& obj, Params p, const ParameterBounds& b,
                             const FitOptions& opt) {
  const auto n = static_cast<Eigen::Index>(obj.size());
  std::array<double, 3> scale{};
  for (int j = 0; j < 3; ++j) scale[j] = std::max(1e-12, 1e-3 * (b.hi[j] - b.lo[j]));

  p = clamp_into(p, b);
  Eigen::VectorXd r(n), rp(n), rm(n);
  obj.residuals(p, r);
  double sse = r.squaredNorm();
  double lambda = opt.initial_damping;
  Eigen::MatrixXd J(n, 3);

  for (int it = 0; it < opt.max_iterations; ++it) {
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-6 * std::max(std::abs(p[j]), scale[j]);
      Params up = p, down = p;
      up[j] += h;
      down[j] -= h;
      // Stay inside the positive domain for L and rate.
      if (j < 2 && down[j] <= 0.0) down[j] = p[j];
      obj.residuals(up, rp);
      obj.residuals(down, rm);
      J.col(j) = (rp - rm) / (up[j] - down[j]);
    }
    const Eigen::Matrix3d JtJ = J.transpose() * J;
    const Eigen::Vector3d g = J.transpose() * r;

    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix3d A = JtJ;
      for (int j = 0; j < 3; ++j) A(j, j) += lambda * std::max(JtJ(j, j), 1e-300);
      const Eigen::Vector3d delta = A.ldlt().solve(-g);
      Params trial = p;
      for (int j = 0; j < 3; ++j) trial[j] += delta[j];
      trial = clamp_into(trial, b);
      const double trial_sse = std::isfinite(delta.sum()) ? obj.sse(trial) : HUGE_VAL;
      if (std::isfinite(trial_sse) && trial_sse < sse) {
        const double before = std::sqrt(sse), after = std::sqrt(trial_sse);
        p = trial;
        sse = trial_sse;
        obj.residuals(p, r);
        lambda = std::max(lambda / opt.damping_factor, 1e-12);
        accepted = true;
        if (before - after <= opt.rel_tol * before) return {p, sse, true};
        break;
      }
      lambda *= opt.damping_factor;
    }
    // No descent direction left: a stationary point within the box.
    if (!accepted) return {p, sse, true};
  }
  return {p, sse, false};
}

double early_rate(const TimeSeries& prefix) {
  std::vector<double> t, ly;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix.value(i) > 0.0) {
      t.push_back(prefix.time(i));
      ly.push_back(std::log(prefix.value(i)));
    }
  }
  const std::size_t m = std::max<std::size_t>(2, t.size() / 2);
  if (t.size() < 2) return 0.0;
  const auto use = std::min(m, t.size());
  const double tm = std::accumulate(t.begin(), t.begin() + static_cast<long>(use), 0.0) / use;
  const double lm = std::accumulate(ly.begin(), ly.begin() + static_cast<long>(use), 0.0) / use;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < use; ++i) {
    sxy += (t[i] - tm) * (ly[i] - lm);
    sxx += (t[i] - tm) * (t[i] - tm);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::vector<Params> latin_hypercube(const ParameterBounds& b, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<std::vector<int>, 3> perm;
  for (auto& pm : perm) {
    pm.resize(static_cast<std::size_t>(n));
    std::iota(pm.begin(), pm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<int> pick(0, i);
      std::swap(pm[static_cast<std::size_t>(i)], pm[static_cast<std::size_t>(pick(rng))]);
    }
  }
  std::vector<Params> starts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double u = (perm[j][static_cast<std::size_t>(i)] + unit(rng)) / n;
      if (j < 2) {
        const double lo = std::log(b.lo[j]), hi = std::log(b.hi[j]);
        starts[static_cast<std::size_t>(i)][j] = std::exp(lo + u * (hi - lo));
      } else {
        starts[static_cast<std::size_t>(i)][j] = b.lo[j] + u * (b.hi[j] - b.lo[j]);
      }
    }
  }
  return starts;
}

}  // namespace

ParameterBounds default_bounds(const TimeSeries& prefix) {
  if (prefix.empty()) throw std::invalid_argument("default_bounds: empty series");
  const auto y = prefix.values();
  double y_max = *std::max_element(y.begin(), y.end());
  if (!(y_max > 0.0)) y_max = 1.0;
  const double span = std::max(prefix.back_time() - prefix.front_time(), 1e-9);
  const double r = std::max(early_rate(prefix), 1.0 / span);

  ParameterBounds b;
  b.lo = {y_max * (1.0 + 1e-9), 1e-6 * r, prefix.front_time() - span};
  b.hi = {50.0 * y_max, 10.0 * r, prefix.back_time() + 3.0 * span};
  return b;
}

double rmse(const SigmoidSpec& spec, const TimeSeries& data, std::span<const double> weights) {
  if (data.empty()) throw std::invalid_argument("rmse: empty series");
  if (!weights.empty() && weights.size() != data.size()) {
    throw std::invalid_argument("rmse: weights and data differ in length");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const double r = eval(spec, data.time(i)) - data.value(i);
    num += w * r * r;
    den += w;
  }
  return std::sqrt(num / den);
}

FitResult fit_ls(const TimeSeries& prefix, SigmoidFamily family, const FitOptions& options) {
  if (prefix.size() < 4) throw std::invalid_argument("fit_ls: need at least 4 samples");
  if (!options.weights.empty()) {
    if (options.weights.size() != prefix.size()) {
      throw std::invalid_argument("fit_ls: weights and prefix differ in length");
    }
    for (const double w : options.weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("fit_ls: weights must be positive");
    }
  }
  const ParameterBounds b = options.bounds.value_or(default_bounds(prefix));
  for (int j = 0; j < 3; ++j) {
    if (!std::isfinite(b.lo[j]) || !std::isfinite(b.hi[j]) || !(b.lo[j] < b.hi[j])) {
      throw std::invalid_argument(std::string("fit_ls: invalid bounds for ") + kFitParameterNames[j]);
    }
  }
  if (!(b.lo[0] > 0.0) || !(b.lo[1] > 0.0)) {
    throw std::invalid_argument("fit_ls: L and rate bounds must be positive");
  }

  const Objective obj(prefix, family, options.weights);
  auto starts = latin_hypercube(b, std::max(options.n_starts, 1), options.seed);
  starts.insert(starts.end(), options.extra_starts.begin(), options.extra_starts.end());

  LocalFit best{starts.front(), HUGE_VAL, false};
  for (const auto& s : starts) {
    const LocalFit f = levenberg_marquardt(obj, s, b, options);
    if (std::isfinite(f.sse) && f.sse < best.sse) best = f;
  }

  FitResult out;
  out.n_starts_used = static_cast<int>(starts.size());
  out.degenerate_input = is_degenerate(prefix.values());
  if (!std::isfinite(best.sse)) {
    out.spec = make_spec(family, clamp_into(starts.front(), b));
    out.converged = false;
  } else {
    out.spec = make_spec(family, best.p);
    out.converged = best.converged;
  }
  const Params p = {out.spec.L(), out.spec.beta(), out.spec.shift()};
  for (int j = 0; j < 3; ++j) {
    const double tol = 1e-6 * (b.hi[j] - b.lo[j]);
    if (p[j] - b.lo[j] <= tol || b.hi[j] - p[j] <= tol) out.bounds_hit.insert(kFitParameterNames[j]);
  }
  out.rmse = rmse(out.spec, prefix);
  return out;
}

}  // namespace sigmoids
