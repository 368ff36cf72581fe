#include <cmath>
#include <stdexcept>

#include "sigmoids/fitting.hpp"
#include "sigmoids/quadrature.hpp"

namespace sigmoids {

namespace {

constexpr int kCoarseScan = 24;

double logistic_rmse(const TimeSeries& data, double L, double k, double t0) {
  return rmse(SigmoidSpec::logistic(L, k, t0), data);
}

}  // namespace

KChoice best_k(const TimeSeries& prefix, double L, double t0, const KPolicy& policy) {
  if (policy.fixed) return {*policy.fixed, logistic_rmse(prefix, L, *policy.fixed, t0)};
  if (!(policy.lo > 0.0) || !(policy.hi > policy.lo)) {
    throw std::invalid_argument("error_surface: k bracket must satisfy 0 < lo < hi");
  }
  // The rmse need not be unimodal in k; localise on a log grid first.
  const double llo = std::log(policy.lo), lhi = std::log(policy.hi);
  auto k_at = [&](int i) { return std::exp(llo + (lhi - llo) * i / (kCoarseScan - 1)); };
  int best = 0;
  double best_err = HUGE_VAL;
  for (int i = 0; i < kCoarseScan; ++i) {
    const double e = logistic_rmse(prefix, L, k_at(i), t0);
    if (e < best_err) {
      best_err = e;
      best = i;
    }
  }
  const double a = k_at(std::max(best - 1, 0));
  const double b = k_at(std::min(best + 1, kCoarseScan - 1));
  const double k = numeric::golden_section_minimize(
      [&](double kk) { return logistic_rmse(prefix, L, kk, t0); }, a, b, 1e-10 * b);
  const double e = logistic_rmse(prefix, L, k, t0);
  return e <= best_err ? KChoice{k, e} : KChoice{k_at(best), best_err};
}

Eigen::MatrixXd error_surface(const TimeSeries& prefix, std::span<const double> L_grid,
                              std::span<const double> t0_grid, const KPolicy& k_policy) {
  if (L_grid.empty() || t0_grid.empty()) throw std::invalid_argument("error_surface: empty grid");
  if (prefix.empty()) throw std::invalid_argument("error_surface: empty series");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(L_grid.size()),
                      static_cast<Eigen::Index>(t0_grid.size()));
  for (std::size_t i = 0; i < L_grid.size(); ++i) {
    for (std::size_t j = 0; j < t0_grid.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          best_k(prefix, L_grid[i], t0_grid[j], k_policy).rmse;
    }
  }
  return out;
}

}  // namespace sigmoids
