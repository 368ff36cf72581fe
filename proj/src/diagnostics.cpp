#include "sigmoids/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sigmoids {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Strong: return "strong";
    case Verdict::Weak: return "weak";
    case Verdict::Unidentifiable: return "unidentifiable";
  }
  return "unknown";
}

IdentifiabilityReport identifiability(const Eigen::MatrixXd& S, const SensitivityOptions& opt) {
  if (S.cols() != 3) throw std::invalid_argument("identifiability: expected three columns");
  IdentifiabilityReport r;
  r.fim = S.transpose() * S / (opt.sigma * opt.sigma);
  r.fim = 0.5 * (r.fim + r.fim.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(r.fim);
  for (int i = 0; i < 3; ++i) {
    r.eigenvalues[i] = eig.eigenvalues()[2 - i];
    r.eigenvectors.col(i) = eig.eigenvectors().col(2 - i);
  }
  r.condition_number = r.eigenvalues[2] > 0.0 ? r.eigenvalues[0] / r.eigenvalues[2]
                                              : std::numeric_limits<double>::infinity();

  double largest = 0.0;
  for (int j = 0; j < 3; ++j) {
    r.column_norms[static_cast<std::size_t>(j)] = S.col(j).norm();
    largest = std::max(largest, r.column_norms[static_cast<std::size_t>(j)]);
  }
  for (int j = 0; j < 3; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (r.column_norms[ju] < opt.unidentifiable_norm * largest || largest == 0.0) {
      r.verdicts[ju] = Verdict::Unidentifiable;
    } else if (r.condition_number > opt.weak_condition &&
               std::abs(r.eigenvectors(j, 2)) >= opt.weak_participation) {
      r.verdicts[ju] = Verdict::Weak;
    } else {
      r.verdicts[ju] = Verdict::Strong;
    }
  }
  return r;
}

SensitivityAnalysis sensitivity(const ParameterModel& model, const std::array<double, 3>& theta,
                                std::span<const double> times, const SensitivityOptions& opt) {
  if (times.empty()) throw std::invalid_argument("sensitivity: no sample times");
  if (!(opt.sigma > 0.0)) throw std::invalid_argument("sensitivity: sigma must be positive");
  const auto n = static_cast<Eigen::Index>(times.size());
  SensitivityAnalysis out;
  out.absolute.times.assign(times.begin(), times.end());
  out.absolute.values.resize(n, 3);

  for (int j = 0; j < 3; ++j) {
    const double ref = j == 2 ? std::max(std::abs(theta[2]), 1.0 / theta[0]) : std::abs(theta[j]);
    const double h = std::max(opt.rel_step * ref, opt.abs_floor);
    auto run = [&](double signed_h) {
      std::array<double, 3> p = theta;
      p[j] += signed_h;
      const auto y = model(p, times);
      if (y.size() != times.size()) throw std::runtime_error("sensitivity: model returned wrong length");
      for (const double v : y) {
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "sensitivity: non-finite model output with " << kParameterNames[j] << " perturbed to "
             << p[j];
          throw std::runtime_error(os.str());
        }
      }
      return y;
    };
    const auto up = run(h);
    const auto down = run(-h);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.absolute.values(i, j) =
          (up[static_cast<std::size_t>(i)] - down[static_cast<std::size_t>(i)]) / (2.0 * h);
    }
  }

  out.scaled = out.absolute;
  out.scaled.values.col(0) *= theta[0];
  out.scaled.values.col(1) *= theta[1];
  out.scaled.values.col(2) /= theta[0];
  out.report = identifiability(out.absolute.values, opt);
  return out;
}

SensitivityAnalysis sensitivity(const SigmoidSpec& spec, std::span<const double> times,
                                const SensitivityOptions& opt) {
  const ParameterModel model = [&spec](const std::array<double, 3>& p, std::span<const double> t) {
    const SigmoidSpec s(spec.family(), p[1], spec.alpha(), p[0], p[2]);
    std::vector<double> y;
    y.reserve(t.size());
    for (const double ti : t) y.push_back(eval(s, ti));
    return y;
  };
  return sensitivity(model, {spec.beta(), spec.L(), spec.shift()}, times, opt);
}

SensitivityAnalysis sensitivity(const OdeSigmoid& ode, std::span<const double> times,
                                const SensitivityOptions& opt) {
  if (ode.damping().kind() == DampingKind::Custom) {
    throw std::invalid_argument("sensitivity: custom damping has no scale parameter");
  }
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("sensitivity: times must be increasing");
  }
  const ParameterModel model = [&ode](const std::array<double, 3>& p, std::span<const double> t) {
    const OdeSigmoid s(ode.damping().with_scale(p[1]), p[0], ode.y_at_zero());
    std::vector<double> shifted(t.begin(), t.end());
    for (double& v : shifted) v -= p[2];
    const Trajectory path = integrate(s, shifted);
    const auto y = path.series.values();
    return std::vector<double>(y.begin(), y.end());
  };
  return sensitivity(model, {ode.k(), ode.damping().scale(), 0.0}, times, opt);
}

double column_norm(const SensitivityMatrix& s, Parameter p) {
  return s.values.col(static_cast<int>(p)).norm();
}

ForecastTrajectory rolling_forecast(const TimeSeries& data, std::span<const double> forecast_times,
                                    SigmoidFamily family, const FitOptions& fit_options) {
  ForecastTrajectory out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const double tau : forecast_times) {
    if (data.empty() || tau < data.front_time() || tau > data.back_time()) {
      throw std::invalid_argument("rolling_forecast: forecast time outside the data range");
    }
    if (!out.forecast_times.empty() && !(tau > out.forecast_times.back())) {
      throw std::invalid_argument("rolling_forecast: forecast times must increase");
    }
    out.forecast_times.push_back(tau);
    try {
      const FitResult fit = fit_ls(data.up_to(tau), family, fit_options);
      out.L_hat.push_back(fit.spec.L());
      out.t0_hat.push_back(fit.spec.shift());
      out.rmse.push_back(fit.rmse);
      out.converged.push_back(fit.converged);
      out.fits.push_back(fit);
    } catch (const std::exception&) {
      out.L_hat.push_back(nan);
      out.t0_hat.push_back(nan);
      out.rmse.push_back(nan);
      out.converged.push_back(false);
      out.fits.push_back(FitResult{});
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> surface_evolution(const TimeSeries& data,
                                               std::span<const double> forecast_times,
                                               std::span<const double> L_grid,
                                               std::span<const double> t0_grid,
                                               const KPolicy& k_policy) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(forecast_times.size());
  for (const double tau : forecast_times) {
    out.push_back(error_surface(data.up_to(tau), L_grid, t0_grid, k_policy));
  }
  return out;
}

std::size_t nearest_index(std::span<const double> grid, double x) {
  if (grid.empty()) throw std::invalid_argument("nearest_index: empty grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(grid[i] - x) < std::abs(grid[best] - x)) best = i;
  }
  return best;
}

NearMinimumRegion near_minimum_region(const Eigen::MatrixXd& surface, std::span<const double> L_grid,
                                      std::span<const double> t0_grid, double factor) {
  const auto rows = surface.rows(), cols = surface.cols();
  if (rows == 0 || cols == 0) throw std::invalid_argument("near_minimum_region: empty surface");
  if (static_cast<std::size_t>(rows) != L_grid.size() ||
      static_cast<std::size_t>(cols) != t0_grid.size()) {
    throw std::invalid_argument("near_minimum_region: grid sizes do not match the surface");
  }
  NearMinimumRegion r;
  Eigen::Index mi = 0, mj = 0;
  const double minimum = surface.minCoeff(&mi, &mj);
  r.min_row = static_cast<std::size_t>(mi);
  r.min_col = static_cast<std::size_t>(mj);
  r.mask = (surface.array() <= factor * minimum).matrix();

  Eigen::Index i_lo = rows, i_hi = -1, j_lo = cols, j_hi = -1;
  std::vector<std::array<double, 2>> pts;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!r.mask(i, j)) continue;
      i_lo = std::min(i_lo, i);
      i_hi = std::max(i_hi, i);
      j_lo = std::min(j_lo, j);
      j_hi = std::max(j_hi, j);
      pts.push_back({rows > 1 ? static_cast<double>(i) / static_cast<double>(rows - 1) : 0.0,
                     cols > 1 ? static_cast<double>(j) / static_cast<double>(cols - 1) : 0.0});
    }
  }
  r.cells = pts.size();
  const double L_range = L_grid.back() - L_grid.front();
  const double t0_range = t0_grid.back() - t0_grid.front();
  r.L_span = L_range != 0.0 ? (L_grid[static_cast<std::size_t>(i_hi)] -
                               L_grid[static_cast<std::size_t>(i_lo)]) / L_range
                            : 0.0;
  r.t0_span = t0_range != 0.0 ? (t0_grid[static_cast<std::size_t>(j_hi)] -
                                 t0_grid[static_cast<std::size_t>(j_lo)]) / t0_range
                              : 0.0;

  // Connected components by flood fill.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows, cols, false);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> stack;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!r.mask(i, j) || seen(i, j)) continue;
      ++r.components;
      stack.push_back({i, j});
      seen(i, j) = true;
      while (!stack.empty()) {
        const auto [a, b] = stack.back();
        stack.pop_back();
        for (Eigen::Index x = a - 1; x <= a + 1; ++x) {
          for (Eigen::Index y = b - 1; y <= b + 1; ++y) {
            if (x < 0 || y < 0 || x >= rows || y >= cols) continue;
            if (!r.mask(x, y) || seen(x, y)) continue;
            seen(x, y) = true;
            stack.push_back({x, y});
          }
        }
      }
    }
  }

  // Extents along the principal axes of the cell cloud.
  if (pts.size() >= 2) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : pts) mean += Eigen::Vector2d(p[0], p[1]);
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : pts) {
      const Eigen::Vector2d d = Eigen::Vector2d(p[0], p[1]) - mean;
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    double ext[2];
    for (int a = 0; a < 2; ++a) {
      const Eigen::Vector2d axis = eig.eigenvectors().col(a);
      double lo = HUGE_VAL, hi = -HUGE_VAL;
      for (const auto& p : pts) {
        const double s = axis.dot(Eigen::Vector2d(p[0], p[1]) - mean);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      ext[a] = hi - lo;
    }
    // A row of cells still has the width of one cell.
    const double cell = 1.0 / static_cast<double>(std::max(rows, cols));
    r.anisotropy = (ext[1] + cell) / (ext[0] + cell);
  }
  return r;
}

}  // namespace sigmoids
