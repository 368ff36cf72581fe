#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sigmoids/curves.hpp"
#include "sigmoids/damping.hpp"
#include "sigmoids/fitting.hpp"
#include "sigmoids/time_series.hpp"

namespace sigmoids {

// Column order of every sensitivity matrix.
enum class Parameter { k = 0, L = 1, t0 = 2 };
inline constexpr std::array<const char*, 3> kParameterNames{"k", "L", "t0"};

struct SensitivityMatrix {
  std::vector<double> times;
  Eigen::MatrixXd values;  // rows = times, columns = (k, L, t0)
};

enum class Verdict { Strong, Weak, Unidentifiable };
[[nodiscard]] std::string_view to_string(Verdict v);

struct IdentifiabilityReport {
  Eigen::Matrix3d fim;
  Eigen::Vector3d eigenvalues;   // descending
  Eigen::Matrix3d eigenvectors;  // columns match eigenvalues
  double condition_number;       // +infinity when the smallest eigenvalue is <= 0
  std::array<double, 3> column_norms;
  std::array<Verdict, 3> verdicts;
};

struct SensitivityOptions {
  double rel_step = 1e-6;
  double abs_floor = 1e-9;
  double sigma = 1.0;
  // Thresholds for the verdicts.
  double unidentifiable_norm = 1e-8;  // column norm relative to the largest
  double weak_condition = 1e6;
  double weak_participation = 0.1;  // |component| in the weakest eigenvector
};

struct SensitivityAnalysis {
  SensitivityMatrix absolute;
  // Columns scaled by k, L and 1/k: the response to a relative change in k or L
  // and to a shift by one growth time.
  SensitivityMatrix scaled;
  IdentifiabilityReport report;
};

using ParameterModel =
    std::function<std::vector<double>(const std::array<double, 3>& theta, std::span<const double> t)>;

/// Central differences of model(theta, times) in each of (k, L, t0) with step
/// rel_step * |theta_j| (at least abs_floor; for t0 the reference magnitude is
/// max(|t0|, 1/k)). Throws std::runtime_error naming the perturbed parameter if
/// the model returns a non-finite value.
[[nodiscard]] SensitivityAnalysis sensitivity(const ParameterModel& model,
                                              const std::array<double, 3>& theta,
                                              std::span<const double> times,
                                              const SensitivityOptions& options = {});

// Closed form: k = beta, L, t0 = shift.
[[nodiscard]] SensitivityAnalysis sensitivity(const SigmoidSpec& spec, std::span<const double> times,
                                              const SensitivityOptions& options = {});

// ODE: k, L = damping scale, t0 = translation of the solution in time.
[[nodiscard]] SensitivityAnalysis sensitivity(const OdeSigmoid& model, std::span<const double> times,
                                              const SensitivityOptions& options = {});

[[nodiscard]] IdentifiabilityReport identifiability(const Eigen::MatrixXd& S,
                                                    const SensitivityOptions& options = {});

// Column Euclidean norm.
[[nodiscard]] double column_norm(const SensitivityMatrix& s, Parameter p);

struct ForecastTrajectory {
  std::vector<double> forecast_times;
  std::vector<double> L_hat;
  std::vector<double> t0_hat;
  std::vector<double> rmse;
  std::vector<bool> converged;
  std::optional<double> true_L, true_t0;
  std::vector<FitResult> fits;
};

// fit_ls on data.up_to(tau) for each tau; a prefix whose fit throws is recorded
// with NaN estimates and converged = false.
[[nodiscard]] ForecastTrajectory rolling_forecast(const TimeSeries& data,
                                                  std::span<const double> forecast_times,
                                                  SigmoidFamily family,
                                                  const FitOptions& fit_options = {});

[[nodiscard]] std::vector<Eigen::MatrixXd> surface_evolution(const TimeSeries& data,
                                                             std::span<const double> forecast_times,
                                                             std::span<const double> L_grid,
                                                             std::span<const double> t0_grid,
                                                             const KPolicy& k_policy);

/// Cells with rmse <= factor * (minimum rmse).
struct NearMinimumRegion {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  std::size_t cells = 0;
  std::size_t min_row = 0, min_col = 0;  // location of the minimum
  double L_span = 0.0;   // extent along the row (L) axis, as a share of its range
  double t0_span = 0.0;  // same for t0
  std::size_t components = 0;  // 8-connected
  // Ratio of the region's extents along its principal axes, with coordinates
  // normalised by axis length and one cell width added to each extent.
  double anisotropy = 1.0;

  [[nodiscard]] bool contains(std::size_t row, std::size_t col) const {
    return mask(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }
};

[[nodiscard]] NearMinimumRegion near_minimum_region(const Eigen::MatrixXd& surface,
                                                    std::span<const double> L_grid,
                                                    std::span<const double> t0_grid,
                                                    double factor = 1.1);

// Index of the grid value nearest to x.
[[nodiscard]] std::size_t nearest_index(std::span<const double> grid, double x);

}  // namespace sigmoids
