#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigmoids/curves.hpp"
#include "sigmoids/ode.hpp"
#include "sigmoids/time_series.hpp"

namespace sigmoids {

enum class DampingKind { Linear, PiecewiseLinear, PowerTail, SlopeTail, Custom };

// "linear", "piecewise-linear", "power-tail", "slope-tail".
[[nodiscard]] std::string_view to_string(DampingKind kind);
[[nodiscard]] DampingKind parse_damping_kind(std::string_view name);

/// Damping function H in y' = k H(y) y. Every kind has H(0) = 1, is
/// non-increasing, positive below its asymptote and zero at it, and H(y) y has a
/// single maximum on (0, asymptote).
///
///   Linear(L)            1 - y/L
///   PiecewiseLinear(L)   min(1, 2 - 2y/L)
///   PowerTail(L, p)      1 for y <= L/2, (2 (1 - y/L))^p above
///   SlopeTail(s, scale)  1 for y <= scale/2, 1 + s (y/scale - 1/2) above;
///                        zero at scale (1/2 - 1/s)
///
/// `scale` is the L constructor argument for the first three kinds and the
/// shared-prefix unit for SlopeTail. `Custom` wraps a caller-supplied H; its
/// invariants are spot-checked on construction only.
class DampingSpec {
 public:
  static DampingSpec linear(double L);
  static DampingSpec piecewise_linear(double L);
  static DampingSpec power_tail(double L, int exponent);
  static DampingSpec slope_tail(double slope, double scale = 1.0);
  static DampingSpec custom(std::function<double(double)> h, double asymptote,
                            std::optional<double> kink = std::nullopt);

  [[nodiscard]] DampingKind kind() const noexcept { return kind_; }
  [[nodiscard]] double scale() const noexcept { return scale_; }
  [[nodiscard]] int exponent() const noexcept { return exponent_; }
  [[nodiscard]] double slope() const noexcept { return slope_; }

  // Zero of H: the sigmoid's asymptote.
  [[nodiscard]] double asymptote() const noexcept { return asymptote_; }

  // Where H has a kink, if anywhere.
  [[nodiscard]] std::optional<double> breakpoint() const noexcept { return kink_; }

  // Same kind and shape parameters, different scale. Not defined for Custom.
  [[nodiscard]] DampingSpec with_scale(double scale) const;

  // Unchecked evaluation; y is clamped into [0, asymptote].
  [[nodiscard]] double operator()(double y) const;

 private:
  DampingSpec() = default;

  DampingKind kind_ = DampingKind::Linear;
  double scale_ = 1.0;
  int exponent_ = 1;
  double slope_ = -2.0;
  double asymptote_ = 1.0;
  std::optional<double> kink_;
  std::function<double(double)> custom_;
};

// H(y); throws std::domain_error when y is outside [0, asymptote].
[[nodiscard]] double eval_damping(const DampingSpec& d, double y);

/// Sigmoid defined by y' = k H(y) y and anchored by y(0).
class OdeSigmoid {
 public:
  OdeSigmoid(DampingSpec damping, double k, double y_at_zero);

  [[nodiscard]] const DampingSpec& damping() const noexcept { return damping_; }
  [[nodiscard]] double k() const noexcept { return k_; }
  [[nodiscard]] double y_at_zero() const noexcept { return y_at_zero_; }
  [[nodiscard]] double L() const noexcept { return damping_.asymptote(); }

  [[nodiscard]] double rate(double y) const { return k_ * damping_(y) * y; }

 private:
  DampingSpec damping_;
  double k_;
  double y_at_zero_;
};

struct Trajectory {
  TimeSeries series;
  // Set when the solution reaches L at a finite time inside the grid; values
  // from that time on are L.
  bool finite_arrival = false;
  std::optional<double> arrival_time;
};

// Solution on an arbitrary strictly increasing grid (it need not contain 0).
[[nodiscard]] Trajectory integrate(const OdeSigmoid& s, std::span<const double> t_grid,
                                   const numeric::Rk45Options& options = {});

struct ReachTime {
  double time;          // +infinity when the integral diverges
  bool finite_arrival;  // y_to == L and the integral converges
};

/// Elapsed time from y_from to y_to, i.e. the integral of 1 / (k H(y) y).
/// Signed: negative when y_to < y_from. y_to may equal L, in which case the
/// endpoint behaviour of H decides between a finite arrival time and divergence.
[[nodiscard]] ReachTime time_to_reach(const OdeSigmoid& s, double y_from, double y_to);

// y0 maximizes H(y) y; t0 is the signed time from the anchor to y0.
[[nodiscard]] InflectionPoint inflection_of(const OdeSigmoid& s);

struct DampingEstimate {
  double y;
  double H;
};

// H(y(t)) ~= y'(t) / (k y(t)) with central differences (one-sided at the ends).
// Throws std::domain_error on non-positive samples.
[[nodiscard]] std::vector<DampingEstimate> recover_damping(const TimeSeries& series, double k);

// Derivative of a sampled series: three-point central differences on a possibly
// non-uniform grid, one-sided at the ends.
[[nodiscard]] std::vector<double> finite_difference_derivative(const TimeSeries& series);

}  // namespace sigmoids
