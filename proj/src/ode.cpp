#include "sigmoids/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigmoids::numeric {

namespace {

// Dormand-Prince tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b - b_hat (fifth minus fourth order weights).
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

struct Step {
  double y;
  double error;  // scaled, accept when <= 1
};

class Stepper {
 public:
  Stepper(const std::function<double(double)>& f, double sign, double lo, double hi,
          const Rk45Options& opt)
      : f_(f), sign_(sign), lo_(lo), hi_(hi), opt_(opt) {}

  double rate(double y) const { return sign_ * f_(std::clamp(y, lo_, hi_)); }

  Step take(double y, double k1, double h) const {
    const double k2 = rate(y + h * a21 * k1);
    const double k3 = rate(y + h * (a31 * k1 + a32 * k2));
    const double k4 = rate(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = rate(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 = rate(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = rate(y_new);
    const double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double scale = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y), std::abs(y_new));
    return {y_new, std::abs(err) / scale};
  }

 private:
  const std::function<double(double)>& f_;
  double sign_, lo_, hi_;
  const Rk45Options& opt_;
};

}  // namespace

std::vector<double> solve_scalar_autonomous(const std::function<double(double)>& f,
                                            double t_start, double y_start,
                                            std::span<const double> targets,
                                            std::span<const double> breakpoints, double y_lo,
                                            double y_hi, const Rk45Options& opt) {
  std::vector<double> out;
  out.reserve(targets.size());
  if (targets.empty()) return out;

  const bool forward = targets.front() >= t_start;
  const double sign = forward ? 1.0 : -1.0;
  const Stepper stepper(f, sign, y_lo, y_hi, opt);

  // Integrate in s = sign * (t - t_start) >= 0.
  double s = 0.0;
  double y = std::clamp(y_start, y_lo, y_hi);
  double h = opt.initial_step;
  double k1 = stepper.rate(y);
  long steps = 0;

  for (const double target_t : targets) {
    const double target = sign * (target_t - t_start);
    if (target < s) throw std::invalid_argument("solve_scalar_autonomous: targets out of order");
    while (s < target) {
      if (++steps > opt.max_steps) {
        throw std::runtime_error("solve_scalar_autonomous: step limit exceeded");
      }
      const bool truncated = h >= target - s;
      const double h_try = truncated ? target - s : h;
      const Step step = stepper.take(y, k1, h_try);
      if (!std::isfinite(step.y)) throw std::runtime_error("solve_scalar_autonomous: non-finite state");
      if (step.error > 1.0) {
        h = h_try * std::max(0.2, 0.9 * std::pow(step.error, -0.2));
        continue;
      }

      // Land exactly on any kink the step would jump across.
      const double lo = std::min(y, step.y), hi = std::max(y, step.y);
      const double* crossed = nullptr;
      for (const double& b : breakpoints) {
        if (b > lo && b < hi) {
          crossed = &b;
          break;
        }
      }
      if (crossed != nullptr) {
        const double b = *crossed;
        const bool rising = step.y > y;
        double h_lo = 0.0, h_hi = h_try;
        for (int it = 0; it < 200 && h_hi - h_lo > 1e-15 * h_try; ++it) {
          const double mid = 0.5 * (h_lo + h_hi);
          const double ym = stepper.take(y, k1, mid).y;
          ((ym < b) == rising ? h_lo : h_hi) = mid;
        }
        s += h_lo;
        y = b;
        k1 = stepper.rate(y);
        continue;
      }

      s = truncated ? target : s + h_try;
      y = std::clamp(step.y, y_lo, y_hi);
      k1 = stepper.rate(y);
      const double growth =
          step.error == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(step.error, -0.2)));
      const double proposed = h_try * growth;
      h = truncated ? std::max(h, proposed) : proposed;
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace sigmoids::numeric
