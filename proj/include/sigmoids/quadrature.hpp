#pragma once

#include <functional>

namespace sigmoids::numeric {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Globally adaptive 7/15-point Gauss-Kronrod on [a, b], bisecting the interval
// with the largest error estimate until the total estimate is below
// max(abs_tol, rel_tol * |value|).
QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-13, double abs_tol = 0.0,
                               int max_intervals = 4000);

// Maximizer of a unimodal function on [a, b], bracket shrunk below `tol`.
double golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                               double tol);

double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol);

}  // namespace sigmoids::numeric
