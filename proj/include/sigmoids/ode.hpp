#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sigmoids::numeric {

struct Rk45Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  double initial_step = 1e-2;
  long max_steps = 5'000'000;
};

// Dormand-Prince 5(4) for a scalar autonomous ODE y' = f(y), started at
// (t_start, y_start). Returns y at each target time. Targets must be sorted and
// all on one side of t_start (ascending above it or descending below it).
//
// `breakpoints` are state values where f has a kink: a step that would carry
// the state across one is shortened so the state lands on it exactly, and the
// next step starts on the other branch. The state is clamped to [y_lo, y_hi].
std::vector<double> solve_scalar_autonomous(const std::function<double(double)>& f,
                                            double t_start, double y_start,
                                            std::span<const double> targets,
                                            std::span<const double> breakpoints, double y_lo,
                                            double y_hi, const Rk45Options& options = {});

}  // namespace sigmoids::numeric
