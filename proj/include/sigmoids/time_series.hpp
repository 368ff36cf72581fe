#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sigmoids {

// Ordered (time, value) samples. Times strictly increasing, values finite.
class TimeSeries {
 public:
  TimeSeries() = default;

  TimeSeries(std::vector<double> times, std::vector<double> values)
      : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size()) {
      throw std::invalid_argument("TimeSeries: times and values differ in length (" +
                                  std::to_string(times_.size()) + " vs " +
                                  std::to_string(values_.size()) + ")");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (!std::isfinite(times_[i])) {
        throw std::invalid_argument("TimeSeries: non-finite time at index " + std::to_string(i));
      }
      if (!std::isfinite(values_[i])) {
        throw std::invalid_argument("TimeSeries: non-finite value at index " + std::to_string(i));
      }
      if (i > 0 && !(times_[i] > times_[i - 1])) {
        throw std::invalid_argument("TimeSeries: times not strictly increasing at index " +
                                    std::to_string(i));
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] bool empty() const noexcept { return times_.empty(); }

  [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] double time(std::size_t i) const { return times_.at(i); }
  [[nodiscard]] double value(std::size_t i) const { return values_.at(i); }

  [[nodiscard]] double front_time() const { return times_.front(); }
  [[nodiscard]] double back_time() const { return times_.back(); }

  // Samples with t <= cutoff.
  [[nodiscard]] TimeSeries up_to(double cutoff) const {
    std::vector<double> t, v;
    for (std::size_t i = 0; i < times_.size() && times_[i] <= cutoff; ++i) {
      t.push_back(times_[i]);
      v.push_back(values_[i]);
    }
    return TimeSeries(std::move(t), std::move(v));
  }

  // Piecewise-linear interpolation; throws outside [front_time, back_time].
  [[nodiscard]] double interpolate(double t) const {
    if (times_.empty() || t < times_.front() || t > times_.back()) {
      throw std::domain_error("TimeSeries::interpolate: time outside sampled range");
    }
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    const auto hi = static_cast<std::size_t>(it - times_.begin());
    if (times_[hi] == t) return values_[hi];
    const std::size_t lo = hi - 1;
    const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
  }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

// Evenly spaced grid of `count` points from `start` to `stop` inclusive.
inline std::vector<double> linspace(double start, double stop, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
  out.back() = stop;
  return out;
}

}  // namespace sigmoids
