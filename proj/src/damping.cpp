#include "sigmoids/damping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sigmoids/quadrature.hpp"

namespace sigmoids {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("DampingSpec: ") + what + " must be positive");
  }
}

// Local power of H at its zero, from two probes close to L. The integral of
// 1/H diverges at L exactly when this power is >= 1.
bool endpoint_integrable(const DampingSpec& d) {
  const double L = d.asymptote();
  const double d1 = 1e-6 * L, d2 = 1e-9 * L;
  const double h1 = d(L - d1), h2 = d(L - d2);
  if (!(h2 > 0.0) || !(h1 > h2)) return false;
  const double power = std::log(h1 / h2) / std::log(d1 / d2);
  return power < 0.99;
}

double integrate_reciprocal_rate(const OdeSigmoid& s, double a, double b) {
  const double L = s.L();
  std::vector<double> cuts{a, b};
  if (const auto kink = s.damping().breakpoint(); kink && *kink > a && *kink < b) {
    cuts.push_back(*kink);
  }
  // Geometric cuts toward 0 and toward L, where the integrand changes scale.
  for (double x = 8.0 * a; x < b && x < 0.5 * L; x *= 8.0) cuts.push_back(x);
  for (double gap = 8.0 * (L - b); L - gap > a && gap < 0.5 * L; gap *= 8.0) cuts.push_back(L - gap);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto integrand = [&s](double y) { return 1.0 / s.rate(y); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += numeric::gauss_kronrod(integrand, cuts[i], cuts[i + 1], 1e-13).value;
  }
  return total;
}

}  // namespace

std::string_view to_string(DampingKind kind) {
  switch (kind) {
    case DampingKind::Linear: return "linear";
    case DampingKind::PiecewiseLinear: return "piecewise-linear";
    case DampingKind::PowerTail: return "power-tail";
    case DampingKind::SlopeTail: return "slope-tail";
    case DampingKind::Custom: return "custom";
  }
  return "unknown";
}

DampingKind parse_damping_kind(std::string_view name) {
  if (name == "linear") return DampingKind::Linear;
  if (name == "piecewise-linear") return DampingKind::PiecewiseLinear;
  if (name == "power-tail") return DampingKind::PowerTail;
  if (name == "slope-tail") return DampingKind::SlopeTail;
  throw std::invalid_argument("unknown damping kind '" + std::string(name) +
                              "' (valid: linear, piecewise-linear, power-tail, slope-tail)");
}

DampingSpec DampingSpec::linear(double L) {
  require_positive(L, "L");
  DampingSpec d;
  d.kind_ = DampingKind::Linear;
  d.scale_ = L;
  d.asymptote_ = L;
  return d;
}

DampingSpec DampingSpec::piecewise_linear(double L) {
  require_positive(L, "L");
  DampingSpec d;
  d.kind_ = DampingKind::PiecewiseLinear;
  d.scale_ = L;
  d.asymptote_ = L;
  d.kink_ = 0.5 * L;
  return d;
}

DampingSpec DampingSpec::power_tail(double L, int exponent) {
  require_positive(L, "L");
  if (exponent < 1) throw std::invalid_argument("DampingSpec: power-tail exponent must be >= 1");
  DampingSpec d;
  d.kind_ = DampingKind::PowerTail;
  d.scale_ = L;
  d.exponent_ = exponent;
  d.asymptote_ = L;
  d.kink_ = 0.5 * L;
  return d;
}

DampingSpec DampingSpec::slope_tail(double slope, double scale) {
  require_positive(scale, "scale");
  if (!(slope < 0.0) || !std::isfinite(slope)) {
    throw std::invalid_argument("DampingSpec: slope-tail slope must be negative");
  }
  DampingSpec d;
  d.kind_ = DampingKind::SlopeTail;
  d.scale_ = scale;
  d.slope_ = slope;
  d.asymptote_ = scale * (0.5 - 1.0 / slope);
  d.kink_ = 0.5 * scale;
  return d;
}

DampingSpec DampingSpec::custom(std::function<double(double)> h, double asymptote,
                                std::optional<double> kink) {
  require_positive(asymptote, "asymptote");
  if (!h) throw std::invalid_argument("DampingSpec: custom damping needs a function");
  if (std::abs(h(0.0) - 1.0) > 1e-12) throw std::invalid_argument("DampingSpec: custom H(0) != 1");
  if (std::abs(h(asymptote)) > 1e-12) throw std::invalid_argument("DampingSpec: custom H(L) != 0");
  constexpr int kProbes = 1000;
  double previous = h(0.0);
  int rate_maxima = 0;
  double r_prev2 = 0.0, r_prev = 0.0;
  for (int i = 1; i < kProbes; ++i) {
    const double y = asymptote * i / kProbes;
    const double v = h(y);
    if (!(v > 0.0)) throw std::invalid_argument("DampingSpec: custom H not positive below L");
    if (v > previous) throw std::invalid_argument("DampingSpec: custom H increases");
    const double r = v * y;
    if (i >= 2 && r_prev > r_prev2 && r_prev >= r) ++rate_maxima;
    r_prev2 = r_prev;
    r_prev = r;
    previous = v;
  }
  if (rate_maxima > 1) throw std::invalid_argument("DampingSpec: custom H(y)y has several maxima");
  DampingSpec d;
  d.kind_ = DampingKind::Custom;
  d.scale_ = asymptote;
  d.asymptote_ = asymptote;
  d.kink_ = kink;
  d.custom_ = std::move(h);
  return d;
}

DampingSpec DampingSpec::with_scale(double scale) const {
  switch (kind_) {
    case DampingKind::Linear: return linear(scale);
    case DampingKind::PiecewiseLinear: return piecewise_linear(scale);
    case DampingKind::PowerTail: return power_tail(scale, exponent_);
    case DampingKind::SlopeTail: return slope_tail(slope_, scale);
    case DampingKind::Custom: break;
  }
  throw std::logic_error("DampingSpec::with_scale: not defined for custom damping");
}

double DampingSpec::operator()(double y) const {
  y = std::clamp(y, 0.0, asymptote_);
  switch (kind_) {
    case DampingKind::Linear:
      return 1.0 - y / scale_;
    case DampingKind::PiecewiseLinear:
      return std::min(1.0, 2.0 - 2.0 * y / scale_);
    case DampingKind::PowerTail:
      if (y <= 0.5 * scale_) return 1.0;
      return std::pow(2.0 * (1.0 - y / scale_), exponent_);
    case DampingKind::SlopeTail:
      if (y <= 0.5 * scale_) return 1.0;
      return std::max(0.0, 1.0 + slope_ * (y / scale_ - 0.5));
    case DampingKind::Custom:
      return custom_(y);
  }
  return 0.0;
}

double eval_damping(const DampingSpec& d, double y) {
  if (!(y >= 0.0 && y <= d.asymptote())) {
    throw std::domain_error("eval_damping: y = " + std::to_string(y) + " outside [0, " +
                            std::to_string(d.asymptote()) + "]");
  }
  return d(y);
}

OdeSigmoid::OdeSigmoid(DampingSpec damping, double k, double y_at_zero)
    : damping_(std::move(damping)), k_(k), y_at_zero_(y_at_zero) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("OdeSigmoid: k must be positive");
  if (!(y_at_zero > 0.0 && y_at_zero < damping_.asymptote())) {
    throw std::invalid_argument("OdeSigmoid: y(0) must lie strictly inside (0, L)");
  }
}

Trajectory integrate(const OdeSigmoid& s, std::span<const double> t_grid,
                     const numeric::Rk45Options& options) {
  std::vector<double> grid(t_grid.begin(), t_grid.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw std::invalid_argument("integrate: time grid must be finite and strictly increasing");
    }
  }

  const double L = s.L();
  Trajectory out;
  double arrival = kInf;
  if (endpoint_integrable(s.damping())) {
    arrival = time_to_reach(s, s.y_at_zero(), L).time;
  }

  numeric::Rk45Options opt = options;
  if (opt.initial_step == numeric::Rk45Options{}.initial_step) opt.initial_step = 1e-2 / s.k();
  std::vector<double> kinks;
  if (const auto kink = s.damping().breakpoint()) kinks.push_back(*kink);
  const std::function<double(double)> rhs = [&s](double y) { return s.rate(y); };

  const auto split = std::lower_bound(grid.begin(), grid.end(), 0.0);
  std::vector<double> backward(std::make_reverse_iterator(split), grid.rend());
  std::vector<double> forward;
  std::vector<double> arrived;
  for (auto it = split; it != grid.end(); ++it) (*it < arrival ? forward : arrived).push_back(*it);

  const auto below = numeric::solve_scalar_autonomous(rhs, 0.0, s.y_at_zero(), backward, kinks,
                                                      0.0, L, opt);
  const auto above = numeric::solve_scalar_autonomous(rhs, 0.0, s.y_at_zero(), forward, kinks,
                                                      0.0, L, opt);

  std::vector<double> values;
  values.reserve(grid.size());
  values.insert(values.end(), below.rbegin(), below.rend());
  values.insert(values.end(), above.begin(), above.end());
  values.insert(values.end(), arrived.size(), L);
  if (std::isfinite(arrival)) {
    out.arrival_time = arrival;
    out.finite_arrival = !arrived.empty();
  }
  out.series = TimeSeries(std::move(grid), std::move(values));
  return out;
}

ReachTime time_to_reach(const OdeSigmoid& s, double y_from, double y_to) {
  if (y_from == y_to) return {0.0, false};
  if (y_from > y_to) {
    const ReachTime back = time_to_reach(s, y_to, y_from);
    return {-back.time, false};
  }
  const double L = s.L();
  if (!(y_from > 0.0) || !(y_to <= L)) {
    throw std::domain_error("time_to_reach: levels must satisfy 0 < y_from < y_to <= L");
  }
  if (y_to < L) return {integrate_reciprocal_rate(s, y_from, y_to), false};

  if (!endpoint_integrable(s.damping())) return {kInf, false};
  // Integrable endpoint: integrate up to L - delta, then close the gap with the
  // local power law H ~ c (L - y)^p.
  const double delta = 1e-9 * L;
  const double d1 = 1e-6 * L;
  const double power =
      std::log(s.damping()(L - d1) / s.damping()(L - delta)) / std::log(d1 / delta);
  const double bulk = integrate_reciprocal_rate(s, y_from, L - delta);
  const double tail = delta / (s.k() * L * s.damping()(L - delta) * (1.0 - power));
  return {bulk + tail, true};
}

InflectionPoint inflection_of(const OdeSigmoid& s) {
  const double L = s.L();
  const double y0 = numeric::golden_section_maximize(
      [&s](double y) { return s.damping()(y) * y; }, 0.0, L, 1e-10 * L);
  return {time_to_reach(s, s.y_at_zero(), y0).time, y0};
}

std::vector<double> finite_difference_derivative(const TimeSeries& series) {
  const auto t = series.times();
  const auto y = series.values();
  const std::size_t n = series.size();
  if (n < 2) throw std::invalid_argument("finite_difference_derivative: need at least 2 samples");
  std::vector<double> d(n);
  d[0] = (y[1] - y[0]) / (t[1] - t[0]);
  d[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = t[i] - t[i - 1];
    const double hp = t[i + 1] - t[i];
    d[i] = (hm * hm * (y[i + 1] - y[i]) + hp * hp * (y[i] - y[i - 1])) / (hm * hp * (hm + hp));
  }
  return d;
}

std::vector<DampingEstimate> recover_damping(const TimeSeries& series, double k) {
  if (series.size() < 3) throw std::invalid_argument("recover_damping: need at least 3 samples");
  if (!(k > 0.0)) throw std::invalid_argument("recover_damping: k must be positive");
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(series.value(i) > 0.0)) {
      throw std::domain_error("recover_damping: non-positive sample at index " + std::to_string(i));
    }
  }
  const auto slope = finite_difference_derivative(series);
  std::vector<DampingEstimate> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = series.value(i);
    out.push_back({y, slope[i] / (k * y)});
  }
  return out;
}

}  // namespace sigmoids
