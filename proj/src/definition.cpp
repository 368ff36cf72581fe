#include "sigmoids/definition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sigmoids {

namespace {

constexpr double kEdgeLevel = 1e-5;

std::string format(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ClauseResult undecided(int item, std::string name, std::string why) {
  return {item, std::move(name), ClauseStatus::Indeterminate, std::move(why)};
}

ClauseResult decided(int item, std::string name, bool ok, std::string detail) {
  return {item, std::move(name), ok ? ClauseStatus::Pass : ClauseStatus::Fail, std::move(detail)};
}

}  // namespace

std::string_view to_string(ClauseStatus status) {
  switch (status) {
    case ClauseStatus::Pass: return "pass";
    case ClauseStatus::Fail: return "fail";
    case ClauseStatus::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

bool PropertyReport::all_pass() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const ClauseResult& c) { return c.status == ClauseStatus::Pass; });
}

bool PropertyReport::any_fail() const {
  return std::any_of(clauses.begin(), clauses.end(),
                     [](const ClauseResult& c) { return c.status == ClauseStatus::Fail; });
}

const ClauseResult& PropertyReport::item(int number) const {
  for (const auto& c : clauses) {
    if (c.item == number) return c;
  }
  throw std::out_of_range("PropertyReport: no clause " + std::to_string(number));
}

std::string PropertyReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i) os << "; ";
    os << clauses[i].item << ":" << to_string(clauses[i].status);
    if (clauses[i].status != ClauseStatus::Pass && !clauses[i].detail.empty()) {
      os << " (" << clauses[i].detail << ")";
    }
  }
  return os.str();
}

PropertyReport verify_sigmoid(const TimeSeries& series, std::span<const double> derivative,
                              const SigmoidExpectation& expected,
                              const VerificationTolerances& tol) {
  if (derivative.size() != series.size()) {
    throw std::invalid_argument("verify_sigmoid: derivative and series differ in length");
  }
  const auto t = series.times();
  const auto y = series.values();
  const std::size_t n = series.size();
  const double L = expected.L;
  PropertyReport report;

  if (n < tol.min_points) {
    const std::string why = "only " + std::to_string(n) + " samples";
    for (const auto& [item, name] :
         std::initializer_list<std::pair<int, const char*>>{{2, "bounded"},
                                                             {3, "limits"},
                                                             {4, "increasing"},
                                                             {6, "unique rate maximum"},
                                                             {7, "rate limits"},
                                                             {8, "early growth rate"}}) {
      report.clauses.push_back(undecided(item, name, why));
    }
    return report;
  }

  {
    std::size_t bad = n;
    for (std::size_t i = 0; i < n && bad == n; ++i) {
      if (!(y[i] > 0.0 && y[i] < L)) bad = i;
    }
    report.clauses.push_back(decided(
        2, "bounded", bad == n,
        bad == n ? "" : "y(" + format(t[bad]) + ") = " + format(y[bad]) + " outside (0, L)"));
  }

  {
    const double left = y.front() / L;
    const double right = 1.0 - y.back() / L;
    const bool ok = std::abs(left) <= tol.level_limit && std::abs(right) <= tol.level_limit;
    report.clauses.push_back(decided(
        3, "limits", ok,
        "y(first)/L = " + format(left) + ", 1 - y(last)/L = " + format(right)));
  }

  {
    std::size_t bad = n;
    for (std::size_t i = 1; i < n && bad == n; ++i) {
      if (!(y[i] > y[i - 1])) bad = i;
    }
    report.clauses.push_back(
        decided(4, "increasing", bad == n,
                bad == n ? "" : "not increasing at t = " + format(t[bad])));
  }

  {
    // Count rise-then-fall transitions of y', ignoring flat runs.
    int peaks = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const double diff = derivative[i] - derivative[i - 1];
      const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
      if (sign == 0) continue;
      if (last_sign == 1 && sign == -1) ++peaks;
      last_sign = sign;
    }
    const auto argmax = static_cast<std::size_t>(
        std::max_element(derivative.begin(), derivative.end()) - derivative.begin());
    bool ok = peaks == 1 && argmax > 0 && argmax + 1 < n;
    std::string detail = std::to_string(peaks) + " local maxima, argmax t = " + format(t[argmax]);
    if (ok && expected.t0) {
      const double spacing = std::max(t[argmax] - t[argmax - 1], t[argmax + 1] - t[argmax]);
      ok = std::abs(t[argmax] - *expected.t0) <= 2.0 * spacing + 1e-9 * std::abs(*expected.t0);
      detail += ", expected t0 = " + format(*expected.t0);
    }
    report.clauses.push_back(decided(6, "unique rate maximum", ok, detail));
  }

  {
    const double peak = *std::max_element(derivative.begin(), derivative.end());
    if (!(peak > 0.0)) {
      report.clauses.push_back(decided(7, "rate limits", false, "derivative never positive"));
    } else {
      const double left = std::abs(derivative.front()) / peak;
      const double right = std::abs(derivative.back()) / peak;
      report.clauses.push_back(decided(7, "rate limits",
                                       left <= tol.rate_limit && right <= tol.rate_limit,
                                       "y'(first)/max = " + format(left) +
                                           ", y'(last)/max = " + format(right)));
    }
  }

  {
    const std::size_t window = std::max<std::size_t>(3, n / 10);
    if (!expected.k) {
      report.clauses.push_back(undecided(8, "early growth rate", "no expected growth rate"));
    } else if (window > n) {
      report.clauses.push_back(undecided(8, "early growth rate", "series too short"));
    } else {
      const double k = *expected.k;
      double worst = 0.0;
      bool defined = true;
      for (std::size_t i = 0; i < window; ++i) {
        if (!(y[i] > 0.0)) {
          defined = false;
          break;
        }
        worst = std::max(worst, std::abs(derivative[i] / y[i] - k) / k);
      }
      report.clauses.push_back(
          defined ? decided(8, "early growth rate", worst <= tol.growth_rate,
                            "max |y'/y - k|/k = " + format(worst))
                  : decided(8, "early growth rate", false, "y'/y undefined (y <= 0)"));
    }
  }
  return report;
}

PropertyReport verify_sigmoid(const TimeSeries& series, const SigmoidExpectation& expected,
                              const VerificationTolerances& tol) {
  if (series.size() < 2) {
    const std::vector<double> none(series.size(), 0.0);
    return verify_sigmoid(series, none, expected, tol);
  }
  const auto d = finite_difference_derivative(series);
  return verify_sigmoid(series, d, expected, tol);
}

double nominal_growth_rate(const SigmoidSpec& spec) {
  switch (spec.family()) {
    case SigmoidFamily::Logistic:
    case SigmoidFamily::Gompertz:
      return spec.beta();
    case SigmoidFamily::Algebraic:
    case SigmoidFamily::ErrorFunction:
      return spec.alpha() * spec.beta();
  }
  return spec.beta();
}

PropertyReport verify_sigmoid(const SigmoidSpec& spec, std::optional<double> k,
                              const VerificationTolerances& tol) {
  const double lo = time_at_level(spec, kEdgeLevel * spec.L());
  const double hi = time_at_level(spec, (1.0 - kEdgeLevel) * spec.L());
  const auto grid = linspace(lo, hi, 4001);
  std::vector<double> values, rates;
  values.reserve(grid.size());
  rates.reserve(grid.size());
  for (const double t : grid) {
    values.push_back(eval(spec, t));
    rates.push_back(derivative(spec, t));
  }
  const TimeSeries series(grid, std::move(values));
  return verify_sigmoid(series, rates, {spec.L(), k, inflection(spec).t0}, tol);
}

std::vector<double> verification_grid(const OdeSigmoid& model) {
  const double L = model.L();
  const double y0 = model.y_at_zero();
  const double lo = time_to_reach(model, y0, kEdgeLevel * L).time;
  const double hi = time_to_reach(model, y0, (1.0 - kEdgeLevel) * L).time;
  // Uniform over a window symmetric about the inflection, so heavy upper tails
  // do not thin out the early part; geometric spacing beyond it.
  const double knee = std::min(hi, 2.0 * inflection_of(model).t0 - lo);

  constexpr std::size_t kBody = 3000, kTail = 1000;
  auto grid = linspace(lo, knee, kBody);
  if (knee >= hi) return grid;
  const double first_gap = (knee - lo) / static_cast<double>(kBody - 1);
  const double growth = std::pow((hi - knee) / first_gap, 1.0 / static_cast<double>(kTail - 1));
  double offset = first_gap;
  for (std::size_t j = 0; j < kTail; ++j, offset *= growth) {
    const double t = j + 1 == kTail ? hi : knee + offset;
    if (t > grid.back()) grid.push_back(t);
  }
  return grid;
}

PropertyReport verify_sigmoid(const OdeSigmoid& model, const VerificationTolerances& tol) {
  const auto grid = verification_grid(model);
  const Trajectory path = integrate(model, grid);
  std::vector<double> rates;
  rates.reserve(grid.size());
  for (const double y : path.series.values()) rates.push_back(model.rate(y));
  const InflectionPoint ip = inflection_of(model);
  return verify_sigmoid(path.series, rates, {model.L(), model.k(), ip.t0}, tol);
}

}  // namespace sigmoids
