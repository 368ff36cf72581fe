#include "sigmoids/curves.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sigmoids {

namespace {

void require_finite_time(double t) {
  if (!std::isfinite(t)) throw std::domain_error("sigmoid evaluated at non-finite time");
}

// Logistic fraction 1 / (1 + exp(z)) without overflow.
double logistic_fraction(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double scaled_argument(const SigmoidSpec& s, double t) {
  return s.alpha() * s.beta() * (t - s.shift());
}

}  // namespace

std::string_view to_string(SigmoidFamily family) {
  switch (family) {
    case SigmoidFamily::Logistic: return "logistic";
    case SigmoidFamily::Algebraic: return "algebraic";
    case SigmoidFamily::ErrorFunction: return "error-function";
    case SigmoidFamily::Gompertz: return "gompertz";
  }
  return "unknown";
}

SigmoidFamily parse_family(std::string_view name) {
  if (name == "logistic") return SigmoidFamily::Logistic;
  if (name == "algebraic") return SigmoidFamily::Algebraic;
  if (name == "error-function" || name == "erf") return SigmoidFamily::ErrorFunction;
  if (name == "gompertz") return SigmoidFamily::Gompertz;
  throw std::invalid_argument("unknown sigmoid family '" + std::string(name) +
                              "' (valid: logistic, algebraic, error-function, gompertz)");
}

SigmoidSpec::SigmoidSpec(SigmoidFamily family, double L, double alpha, double beta, double shift)
    : family_(family), L_(L), alpha_(alpha), beta_(beta), shift_(shift) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("SigmoidSpec: L must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("SigmoidSpec: alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("SigmoidSpec: beta must be positive");
  if (!std::isfinite(shift)) throw std::invalid_argument("SigmoidSpec: shift must be finite");
}

SigmoidSpec SigmoidSpec::logistic(double L, double k, double t0) {
  return {SigmoidFamily::Logistic, L, 1.0, k, t0};
}

double eval(const SigmoidSpec& s, double t) {
  require_finite_time(t);
  const double u = t - s.shift();
  switch (s.family()) {
    case SigmoidFamily::Logistic:
      return s.L() * logistic_fraction(std::log(s.alpha()) - s.beta() * u);
    case SigmoidFamily::Algebraic: {
      const double x = scaled_argument(s, t);
      const double r = std::hypot(1.0, x);
      // 1 + x/r == 1 / (r (r - x)) avoids cancellation for x << 0.
      if (x >= 0.0) return 0.5 * s.L() * (1.0 + x / r);
      return 0.5 * s.L() / (r * (r - x));
    }
    case SigmoidFamily::ErrorFunction:
      return 0.5 * s.L() * std::erfc(-scaled_argument(s, t));
    case SigmoidFamily::Gompertz:
      return s.L() * std::exp(-s.alpha() * std::exp(-s.beta() * u));
  }
  return 0.0;
}

double derivative(const SigmoidSpec& s, double t) {
  require_finite_time(t);
  const double u = t - s.shift();
  switch (s.family()) {
    case SigmoidFamily::Logistic: {
      const double z = std::log(s.alpha()) - s.beta() * u;
      return s.L() * s.beta() * logistic_fraction(z) * logistic_fraction(-z);
    }
    case SigmoidFamily::Algebraic: {
      const double x = scaled_argument(s, t);
      const double r = std::hypot(1.0, x);
      return 0.5 * s.L() * s.alpha() * s.beta() / (r * r * r);
    }
    case SigmoidFamily::ErrorFunction: {
      const double x = scaled_argument(s, t);
      return s.L() * s.alpha() * s.beta() * std::exp(-x * x) / std::sqrt(std::numbers::pi);
    }
    case SigmoidFamily::Gompertz: {
      // y * alpha * beta * exp(-beta u), done in log space: w = alpha exp(-beta u).
      const double log_w = std::log(s.alpha()) - s.beta() * u;
      return s.L() * s.beta() * std::exp(log_w - std::exp(log_w));
    }
  }
  return 0.0;
}

InflectionPoint inflection(const SigmoidSpec& s) {
  switch (s.family()) {
    case SigmoidFamily::Logistic:
      return {s.shift() + std::log(s.alpha()) / s.beta(), 0.5 * s.L()};
    case SigmoidFamily::Algebraic:
    case SigmoidFamily::ErrorFunction:
      return {s.shift(), 0.5 * s.L()};
    case SigmoidFamily::Gompertz:
      return {s.shift() + std::log(s.alpha()) / s.beta(), s.L() / std::numbers::e};
  }
  return {0.0, 0.0};
}

double time_at_level(const SigmoidSpec& s, double level) {
  if (!(level > 0.0 && level < s.L())) {
    throw std::domain_error("time_at_level: level must lie strictly inside (0, L)");
  }
  const double f = level / s.L();
  switch (s.family()) {
    case SigmoidFamily::Logistic:
      return s.shift() + (std::log(s.alpha()) - std::log(1.0 / f - 1.0)) / s.beta();
    case SigmoidFamily::Algebraic: {
      const double r = 2.0 * f - 1.0;
      return s.shift() + r / std::sqrt((1.0 - r) * (1.0 + r)) / (s.alpha() * s.beta());
    }
    case SigmoidFamily::ErrorFunction: {
      // erfc(-x) = 2f, monotone in x; bisect to full precision.
      double lo = -30.0, hi = 30.0;
      for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (std::erfc(-mid) < 2.0 * f ? lo : hi) = mid;
      }
      return s.shift() + 0.5 * (lo + hi) / (s.alpha() * s.beta());
    }
    case SigmoidFamily::Gompertz:
      return s.shift() + (std::log(s.alpha()) - std::log(-std::log(f))) / s.beta();
  }
  return 0.0;
}

}  // namespace sigmoids
