#pragma once

#include <string>
#include <string_view>

namespace sigmoids {

enum class SigmoidFamily { Logistic, Algebraic, ErrorFunction, Gompertz };

[[nodiscard]] std::string_view to_string(SigmoidFamily family);

// Accepts "logistic", "algebraic", "error-function" (or "erf"), "gompertz".
// Throws std::invalid_argument listing the valid names otherwise.
[[nodiscard]] SigmoidFamily parse_family(std::string_view name);

/// Closed-form sigmoid, evaluated at u = t - shift:
///
///   Logistic       L / (1 + alpha * exp(-beta * u))
///   Algebraic      (L/2) * (1 + x / sqrt(1 + x^2)),   x = alpha * beta * u
///   ErrorFunction  (L/2) * (1 + erf(x)),              x = alpha * beta * u
///   Gompertz       L * exp(-alpha * exp(-beta * u))
///
/// With L = alpha = beta = 1 and shift = 0 these are the textbook forms. For the
/// symmetric families alpha only rescales beta; for Logistic and Gompertz it is
/// equivalent to a translation by ln(alpha)/beta.
class SigmoidSpec {
 public:
  SigmoidSpec(SigmoidFamily family, double L, double alpha, double beta, double shift);

  // Logistic with growth rate k and inflection at t0 (alpha = 1).
  static SigmoidSpec logistic(double L, double k, double t0);

  [[nodiscard]] SigmoidFamily family() const noexcept { return family_; }
  [[nodiscard]] double L() const noexcept { return L_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] double shift() const noexcept { return shift_; }

  // Logistic growth rate in y' = k y (1 - y/L).
  [[nodiscard]] double k() const noexcept { return beta_; }

  [[nodiscard]] SigmoidSpec with_L(double L) const { return {family_, L, alpha_, beta_, shift_}; }
  [[nodiscard]] SigmoidSpec with_beta(double b) const { return {family_, L_, alpha_, b, shift_}; }
  [[nodiscard]] SigmoidSpec with_shift(double s) const { return {family_, L_, alpha_, beta_, s}; }

  friend bool operator==(const SigmoidSpec&, const SigmoidSpec&) = default;

 private:
  SigmoidFamily family_;
  double L_;
  double alpha_;
  double beta_;
  double shift_;
};

// Throws std::domain_error for non-finite t.
[[nodiscard]] double eval(const SigmoidSpec& spec, double t);
[[nodiscard]] double derivative(const SigmoidSpec& spec, double t);

struct InflectionPoint {
  double t0;
  double y0;
};

// Closed form per family: y0 = L/2, except Gompertz where y0 = L/e.
[[nodiscard]] InflectionPoint inflection(const SigmoidSpec& spec);

// Inverse of eval: the time at which the curve reaches `level` in (0, L).
[[nodiscard]] double time_at_level(const SigmoidSpec& spec, double level);

}  // namespace sigmoids
