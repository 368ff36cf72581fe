#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigmoids/curves.hpp"
#include "sigmoids/damping.hpp"
#include "sigmoids/time_series.hpp"

namespace sigmoids {

enum class ClauseStatus { Pass, Fail, Indeterminate };

[[nodiscard]] std::string_view to_string(ClauseStatus status);

struct ClauseResult {
  int item;  // clause number in the formal sigmoid definition
  std::string name;
  ClauseStatus status;
  std::string detail;
};

/// Numerically checkable clauses of the formal sigmoid definition:
///   2  0 < y < L everywhere
///   3  y -> 0 on the left and y -> L on the right (at the grid ends)
///   4  strictly increasing
///   6  y' has a unique local maximum (at t0, when t0 is given)
///   7  y' -> 0 at both ends
///   8  y'/y -> k over the earliest tenth of the grid
/// A clause the data cannot decide is Indeterminate, never Pass.
struct PropertyReport {
  std::vector<ClauseResult> clauses;

  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] bool any_fail() const;
  [[nodiscard]] const ClauseResult& item(int number) const;
  [[nodiscard]] std::string summary() const;
};

struct SigmoidExpectation {
  double L;
  std::optional<double> k;
  std::optional<double> t0;
};

struct VerificationTolerances {
  double level_limit = 1e-3;   // |y - limit| / L at the grid ends
  double rate_limit = 1e-2;    // y' / max y' at the grid ends
  double growth_rate = 1e-2;   // |y'/y - k| / k over the earliest tenth
  std::size_t min_points = 5;
};

// Series with known derivative samples (same length as the series).
[[nodiscard]] PropertyReport verify_sigmoid(const TimeSeries& series,
                                            std::span<const double> derivative,
                                            const SigmoidExpectation& expected,
                                            const VerificationTolerances& tol = {});

// Series only; the derivative is estimated by finite differences.
[[nodiscard]] PropertyReport verify_sigmoid(const TimeSeries& series,
                                            const SigmoidExpectation& expected,
                                            const VerificationTolerances& tol = {});

// Closed form on a dense grid spanning levels 1e-5 L .. (1 - 1e-5) L, with the
// analytic derivative. L and t0 are those of the curve.
[[nodiscard]] PropertyReport verify_sigmoid(const SigmoidSpec& spec, std::optional<double> k,
                                            const VerificationTolerances& tol = {});

// integrate() output over the same level span, derivative k H(y) y; k, L and t0
// are taken from the model.
[[nodiscard]] PropertyReport verify_sigmoid(const OdeSigmoid& model,
                                            const VerificationTolerances& tol = {});

// Exponential rate parameter of a closed form: beta for Logistic and Gompertz,
// alpha * beta for the symmetric families.
[[nodiscard]] double nominal_growth_rate(const SigmoidSpec& spec);

// Grid used by the OdeSigmoid overload: uniform from level 1e-5 L over a window
// symmetric about the inflection time, then geometrically stretched out to
// (1 - 1e-5) L.
[[nodiscard]] std::vector<double> verification_grid(const OdeSigmoid& model);

}  // namespace sigmoids
