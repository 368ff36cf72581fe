#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "sigmoids/definition.hpp"

using namespace sigmoids;

namespace {

ClauseStatus status(const PropertyReport& r, int item) { return r.item(item).status; }

TimeSeries logistic_samples(double lo, double hi, std::size_t n) {
  const auto t = linspace(lo, hi, n);
  std::vector<double> y;
  for (const double x : t) y.push_back(1.0 / (1.0 + std::exp(-x)));
  return {t, y};
}

}  // namespace

TEST_CASE("closed-form logistic passes every clause") {
  const auto r = verify_sigmoid(SigmoidSpec::logistic(2.0, 1.5, 1.0), 1.5);
  CHECK(r.all_pass());
  CHECK(r.clauses.size() == 6);
  for (const int item : {2, 3, 4, 6, 7, 8}) CHECK(r.item(item).item == item);
}

TEST_CASE("ODE sigmoids of every kind pass every clause") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> L(0.3, 5.0), k(0.3, 3.0), frac(0.001, 0.4);
  std::uniform_int_distribution<int> p(1, 10);
  std::uniform_real_distribution<double> slope(-5.0, -0.5);
  for (int i = 0; i < 5; ++i) {
    for (const auto& d : {DampingSpec::linear(L(rng)), DampingSpec::piecewise_linear(L(rng)),
                          DampingSpec::power_tail(L(rng), p(rng)),
                          DampingSpec::slope_tail(slope(rng), L(rng))}) {
      const OdeSigmoid m(d, k(rng), frac(rng) * d.asymptote());
      const auto r = verify_sigmoid(m);
      INFO(to_string(d.kind()), " ", r.summary());
      CHECK(r.all_pass());
    }
  }
}

TEST_CASE("closed forms whose early growth is not exponential fail item 8 only") {
  // y'/y tends to 0 (algebraic) or grows without bound (erf, Gompertz) as t -> -inf.
  for (const auto f : {SigmoidFamily::Algebraic, SigmoidFamily::ErrorFunction, SigmoidFamily::Gompertz}) {
    const SigmoidSpec s(f, 1.0, 1.0, 1.0, 0.0);
    const auto r = verify_sigmoid(s, nominal_growth_rate(s));
    INFO(to_string(f), " ", r.summary());
    CHECK(status(r, 8) == ClauseStatus::Fail);
    for (const int item : {2, 3, 4, 6, 7}) CHECK(status(r, item) == ClauseStatus::Pass);
  }
}

TEST_CASE("violations are detected") {
  SUBCASE("decreasing series") {
    const auto t = linspace(0.1, 5.0, 50);
    std::vector<double> y;
    for (const double x : t) y.push_back(-x);
    const auto r = verify_sigmoid(TimeSeries(t, y), {1.0, std::nullopt, std::nullopt});
    CHECK(status(r, 2) == ClauseStatus::Fail);
    CHECK(status(r, 4) == ClauseStatus::Fail);
  }
  SUBCASE("overshoot above L") {
    auto s = logistic_samples(-12, 12, 200);
    std::vector<double> y(s.values().begin(), s.values().end());
    y[150] = 1.2;
    const auto r = verify_sigmoid(TimeSeries(std::vector<double>(s.times().begin(), s.times().end()), y),
                                  {1.0, 1.0, 0.0});
    CHECK(status(r, 2) == ClauseStatus::Fail);
    CHECK(status(r, 4) == ClauseStatus::Fail);
  }
  SUBCASE("window that stops before the plateau") {
    const auto r = verify_sigmoid(logistic_samples(-12, 1, 200), {1.0, 1.0, 0.0});
    CHECK(status(r, 3) == ClauseStatus::Fail);
    CHECK(status(r, 7) == ClauseStatus::Fail);
  }
  SUBCASE("wrong inflection time") {
    const auto r = verify_sigmoid(logistic_samples(-12, 12, 400), {1.0, 1.0, 3.0});
    CHECK(status(r, 6) == ClauseStatus::Fail);
  }
  SUBCASE("wrong growth rate") {
    const auto r = verify_sigmoid(logistic_samples(-12, 12, 400), {1.0, 2.0, 0.0});
    CHECK(status(r, 8) == ClauseStatus::Fail);
  }
  SUBCASE("two rate maxima") {
    const auto t = linspace(-10, 30, 800);
    std::vector<double> y;
    for (const double x : t) y.push_back(0.5 / (1 + std::exp(-x)) + 0.5 / (1 + std::exp(-(x - 15))));
    const auto r = verify_sigmoid(TimeSeries(t, y), {1.0, std::nullopt, std::nullopt});
    CHECK(status(r, 6) == ClauseStatus::Fail);
  }
}

TEST_CASE("undecidable clauses are indeterminate") {
  const auto few = verify_sigmoid(logistic_samples(-1, 1, 3), {1.0, 1.0, 0.0});
  for (const auto& c : few.clauses) CHECK(c.status == ClauseStatus::Indeterminate);
  CHECK_FALSE(few.all_pass());
  CHECK_FALSE(few.any_fail());

  const auto no_k = verify_sigmoid(logistic_samples(-12, 12, 400), {1.0, std::nullopt, 0.0});
  CHECK(status(no_k, 8) == ClauseStatus::Indeterminate);
  CHECK(status(no_k, 2) == ClauseStatus::Pass);
}

TEST_CASE("ODE verification grid spans the level range") {
  const OdeSigmoid m(DampingSpec::power_tail(1.0, 10), 1.0, 0.01);
  const auto g = verification_grid(m);
  CHECK(g.size() >= 3000);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  const auto tr = integrate(m, g);
  CHECK(tr.series.value(0) < 1e-4);
  CHECK(tr.series.value(g.size() - 1) > 1.0 - 1e-4);
}

TEST_CASE("nominal growth rate") {
  CHECK(nominal_growth_rate(SigmoidSpec(SigmoidFamily::Logistic, 1, 2, 3, 0)) == 3.0);
  CHECK(nominal_growth_rate(SigmoidSpec(SigmoidFamily::Gompertz, 1, 2, 3, 0)) == 3.0);
  CHECK(nominal_growth_rate(SigmoidSpec(SigmoidFamily::Algebraic, 1, 2, 3, 0)) == 6.0);
}
