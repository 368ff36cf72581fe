#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "sigmoids/contagion.hpp"
#include "sigmoids/damping.hpp"

using namespace sigmoids;

namespace {

double logistic_ivp(double L, double k, double y0, double t) {
  return L / (1.0 + (L / y0 - 1.0) * std::exp(-k * t));
}

double max_abs_gap(const TimeSeries& a, const TimeSeries& b, double below) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.value(i) < below && b.value(i) < below) gap = std::max(gap, std::abs(a.value(i) - b.value(i)));
  }
  return gap;
}

}  // namespace

TEST_CASE("damping shapes") {
  CHECK(DampingSpec::linear(2.0)(1.0) == doctest::Approx(0.5));
  const auto pw = DampingSpec::piecewise_linear(1.0);
  CHECK(pw(0.25) == 1.0);
  CHECK(pw(0.75) == doctest::Approx(0.5));
  CHECK(pw(1.0) == doctest::Approx(0.0));
  CHECK(pw.breakpoint().value() == doctest::Approx(0.5));
  CHECK(DampingSpec::power_tail(1.0, 2)(0.75) == doctest::Approx(0.25));
  CHECK(DampingSpec::power_tail(1.0, 10)(0.4) == 1.0);
  CHECK(DampingSpec::slope_tail(-2.0)(0.75) == doctest::Approx(0.5));

  SUBCASE("slope-tail asymptote is 1/2 - 1/s") {
    for (const double s : {-1.0, -1.5, -2.0, -3.0}) {
      const auto d = DampingSpec::slope_tail(s);
      CHECK(d.asymptote() == doctest::Approx(0.5 - 1.0 / s));
      CHECK(std::abs(d(d.asymptote())) < 1e-12);
    }
    CHECK(DampingSpec::slope_tail(-1.0).asymptote() == doctest::Approx(1.5));
  }
  SUBCASE("every kind: H(0) = 1, non-increasing, zero at L") {
    for (const auto& d : {DampingSpec::linear(3.0), DampingSpec::piecewise_linear(0.5),
                          DampingSpec::power_tail(2.0, 3), DampingSpec::slope_tail(-1.5, 2.0)}) {
      CHECK(d(0.0) == 1.0);
      double prev = 1.0;
      for (int i = 1; i <= 1000; ++i) {
        const double h = d(d.asymptote() * i / 1000.0);
        CHECK(h <= prev + 1e-15);
        prev = h;
      }
      CHECK(std::abs(d(d.asymptote())) < 1e-12);
    }
  }
  SUBCASE("with_scale keeps the kind") {
    const auto d = DampingSpec::power_tail(1.0, 3).with_scale(4.0);
    CHECK(d.kind() == DampingKind::PowerTail);
    CHECK(d.exponent() == 3);
    CHECK(d.asymptote() == doctest::Approx(4.0));
  }
}

TEST_CASE("damping errors") {
  CHECK_THROWS_AS(DampingSpec::linear(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DampingSpec::power_tail(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(DampingSpec::slope_tail(0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)eval_damping(DampingSpec::linear(1.0), 1.5), std::domain_error);
  CHECK_THROWS_AS((void)parse_damping_kind("cubic"), std::invalid_argument);
  CHECK_THROWS_AS(DampingSpec::custom([](double y) { return 1.0 + y; }, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(OdeSigmoid(DampingSpec::linear(1.0), 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(OdeSigmoid(DampingSpec::linear(1.0), -1.0, 0.5), std::invalid_argument);
  const OdeSigmoid s(DampingSpec::linear(1.0), 1.0, 0.5);
  const std::vector<double> bad{0.0, 1.0, 0.5};
  CHECK_THROWS_AS((void)integrate(s, bad), std::invalid_argument);
  CHECK_THROWS_AS((void)time_to_reach(s, 0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS((void)time_to_reach(s, 0.5, 1.5), std::domain_error);
  for (const auto k : {DampingKind::Linear, DampingKind::PiecewiseLinear, DampingKind::PowerTail,
                       DampingKind::SlopeTail})
    CHECK(parse_damping_kind(to_string(k)) == k);
}

TEST_CASE("integrate: linear damping is the logistic") {
  const OdeSigmoid s(DampingSpec::linear(1.0), 1.0, 0.5);
  const std::vector<double> zero{0.0};
  CHECK(integrate(s, zero).series.value(0) == 0.5);

  const auto grid = linspace(-10.0, 10.0, 401);
  const auto tr = integrate(s, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(tr.series.value(i) - 1.0 / (1.0 + std::exp(-grid[i]))) < 1e-8);
  }

  SUBCASE("randomized parameters") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> L(0.2, 5.0), k(0.2, 3.0), frac(0.01, 0.99);
    for (int i = 0; i < 20; ++i) {
      const double Lv = L(rng), kv = k(rng), y0 = frac(rng) * Lv;
      const auto r = integrate(OdeSigmoid(DampingSpec::linear(Lv), kv, y0), grid);
      double worst = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j)
        worst = std::max(worst, std::abs(r.series.value(j) - logistic_ivp(Lv, kv, y0, grid[j])));
      CHECK(worst < 1e-8);
    }
  }
  SUBCASE("grid need not contain the anchor") {
    const std::vector<double> right{2.0, 3.0}, left{-4.0, -3.0};
    CHECK(integrate(s, right).series.value(1) == doctest::Approx(logistic_ivp(1, 1, 0.5, 3.0)).epsilon(1e-9));
    CHECK(integrate(s, left).series.value(0) == doctest::Approx(logistic_ivp(1, 1, 0.5, -4.0)).epsilon(1e-9));
  }
}

TEST_CASE("piecewise-linear solutions cannot be told apart below L/2") {
  const auto grid = linspace(0.0, 12.0, 1201);
  std::vector<TimeSeries> runs;
  for (const double L : {0.5, 1.0, 2.0, 5.0})
    runs.push_back(integrate(OdeSigmoid(DampingSpec::piecewise_linear(L), 1.0, 0.01), grid).series);
  for (std::size_t i = 1; i < runs.size(); ++i) CHECK(max_abs_gap(runs[0], runs[i], 0.25) < 1e-6);
  // And they do separate later.
  CHECK(runs[3].value(grid.size() - 1) - runs[0].value(grid.size() - 1) > 4.0);
}

TEST_CASE("power tails share a prefix and converge at ordered rates") {
  const auto grid = linspace(0.0, 20.0, 2001);
  std::vector<TimeSeries> runs;
  for (const int p : {1, 2, 3, 10})
    runs.push_back(integrate(OdeSigmoid(DampingSpec::power_tail(1.0, p), 1.0, 0.01), grid).series);
  for (std::size_t i = 1; i < runs.size(); ++i) CHECK(max_abs_gap(runs[0], runs[i], 0.5) < 1e-6);
  const std::size_t last = grid.size() - 1;
  for (std::size_t i = 1; i < runs.size(); ++i)
    CHECK(1.0 - runs[i].value(last) > 1.0 - runs[i - 1].value(last));
}

TEST_CASE("slope tails share a prefix and reach their own asymptotes") {
  const auto grid = linspace(0.0, 40.0, 801);
  std::vector<TimeSeries> runs;
  for (const double s : {-1.0, -1.5, -2.0, -3.0}) {
    const OdeSigmoid m(DampingSpec::slope_tail(s), 1.0, 0.01);
    runs.push_back(integrate(m, grid).series);
    CHECK(runs.back().value(grid.size() - 1) == doctest::Approx(0.5 - 1.0 / s).epsilon(1e-6));
  }
  for (std::size_t i = 1; i < runs.size(); ++i) CHECK(max_abs_gap(runs[0], runs[i], 0.5) < 1e-6);
}

TEST_CASE("time_to_reach") {
  const OdeSigmoid lin(DampingSpec::linear(1.0), 1.0, 0.5);
  CHECK(time_to_reach(lin, 0.5, 1.0 / (1.0 + std::exp(-1.0))).time == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(time_to_reach(lin, 0.3, 0.3).time == 0.0);
  CHECK(time_to_reach(lin, 0.7, 0.5).time < 0.0);
  const auto inf = time_to_reach(lin, 0.5, 1.0);
  CHECK(std::isinf(inf.time));
  CHECK_FALSE(inf.finite_arrival);

  const OdeSigmoid pw(DampingSpec::piecewise_linear(1.0), 1.0, 0.01);
  CHECK(time_to_reach(pw, 0.01, 0.25).time == doctest::Approx(std::log(25.0)).epsilon(1e-8));

  SUBCASE("closed-form logistic elapsed time") {
    const OdeSigmoid s(DampingSpec::linear(3.0), 0.8, 0.2);
    for (const double a : {0.1, 0.7, 1.5}) {
      for (const double b : {1.6, 2.2, 2.9}) {
        const double exact = std::log((b / (3.0 - b)) * ((3.0 - a) / a)) / 0.8;
        CHECK(time_to_reach(s, a, b).time == doctest::Approx(exact).epsilon(1e-9));
      }
    }
  }
  SUBCASE("finite arrival") {
    const auto d = DampingSpec::custom([](double y) { return std::sqrt(std::max(0.0, 1.0 - y)); }, 1.0);
    const OdeSigmoid s(d, 1.0, 0.5);
    const auto r = time_to_reach(s, 0.5, 1.0);
    CHECK(r.finite_arrival);
    CHECK(r.time == doctest::Approx(2.0 * std::atanh(std::sqrt(0.5))).epsilon(1e-6));
    const std::vector<double> grid{0.0, 0.5 * r.time, 2.0 * r.time, 3.0 * r.time};
    const auto tr = integrate(s, grid);
    CHECK(tr.finite_arrival);
    REQUIRE(tr.arrival_time.has_value());
    CHECK(*tr.arrival_time == doctest::Approx(r.time).epsilon(1e-5));
    CHECK(tr.series.value(2) == 1.0);
    CHECK(tr.series.value(3) == 1.0);
  }
}

TEST_CASE("round trip: integrating for time_to_reach lands on the target") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  const std::vector<DampingSpec> kinds{DampingSpec::linear(1.3), DampingSpec::piecewise_linear(2.0),
                                       DampingSpec::power_tail(1.0, 3), DampingSpec::slope_tail(-1.5)};
  for (const auto& d : kinds) {
    for (int i = 0; i < 10; ++i) {
      double a = u(rng) * d.asymptote(), b = u(rng) * d.asymptote();
      if (a > b) std::swap(a, b);
      const OdeSigmoid s(d, 0.9, a);
      const std::vector<double> t{time_to_reach(s, a, b).time};
      CHECK(std::abs(integrate(s, t).series.value(0) - b) < 1e-6);
    }
  }
}

TEST_CASE("inflection_of") {
  const auto lin = inflection_of(OdeSigmoid(DampingSpec::linear(1.0), 1.0, 0.5));
  CHECK(lin.y0 == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(lin.t0) < 1e-6);
  const auto pw = inflection_of(OdeSigmoid(DampingSpec::piecewise_linear(1.0), 1.0, 0.01));
  CHECK(pw.y0 == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(pw.t0 == doctest::Approx(std::log(50.0)).epsilon(1e-7));
  const auto off = inflection_of(OdeSigmoid(DampingSpec::linear(2.0), 1.5, 0.1));
  CHECK(off.t0 == doctest::Approx(std::log((2.0 - 0.1) / 0.1) / 1.5).epsilon(1e-7));
}

TEST_CASE("recover_damping") {
  const auto grid = linspace(-6.0, 6.0, 121);  // dt = 0.1
  std::vector<double> y;
  for (const double t : grid) y.push_back(1.0 / (1.0 + std::exp(-t)));
  const auto est = recover_damping(TimeSeries(grid, y), 1.0);
  REQUIRE(est.size() == grid.size());
  for (std::size_t i = 1; i + 1 < est.size(); ++i) CHECK(std::abs(est[i].H - (1.0 - est[i].y)) < 5e-3);

  const auto flat = recover_damping(TimeSeries(grid, std::vector<double>(grid.size(), 0.3)), 1.0);
  for (const auto& e : flat) CHECK(e.H == 0.0);

  CHECK_THROWS_AS((void)recover_damping(TimeSeries({0, 1, 2}, {0.1, 0.0, 0.2}), 1.0), std::domain_error);

  SUBCASE("additive noise hurts more than multiplicative at small y") {
    // Logistic rising through y ~ 0.1.
    const auto t = linspace(-3.5, -1.0, 26);
    std::vector<double> v;
    for (const double ti : t) v.push_back(1.0 / (1.0 + std::exp(-ti)));
    const TimeSeries clean(t, v);
    double add_err = 0.0, mul_err = 0.0;
    int add_wins = 0;
    for (int s = 0; s < 100; ++s) {
      double ea = 0.0, em = 0.0;
      const auto a = add_noise(clean, {NoiseKind::Additive, 0.05}, 1000 + s);
      const auto m = add_noise(clean, {NoiseKind::Multiplicative, 0.05}, 1000 + s);
      bool ok = true;
      for (const double x : a.values()) ok = ok && x > 0.0;
      if (!ok) { ++add_wins; continue; }  // additive noise can even go negative
      const auto ra = recover_damping(a, 1.0);
      const auto rm = recover_damping(m, 1.0);
      for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        ea += std::abs(ra[i].H - (1.0 - v[i]));
        em += std::abs(rm[i].H - (1.0 - v[i]));
      }
      add_err += ea;
      mul_err += em;
      if (ea > em) ++add_wins;
    }
    CHECK(add_err > 2.0 * mul_err);
    CHECK(add_wins >= 80);
  }
}

TEST_CASE("finite_difference_derivative is exact on quadratics") {
  const std::vector<double> t{0.0, 0.5, 1.5, 2.0, 3.5};
  std::vector<double> y;
  for (const double x : t) y.push_back(x * x);
  const auto d = finite_difference_derivative(TimeSeries(t, y));
  for (std::size_t i = 1; i + 1 < t.size(); ++i) CHECK(d[i] == doctest::Approx(2.0 * t[i]));
  CHECK_THROWS((void)finite_difference_derivative(TimeSeries({1.0}, {1.0})));
}
