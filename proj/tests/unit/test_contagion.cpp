#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "sigmoids/contagion.hpp"
#include "sigmoids/definition.hpp"

using namespace sigmoids;

namespace {

ContagionConfig blue() {
  ContagionConfig c;
  c.populations = {{0.5, 0.3, 1}, {0.5, 0.8, 1}};
  c.total_agents = 100000;
  c.initial_infected = 30;
  c.contact_rate = 2.8;
  c.horizon_days = 60;
  return c;
}

ContagionConfig red() {
  ContagionConfig c = blue();
  c.populations = {{0.5, 0.1, 1}, {0.5, 0.0, 10}};
  return c;
}

void check_cumulative(const TimeSeries& s, double bound) {
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.value(i) >= s.value(i - 1));
  CHECK(s.value(s.size() - 1) <= bound);
}

}  // namespace

TEST_CASE("config validation") {
  ContagionConfig c = blue();
  CHECK_NOTHROW(c.validate());
  c.populations[0].fraction = 0.7;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = blue();
  c.populations[1].immunity = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = blue();
  c.populations[1].incubation_days = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = blue();
  c.initial_infected = c.total_agents + 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = blue();
  c.contact_rate = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = blue();
  c.seed_population = 2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  ContagionConfig odd = blue();
  odd.total_agents = 101;
  const auto sizes = odd.population_sizes();
  CHECK(sizes.size() == 2);
  CHECK(sizes[0] + sizes[1] == 101);
}

TEST_CASE("trivial dynamics") {
  ContagionConfig c = blue();
  c.contact_rate = 0.0;
  for (const auto& s : {run_abm(c), run_meanfield(c)}) {
    CHECK(s.size() == 61);
    for (const double v : s.values()) CHECK(v == doctest::Approx(30.0));
  }
  c = blue();
  for (auto& p : c.populations) p.immunity = 1.0;
  const auto a = run_abm(c), m = run_meanfield(c);
  for (const double v : a.values()) CHECK(v == 30.0);
  for (const double v : m.values()) CHECK(v == doctest::Approx(30.0));
}

TEST_CASE("ABM is cumulative, bounded and reproducible") {
  for (const auto& cfg : {blue(), red()}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      ContagionConfig c = cfg;
      c.seed = seed;
      const auto a = run_abm(c);
      check_cumulative(a, static_cast<double>(c.total_agents));
      CHECK(a == run_abm(c));
      c.counting = CaseCounting::Onset;
      check_cumulative(run_abm(c), static_cast<double>(c.total_agents));
    }
    check_cumulative(run_meanfield(cfg), static_cast<double>(cfg.total_agents));
  }
  ContagionConfig a = blue(), b = blue();
  a.seed = 1;
  b.seed = 2;
  CHECK_FALSE(run_abm(a) == run_abm(b));
}

TEST_CASE("seeding a single population") {
  ContagionConfig c = red();
  c.seed_population = 1;
  c.horizon_days = 9;
  // Only incubating agents of population B: nobody can spread before day 10.
  const auto a = run_abm(c), m = run_meanfield(c);
  for (const double v : a.values()) CHECK(v == 30.0);
  for (const double v : m.values()) CHECK(v == doctest::Approx(30.0));
}

TEST_CASE("mean field early growth matches the linearized recursion") {
  // With one infectious day and one day of incubation, each case produces c
  // new cases one day later: growth factor c per day.
  ContagionConfig c;
  c.total_agents = 10000000;
  c.initial_infected = 10;
  c.contact_rate = 2.0;
  c.horizon_days = 12;
  const auto s = run_meanfield(c);
  const double rate = std::log(s.value(8) / s.value(7));
  CHECK(rate == doctest::Approx(std::log(2.0)).epsilon(0.02));

  // Incubation rho: new cases obey x(d) = c x(d - rho); dominant root of
  // z^rho = c is c^(1/rho).
  c.populations = {{1.0, 0.0, 3}};
  c.horizon_days = 40;
  const auto slow = run_meanfield(c);
  const double r3 = std::log(slow.value(30) / slow.value(27)) / 3.0;
  CHECK(r3 == doctest::Approx(std::log(2.0) / 3.0).epsilon(0.02));
}

TEST_CASE("mean field is a sigmoid once the seeds are removed") {
  ContagionConfig c = blue();
  c.horizon_days = 400;
  const auto s = run_meanfield(c);
  const double L = s.value(400) - 30.0;
  // Days 1..60; day 0 is exactly zero after the shift.
  std::vector<double> t, y;
  for (std::size_t d = 1; d <= 60; ++d) {
    t.push_back(s.time(d));
    y.push_back(s.value(d) - 30.0);
  }
  const auto r = verify_sigmoid(TimeSeries(t, y), {L, std::nullopt, std::nullopt});
  INFO(r.summary());
  CHECK(r.item(2).status == ClauseStatus::Pass);
  CHECK(r.item(4).status == ClauseStatus::Pass);
  CHECK(r.item(6).status == ClauseStatus::Pass);
}

TEST_CASE("ABM mean converges to the mean field") {
  const ContagionConfig c = blue();
  const auto mf = run_meanfield(c);
  const auto abm = run_abm_mean(c, 500);
  double dev = 0.0;
  for (std::size_t i = 0; i < mf.size(); ++i) dev = std::max(dev, std::abs(abm.value(i) - mf.value(i)));
  CHECK(dev / mf.value(mf.size() - 1) < 0.05);
}

TEST_CASE("two configurations agree early and diverge late") {
  const auto b = run_abm_mean(blue(), 200);
  const auto r = run_abm_mean(red(), 200);
  for (std::size_t d = 0; d <= 8; ++d) {
    INFO("day ", d);
    CHECK(std::abs(r.value(d) - b.value(d)) < 0.1 * b.value(d));
  }
  CHECK(r.value(60) > 2.0 * b.value(60));
}

TEST_CASE("noise") {
  const auto t = linspace(0, 1, 10000);
  const TimeSeries ones(t, std::vector<double>(t.size(), 1.0));
  CHECK(add_noise(ones, {NoiseKind::Additive, 0.0}, 1) == ones);

  auto sd = [](const TimeSeries& s) {
    const double m = std::accumulate(s.values().begin(), s.values().end(), 0.0) / s.size();
    double q = 0.0;
    for (const double v : s.values()) q += (v - m) * (v - m);
    return std::sqrt(q / (s.size() - 1));
  };
  const double a = sd(add_noise(ones, {NoiseKind::Additive, 0.05}, 2));
  CHECK(a >= 0.048);
  CHECK(a <= 0.052);
  const TimeSeries twos(t, std::vector<double>(t.size(), 2.0));
  CHECK(sd(add_noise(twos, {NoiseKind::Multiplicative, 0.05}, 3)) == doctest::Approx(0.1).epsilon(0.04));
  CHECK(add_noise(ones, {NoiseKind::Additive, 0.05}, 4) == add_noise(ones, {NoiseKind::Additive, 0.05}, 4));
  CHECK_THROWS_AS((void)add_noise(ones, {NoiseKind::Additive, -1.0}, 4), std::invalid_argument);
  CHECK(parse_noise_kind("multiplicative") == NoiseKind::Multiplicative);
  CHECK_THROWS((void)parse_noise_kind("laplace"));
}
