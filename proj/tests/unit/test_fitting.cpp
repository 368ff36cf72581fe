#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <doctest.h>

#include "sigmoids/contagion.hpp"
#include "sigmoids/damping.hpp"
#include "sigmoids/fitting.hpp"

using namespace sigmoids;

namespace {

TimeSeries sample(const SigmoidSpec& s, const std::vector<double>& t) {
  std::vector<double> y;
  for (const double x : t) y.push_back(eval(s, x));
  return {t, y};
}

double logistic(double L, double k, double t0, double t) { return L / (1.0 + std::exp(-k * (t - t0))); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("fit_ls recovers identifiable noise-free data") {
  const auto truth = SigmoidSpec::logistic(2.0, 0.8, 1.0);
  const auto data = sample(truth, linspace(1.0 - 5.0 / 0.8, 1.0 + 5.0 / 0.8, 41));
  const auto f = fit_ls(data, SigmoidFamily::Logistic);
  CHECK(f.converged);
  CHECK(f.spec.L() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f.spec.beta() == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(f.spec.shift() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.rmse < 1e-8);
  CHECK(f.bounds_hit.empty());

  SUBCASE("other families") {
    for (const auto fam : {SigmoidFamily::Gompertz, SigmoidFamily::ErrorFunction, SigmoidFamily::Algebraic}) {
      const SigmoidSpec g(fam, 3.0, 1.0, 0.6, -2.0);
      const auto d = sample(g, linspace(-12.0, 8.0, 61));
      const auto r = fit_ls(d, fam);
      CHECK(r.spec.L() == doctest::Approx(3.0).epsilon(1e-5));
      CHECK(r.spec.shift() == doctest::Approx(-2.0).epsilon(1e-5));
    }
  }
}

TEST_CASE("fit_ls rmse is recomputable and refitting does not worsen it") {
  const auto clean = sample(SigmoidSpec::logistic(1.0, 1.0, 0.0), linspace(-8.0, -1.0, 29));
  const auto data = add_noise(clean, {NoiseKind::Additive, 0.01}, 9);
  FitOptions o;
  o.seed = 4;
  const auto f = fit_ls(data, SigmoidFamily::Logistic, o);
  double sse = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = data.value(i) - logistic(f.spec.L(), f.spec.beta(), f.spec.shift(), data.time(i));
    sse += r * r;
  }
  CHECK(std::abs(std::sqrt(sse / data.size()) - f.rmse) < 1e-12);
  CHECK(rmse(f.spec, data) == doctest::Approx(f.rmse).epsilon(1e-14));

  FitOptions again = o;
  again.extra_starts = {{f.spec.L(), f.spec.beta(), f.spec.shift()}};
  CHECK(fit_ls(data, SigmoidFamily::Logistic, again).rmse <= f.rmse + 1e-15);

  CHECK(fit_ls(data, SigmoidFamily::Logistic, o).spec == f.spec);
}

TEST_CASE("fit_ls cannot see the plateau of a pure exponential prefix") {
  const OdeSigmoid m(DampingSpec::piecewise_linear(5.0), 1.0, 0.01);
  const auto grid = linspace(0.0, 10.0, 201);
  const auto full = integrate(m, grid).series;
  const auto prefix = full.up_to(time_to_reach(m, 0.01, 0.25).time);
  const auto f = fit_ls(prefix, SigmoidFamily::Logistic);
  CHECK(f.rmse < 1e-3);
  // Below y = L/2 the data carry no curvature, so L runs off far past 2*y_last
  // and says nothing about the true 5.
  CHECK(f.spec.L() > 10.0 * prefix.value(prefix.size() - 1));
  CHECK(std::abs(f.spec.L() - 5.0) > 1.0);
}

TEST_CASE("fit_ls on degenerate input") {
  const TimeSeries flat({0, 1, 2, 3}, {0.4, 0.4, 0.4, 0.4});
  const auto f = fit_ls(flat, SigmoidFamily::Logistic);
  CHECK(f.degenerate_input);
  CHECK((!f.converged || !f.bounds_hit.empty()));

  CHECK_THROWS_AS((void)fit_ls(TimeSeries({0, 1, 2}, {0.1, 0.2, 0.3}), SigmoidFamily::Logistic),
                  std::invalid_argument);
  FitOptions w;
  w.weights = {1.0, 1.0};
  CHECK_THROWS_AS((void)fit_ls(flat, SigmoidFamily::Logistic, w), std::invalid_argument);
  FitOptions b;
  b.bounds = ParameterBounds{{1.0, 1.0, 0.0}, {0.5, 2.0, 1.0}};
  CHECK_THROWS_AS((void)fit_ls(flat, SigmoidFamily::Logistic, b), std::invalid_argument);
}

TEST_CASE("default bounds") {
  const auto data = sample(SigmoidSpec::logistic(1.0, 1.0, 0.0), linspace(-6.0, -1.0, 21));
  const auto b = default_bounds(data);
  const double ymax = data.value(data.size() - 1);
  CHECK(b.lo[0] > ymax);
  CHECK(b.hi[0] == doctest::Approx(50.0 * ymax));
  CHECK(b.lo[1] > 0.0);
  CHECK(b.lo[2] == doctest::Approx(-11.0));
  CHECK(b.hi[2] == doctest::Approx(14.0));
}

TEST_CASE("fit respects explicit bounds and reports active ones") {
  const auto data = sample(SigmoidSpec::logistic(1.0, 1.0, 0.0), linspace(-6.0, 6.0, 25));
  FitOptions o;
  o.bounds = ParameterBounds{{0.2, 0.1, -5.0}, {0.8, 5.0, 5.0}};
  const auto f = fit_ls(data, SigmoidFamily::Logistic, o);
  CHECK(f.spec.L() <= 0.8);
  CHECK(f.bounds_hit.count("L") == 1);
}

TEST_CASE("error surface") {
  const auto data = sample(SigmoidSpec::logistic(1.0, 1.0, 0.0), linspace(-6.0, 6.0, 49));
  const auto Lg = linspace(0.5, 1.5, 11), tg = linspace(-1.0, 1.0, 11);
  const auto s = error_surface(data, Lg, tg, KPolicy::fixed_k(1.0));
  CHECK(s.rows() == 11);
  CHECK(s.cols() == 11);
  Eigen::Index r, c;
  CHECK(s.minCoeff(&r, &c) < 1e-12);
  CHECK(r == 5);
  CHECK(c == 5);
  CHECK(s(2, 7) == doctest::Approx(rmse(SigmoidSpec::logistic(Lg[2], 1.0, tg[7]), data)).epsilon(1e-13));

  SUBCASE("inner minimisation over k") {
    const auto kc = best_k(data, 1.0, 0.0, KPolicy::bracket(0.05, 5.0));
    CHECK(kc.k == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(kc.rmse < 1e-8);
    const auto free = error_surface(data, Lg, tg, KPolicy::bracket(0.05, 5.0));
    CHECK((free.array() <= s.array() + 1e-10).all());
    // The continuous optimum cannot lose to the grid.
    CHECK(free.minCoeff() >= fit_ls(data, SigmoidFamily::Logistic).rmse - 1e-12);
  }
  CHECK_THROWS_AS((void)error_surface(data, Lg, tg, KPolicy::bracket(2.0, 1.0)), std::invalid_argument);
}

TEST_CASE("prior axes") {
  PriorSpec p;
  CHECK(p.k_axis().size() == 201);
  CHECK(p.L_axis().size() == 101);
  CHECK(p.t0_axis().size() == 401);
  CHECK(p.L_axis().front() == 0.0);
  CHECK(p.L_axis().back() == doctest::Approx(2.0));
  p.known_k = 1.013;
  REQUIRE(p.k_axis().size() == 1);
  CHECK(p.k_axis()[0] == doctest::Approx(1.02));
  PriorSpec bad;
  bad.L_range = {1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = PriorSpec{};
  bad.step = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("grid posterior matches a brute-force evaluation") {
  PriorSpec p;
  p.k_range = {0.5, 1.5};
  p.L_range = {0.5, 1.5};
  p.t0_range = {-1.0, 1.0};
  p.step = 0.25;
  p.noise_sigma = 0.05;
  const TimeSeries data({-3, -2, -1}, {0.06, 0.11, 0.3});
  const auto g = bayes_update(data, p);
  const auto ks = p.k_axis(), Ls = p.L_axis(), ts = p.t0_axis();

  std::vector<double> w;
  double total = 0.0;
  for (const double k : ks) {
    for (const double L : Ls) {
      for (const double t0 : ts) {
        double sse = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
          const double r = data.value(i) - logistic(L, k, t0, data.time(i));
          sse += r * r;
        }
        w.push_back(std::exp(-sse / (2 * 0.05 * 0.05)));
        total += w.back();
      }
    }
  }
  std::size_t n = 0;
  for (std::size_t ik = 0; ik < ks.size(); ++ik)
    for (std::size_t iL = 0; iL < Ls.size(); ++iL)
      for (std::size_t it = 0; it < ts.size(); ++it)
        CHECK(g.probability(ik, iL, it) == doctest::Approx(w[n++] / total).epsilon(1e-9));

  double sum = 0.0;
  for (const double lw : g.log_weights()) sum += std::exp(lw);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  const auto mL = g.marginal_L();
  CHECK(std::accumulate(mL.begin(), mL.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));

  const LogisticGridPosterior fast(p, {-3, -2, -1});
  const auto s1 = fast.summarize(data.values());
  const auto s2 = g.summary();
  CHECK(s1.L.mean == doctest::Approx(s2.L.mean).epsilon(1e-9));
  CHECK(s1.k.sd == doctest::Approx(s2.k.sd).epsilon(1e-9));
  CHECK(s1.t0.mode == s2.t0.mode);
}

TEST_CASE("posterior flattens when the noise is huge") {
  PriorSpec p;
  p.step = 0.1;
  p.noise_sigma = 100.0;
  const auto g = bayes_update(TimeSeries({-5, -4, -3, -2, -1}, {0.0, 0.02, 0.05, 0.12, 0.27}), p);
  const double uniform = 1.0 / static_cast<double>(g.log_weights().size());
  double worst = 0.0;
  for (const double lw : g.log_weights()) worst = std::max(worst, std::abs(std::exp(lw) - uniform));
  CHECK(worst < 1e-6);
  CHECK(worst < 1e-2 * uniform);
}

TEST_CASE("a sample on a grid curve puts the mode on that slice") {
  PriorSpec p;
  p.step = 0.1;
  p.noise_sigma = 1e-4;
  p.known_k = 1.0;
  const double L = 1.3, t0 = 0.4;
  const TimeSeries one({0.4}, {logistic(L, 1.0, t0, 0.4)});
  const auto s = bayes_update(one, p).summary();
  // y(t0) = L/2 picks out every (L, t0) with L/(1 + e^{t0 - 0.4}) = 0.65.
  CHECK(s.L.mode / (1.0 + std::exp(s.t0.mode - 0.4)) == doctest::Approx(0.65).epsilon(1e-3));
}

TEST_CASE("known-k replication") {
  SUBCASE("noise-free single trial") {
    ReplicationConfig c;
    c.n_reps = 1;
    c.sample_sigma = 0.0;
    const auto r = replicate_known_k_experiment(c);
    CHECK(std::abs(r.mean_mode_L_known_k - 1.0) <= 0.02 + 1e-12);
  }
  SUBCASE("small replication keeps the direction of the effect") {
    ReplicationConfig c;
    c.n_reps = 60;
    c.seed = 17;
    const auto r = replicate_known_k_experiment(c);
    CHECK(r.trials.size() == 60);
    CHECK(std::abs(r.mean_L_known_k - 1.0) < std::abs(r.mean_L_unknown_k - 1.0));
    CHECK(r.mean_L_unknown_k < 1.0);
    CHECK(r.share_known_not_wider > 0.8);
    // Trials are independent of the rest of the batch.
    ReplicationConfig d = c;
    d.n_reps = 3;
    CHECK(replicate_known_k_experiment(d).trials[2].values == r.trials[2].values);
  }
  ReplicationConfig bad;
  bad.n_reps = 0;
  CHECK_THROWS_AS((void)replicate_known_k_experiment(bad), std::invalid_argument);
}

TEST_CASE("weight schemes") {
  const std::vector<double> t{0, 1, 2, 3, 4};
  for (const double w : scheme_weights({WeightKind::Uniform, std::nullopt}, t)) CHECK(w == 1.0);
  const auto lin = scheme_weights({WeightKind::LinearRecency, std::nullopt}, t);
  for (std::size_t i = 1; i < lin.size(); ++i) CHECK(lin[i] > lin[i - 1]);
  CHECK(lin.back() == doctest::Approx(1.0));
  const auto ex = scheme_weights({WeightKind::ExponentialRecency, 2.0}, t);
  CHECK(ex.back() == doctest::Approx(1.0));
  CHECK(ex[2] == doctest::Approx(0.5));
  CHECK(ex[0] == doctest::Approx(0.25));
  CHECK_THROWS_AS((void)scheme_weights({WeightKind::ExponentialRecency, 0.0}, t), std::invalid_argument);
  CHECK(parse_weight_kind("linear-recency") == WeightKind::LinearRecency);
  CHECK_THROWS((void)parse_weight_kind("triangular"));
}

TEST_CASE("Modis weighted fit") {
  SUBCASE("identifiable data: every scheme agrees") {
    const auto data = sample(SigmoidSpec::logistic(1.0, 1.0, 0.0), linspace(-6.0, 6.0, 49));
    const auto schemes = default_weight_schemes();
    const auto sel = modis_weighted_fit(data, schemes);
    REQUIRE(sel.candidates.size() == schemes.size());
    for (const auto& c : sel.candidates) CHECK(c.spec.L() == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("selected L dominates the uniform fit") {
    const OdeSigmoid m(DampingSpec::piecewise_linear(5.0), 1.0, 0.01);
    const auto grid = linspace(0.0, 5.0, 51);
    const auto clean = integrate(m, grid).series;
    const std::vector<WeightScheme> schemes{{WeightKind::Uniform, std::nullopt},
                                            {WeightKind::LinearRecency, std::nullopt},
                                            {WeightKind::ExponentialRecency, std::nullopt}};
    std::vector<double> sel_L, uni_L;
    for (int s = 0; s < 100; ++s) {
      const auto noisy = add_noise(clean, {NoiseKind::Multiplicative, 0.02}, 300 + s);
      FitOptions o;
      o.seed = s;
      o.n_starts = 6;
      const auto r = modis_weighted_fit(noisy, schemes, SigmoidFamily::Logistic, o);
      CHECK(r.selected.spec.L() >= r.candidates[0].spec.L());
      sel_L.push_back(r.selected.spec.L());
      uni_L.push_back(r.candidates[0].spec.L());
    }
    CHECK(median(sel_L) >= median(uni_L));
  }
  const auto data = sample(SigmoidSpec::logistic(1.0, 1.0, 0.0), linspace(-6.0, 6.0, 49));
  const std::vector<WeightScheme> one{{WeightKind::Uniform, std::nullopt}};
  CHECK_THROWS_AS((void)modis_weighted_fit(data, one), std::invalid_argument);
}

TEST_CASE("symmetric completion") {
  const auto t = linspace(-8.0, 0.0, 801);
  const auto prefix = sample(SigmoidSpec::logistic(1.0, 1.0, 0.0), t);
  const auto sc = symmetric_completion(prefix, 0.0);
  CHECK(sc.y0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sc.L_estimate == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < sc.continuation.size(); ++i) {
    const double x = sc.continuation.time(i);
    CHECK(x > 0.0);
    CHECK(std::abs(sc.continuation.value(i) - logistic(1, 1, 0, x)) < 1e-6);
  }
  // Reflecting the continuation again gives back the prefix.
  for (std::size_t i = 0; i < sc.continuation.size(); ++i) {
    const double back_t = -sc.continuation.time(i), back_y = 1.0 - sc.continuation.value(i);
    CHECK(std::abs(back_y - prefix.interpolate(back_t)) < 1e-9);
  }
  CHECK(symmetric_completion(prefix, -1.0, 0.5).L_estimate == 1.0);
  CHECK_THROWS_AS((void)symmetric_completion(prefix, 2.0), std::invalid_argument);

  SUBCASE("asymmetric curves are caught out") {
    const SigmoidSpec g(SigmoidFamily::Gompertz, 1.0, 1.0, 1.0, 0.0);
    const auto gp = sample(g, linspace(-4.0, 0.0, 401));
    const auto c = symmetric_completion(gp, inflection(g).t0);
    CHECK(c.L_estimate == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-9));
    CHECK(std::abs(c.L_estimate - 1.0) > 0.1);
  }
}

TEST_CASE("herd immunity ceiling") {
  CHECK(herd_immunity_limit(1000.0, 2.0) == doctest::Approx(500.0));
  CHECK(herd_immunity_limit(1000.0, 1e12) == doctest::Approx(1000.0));
  CHECK(herd_immunity_limit(7.8e9, 3.0) == doctest::Approx(5.2e9));
  CHECK_THROWS_AS((void)herd_immunity_limit(1000.0, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)herd_immunity_limit(-1.0, 2.0), std::domain_error);
}

TEST_CASE("bound report") {
  FitResult f;
  f.spec = SigmoidSpec::logistic(1.0, 1.0, 0.0);
  const auto a = bound_report(f, TimeSeries({0, 1}, {0.3, 0.51}), DampingBelief::LinearOrFaster);
  CHECK(a.doubling_artifact_suspected);
  CHECK(a.label == "lower bound");
  CHECK(a.doubling_ratio == doctest::Approx(0.02));
  CHECK_FALSE(a.below_one_third);
  const auto b = bound_report(f, TimeSeries({0, 1}, {0.1, 0.2}), DampingBelief::FastEarlyDamping);
  CHECK(b.below_one_third);
  CHECK(b.label == "upper bound");
  CHECK_FALSE(b.doubling_artifact_suspected);
  CHECK(bound_report(f, TimeSeries({0, 1}, {0.1, 0.2}), DampingBelief::Unknown).label == "unlabeled");
  CHECK(parse_damping_belief("fast-early-damping") == DampingBelief::FastEarlyDamping);
  CHECK_THROWS((void)parse_damping_belief("maybe"));
}
