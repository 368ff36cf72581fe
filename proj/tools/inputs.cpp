#include "inputs.hpp"

#include <algorithm>
#include <stdexcept>

#include "artifacts.hpp"

namespace sigmoids::cli {

namespace {

template <class F>
auto guarded(const Block& b, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    b.fail("", e.what());
  }
}

std::array<double, 2> range(const Block& b, const std::string& key, std::array<double, 2> fallback) {
  if (!b.has(key)) return fallback;
  const auto v = b.numbers(key);
  if (v.size() != 2) b.fail(key, "expected [lo, hi]");
  return {v[0], v[1]};
}

// Empirical plateau and inflection day of a cumulative-count series.
void contagion_truth(const TimeSeries& s, Dataset& d) {
  d.true_L = s.value(s.size() - 1);
  double best = -1.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double inc = s.value(i) - s.value(i - 1);
    if (inc > best) {
      best = inc;
      d.true_t0 = s.time(i);
    }
  }
}

}  // namespace

DampingSpec parse_damping(const Block& b) {
  b.only({"kind", "L", "exponent", "slope", "scale"});
  const DampingKind kind = guarded(b, [&] { return parse_damping_kind(b.text("kind")); });
  return guarded(b, [&] {
    switch (kind) {
      case DampingKind::Linear: return DampingSpec::linear(b.number("L"));
      case DampingKind::PiecewiseLinear: return DampingSpec::piecewise_linear(b.number("L"));
      case DampingKind::PowerTail:
        return DampingSpec::power_tail(b.number("L"), static_cast<int>(b.integer("exponent")));
      case DampingKind::SlopeTail:
        return DampingSpec::slope_tail(b.number("slope"), b.number("scale", 1.0));
      case DampingKind::Custom: break;
    }
    b.fail("kind", "custom damping cannot be configured from a file");
  });
}

SigmoidSpec parse_curve(const Block& b) {
  b.only({"family", "L", "alpha", "beta", "shift", "k", "t0"});
  const SigmoidFamily family =
      guarded(b, [&] { return parse_family(b.text("family", "logistic")); });
  return guarded(b, [&] {
    if (b.has("k") || b.has("t0")) {
      if (family != SigmoidFamily::Logistic) b.fail("k", "k and t0 apply to the logistic only");
      return SigmoidSpec::logistic(b.number("L", 1.0), b.number("k", 1.0), b.number("t0", 0.0));
    }
    return SigmoidSpec(family, b.number("L", 1.0), b.number("alpha", 1.0), b.number("beta", 1.0),
                       b.number("shift", 0.0));
  });
}

ContagionConfig parse_contagion(const Block& b, std::uint64_t seed) {
  b.only({"populations", "total_agents", "initial_infected", "contact_rate", "horizon_days",
          "counting", "seed_population", "name"});
  ContagionConfig c;
  c.populations.clear();
  for (const Block& p : b.list("populations")) {
    p.only({"fraction", "immunity", "incubation_days"});
    c.populations.push_back({p.number("fraction"), p.number("immunity", 0.0),
                             static_cast<int>(p.integer("incubation_days", 1))});
  }
  c.total_agents = b.integer("total_agents");
  c.initial_infected = b.integer("initial_infected");
  c.contact_rate = b.number("contact_rate");
  c.horizon_days = static_cast<int>(b.integer("horizon_days"));
  c.seed = seed;
  const std::string counting = b.text("counting", "infection");
  if (counting == "infection") {
    c.counting = CaseCounting::Infection;
  } else if (counting == "onset") {
    c.counting = CaseCounting::Onset;
  } else {
    b.fail("counting", "expected 'infection' or 'onset'");
  }
  if (b.has("seed_population")) {
    const auto p = b.integer("seed_population");
    if (p < 0) b.fail("seed_population", "must be a population index");
    c.seed_population = static_cast<std::size_t>(p);
  }
  guarded(b, [&] {
    c.validate();
    return 0;
  });
  return c;
}

PriorSpec parse_prior(const Block& b) {
  b.only({"k_range", "L_range", "t0_range", "step", "known_k", "noise_sigma"});
  PriorSpec p;
  p.k_range = range(b, "k_range", p.k_range);
  p.L_range = range(b, "L_range", p.L_range);
  p.t0_range = range(b, "t0_range", p.t0_range);
  p.step = b.number("step", p.step);
  p.known_k = b.optional_number("known_k");
  p.noise_sigma = b.number("noise_sigma", p.noise_sigma);
  guarded(b, [&] {
    p.validate();
    return 0;
  });
  return p;
}

FitOptions parse_fit_options(const Block& b, std::uint64_t seed) {
  b.only({"n_starts", "max_iterations", "bounds"});
  FitOptions o;
  o.seed = seed;
  o.n_starts = static_cast<int>(b.integer("n_starts", o.n_starts));
  if (o.n_starts < 1) b.fail("n_starts", "must be positive");
  o.max_iterations = static_cast<int>(b.integer("max_iterations", o.max_iterations));
  if (o.max_iterations < 1) b.fail("max_iterations", "must be positive");
  if (b.has("bounds")) {
    const Block bb = b.sub("bounds");
    bb.only({"L", "rate", "t0"});
    ParameterBounds pb;
    for (int j = 0; j < 3; ++j) {
      const auto r = range(bb, kFitParameterNames[j], {0.0, 0.0});
      if (!bb.has(kFitParameterNames[j])) bb.fail(kFitParameterNames[j], "missing");
      pb.lo[j] = r[0];
      pb.hi[j] = r[1];
    }
    o.bounds = pb;
  }
  return o;
}

KPolicy parse_k_policy(const Block& b) {
  b.only({"fixed", "bracket"});
  if (b.has("fixed") == b.has("bracket")) b.fail("", "give exactly one of fixed or bracket");
  if (b.has("fixed")) {
    const double k = b.number("fixed");
    if (!(k > 0.0)) b.fail("fixed", "must be positive");
    return KPolicy::fixed_k(k);
  }
  const auto r = range(b, "bracket", {0.0, 0.0});
  if (!(r[0] > 0.0 && r[1] > r[0])) b.fail("bracket", "expected 0 < lo < hi");
  return KPolicy::bracket(r[0], r[1]);
}

Dataset load_dataset(const Block& b, std::uint64_t seed) {
  const std::string source = b.text("source");
  Dataset d;
  d.source = source;
  auto sample = [&](auto&& f) {
    const auto t = b.grid("times");
    if (t.size() < 2) b.fail("times", "need at least two sample times");
    std::vector<double> y;
    y.reserve(t.size());
    for (const double ti : t) y.push_back(f(ti));
    return guarded(b, [&] { return TimeSeries(t, std::move(y)); });
  };

  if (source == "logistic" || source == "curve") {
    b.only({"source", "curve", "times", "noise"});
    const SigmoidSpec spec = parse_curve(b.sub("curve"));
    d.clean = sample([&](double t) { return eval(spec, t); });
    d.true_L = spec.L();
    d.true_t0 = inflection(spec).t0;
    d.true_k = spec.beta();
  } else if (source == "ode") {
    b.only({"source", "damping", "k", "y_at_zero", "times", "noise"});
    const DampingSpec damping = parse_damping(b.sub("damping"));
    const OdeSigmoid model = guarded(b, [&] {
      return OdeSigmoid(damping, b.number("k", 1.0), b.number("y_at_zero"));
    });
    const auto t = b.grid("times");
    d.clean = guarded(b, [&] { return integrate(model, t).series; });
    d.true_L = model.L();
    d.true_t0 = inflection_of(model).t0;
    d.true_k = model.k();
  } else if (source == "abm" || source == "meanfield") {
    b.only({"source", "contagion", "runs", "noise"});
    const ContagionConfig cfg = parse_contagion(b.sub("contagion"), derive_seed(seed, 11));
    if (source == "abm") {
      const auto runs = b.integer("runs", 1);
      if (runs < 1) b.fail("runs", "must be positive");
      d.clean = runs == 1 ? run_abm(cfg) : run_abm_mean(cfg, static_cast<int>(runs));
    } else {
      d.clean = run_meanfield(cfg);
    }
    contagion_truth(d.clean, d);
  } else if (source == "values") {
    b.only({"source", "times", "values", "noise"});
    d.clean = guarded(b, [&] { return TimeSeries(b.numbers("times"), b.numbers("values")); });
  } else {
    b.fail("source", "unknown data source '" + source +
                         "' (valid: logistic, curve, ode, abm, meanfield, values)");
  }

  d.observed = d.clean;
  if (b.has("noise")) {
    const Block n = b.sub("noise");
    n.only({"model", "sigma"});
    const NoiseSpec spec{guarded(n, [&] { return parse_noise_kind(n.text("model", "additive")); }),
                         n.number("sigma")};
    if (!(spec.sigma >= 0.0)) n.fail("sigma", "must be >= 0");
    d.observed = add_noise(d.clean, spec, derive_seed(seed, 12));
  }
  return d;
}

}  // namespace sigmoids::cli
