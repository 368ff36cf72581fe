#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "inputs.hpp"
#include "scenario.hpp"
#include "sigmoids/definition.hpp"
#include "sigmoids/diagnostics.hpp"

namespace sigmoids::cli {

namespace {

struct Context {
  const Scenario& scenario;
  std::uint64_t seed;
  Block params;
  Artifacts artifacts;
  ojson summary;
};

ojson optional_json(const std::optional<double>& v) {
  return v ? number_or_null(*v) : ojson(nullptr);
}

ojson spec_json(const SigmoidSpec& s) {
  return {{"family", std::string(to_string(s.family()))},
          {"L", s.L()},
          {"alpha", s.alpha()},
          {"beta", s.beta()},
          {"shift", s.shift()}};
}

ojson report_json(const PropertyReport& r) {
  ojson out = ojson::object();
  out["all_pass"] = r.all_pass();
  ojson items = ojson::array();
  for (const auto& c : r.clauses) {
    items.push_back({{"item", c.item},
                     {"name", c.name},
                     {"status", std::string(to_string(c.status))},
                     {"detail", c.detail}});
  }
  out["clauses"] = items;
  return out;
}

ojson fit_json(const FitResult& f) {
  ojson bounds = ojson::array();
  for (const auto& b : f.bounds_hit) bounds.push_back(b);
  return {{"spec", spec_json(f.spec)},
          {"rmse", number_or_null(f.rmse)},
          {"converged", f.converged},
          {"n_starts_used", f.n_starts_used},
          {"bounds_hit", bounds},
          {"degenerate_input", f.degenerate_input}};
}

ojson truth_json(const Dataset& d) {
  return {{"source", d.source},
          {"L", optional_json(d.true_L)},
          {"t0", optional_json(d.true_t0)},
          {"k", optional_json(d.true_k)}};
}

ojson matrix_json(const Eigen::Matrix3d& m) {
  ojson out = ojson::array();
  for (int i = 0; i < 3; ++i) {
    ojson row = ojson::array();
    for (int j = 0; j < 3; ++j) row.push_back(number_or_null(m(i, j)));
    out.push_back(row);
  }
  return out;
}

SigmoidFamily family_field(const Block& b) {
  const std::string name = b.text("family", "logistic");
  try {
    return parse_family(name);
  } catch (const std::exception& e) {
    b.fail("family", e.what());
  }
}

FitOptions fit_field(const Block& b, std::uint64_t seed) {
  if (!b.has("fit")) {
    FitOptions o;
    o.seed = seed;
    return o;
  }
  return parse_fit_options(b.sub("fit"), seed);
}

Dataset data_field(const Context& c) {
  return load_dataset(c.params.sub("data"), derive_seed(c.seed, 1));
}

TimeSeries prefix_of(const Block& b, const TimeSeries& data) {
  if (!b.has("prefix_end")) return data;
  const double end = b.number("prefix_end");
  TimeSeries p = data.up_to(end);
  if (p.size() < 3) b.fail("prefix_end", "fewer than three data points up to this time");
  return p;
}

std::string label_or(const Block& b, std::size_t i) {
  return b.text("label", "variant" + std::to_string(i));
}

void check_label(const Block& b, const std::string& label) {
  if (label.empty() || label.find_first_of("/\\ ") != std::string::npos) {
    b.fail("label", "must be non-empty without spaces or path separators");
  }
}

// ---------------------------------------------------------------------------

void op_curve_eval(Context& c) {
  const Block& p = c.params;
  p.only({"families", "curve", "times"});
  const Block cb = p.sub("curve");
  cb.only({"L", "alpha", "beta", "shift"});
  const double L = cb.number("L", 1.0), alpha = cb.number("alpha", 1.0),
               beta = cb.number("beta", 1.0), shift = cb.number("shift", 0.0);
  std::vector<std::string> names =
      p.has("families") ? p.texts("families")
                        : std::vector<std::string>{"logistic", "algebraic", "error-function",
                                                   "gompertz"};
  std::vector<SigmoidSpec> specs;
  for (const auto& n : names) {
    try {
      specs.emplace_back(parse_family(n), L, alpha, beta, shift);
    } catch (const std::exception& e) {
      p.fail("families", e.what());
    }
  }
  const auto times = p.grid("times");

  std::vector<std::string> header{"t"};
  for (const auto& n : names) header.push_back(n);
  Csv values(header), slopes(header);
  for (const double t : times) {
    std::vector<double> v{t}, d{t};
    for (const auto& s : specs) {
      v.push_back(eval(s, t));
      d.push_back(derivative(s, t));
    }
    values.row(v);
    slopes.row(d);
  }
  c.artifacts.add_csv("curves.csv", values, "curve values");
  c.artifacts.add_csv("derivatives.csv", slopes, "curve derivatives");

  ojson fam = ojson::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto ip = inflection(specs[i]);
    const double k = nominal_growth_rate(specs[i]);
    fam.push_back({{"name", names[i]},
                   {"spec", spec_json(specs[i])},
                   {"inflection_t0", ip.t0},
                   {"inflection_y0", ip.y0},
                   {"nominal_growth_rate", k},
                   {"clauses", report_json(verify_sigmoid(specs[i], k))}});
  }
  c.summary["families"] = fam;
}

void op_ode_integrate(Context& c) {
  const Block& p = c.params;
  p.only({"k", "y_at_zero", "times", "align_inflection", "agreement_below", "variants"});
  const double k = p.number("k", 1.0);
  const auto times = p.grid("times");
  const auto align = p.optional_number("align_inflection");

  std::vector<std::string> labels;
  std::vector<TimeSeries> curves;
  ojson out = ojson::array();
  std::size_t i = 0;
  for (const Block& v : p.list("variants")) {
    v.only({"label", "damping", "y_at_zero"});
    const std::string label = label_or(v, i++);
    check_label(v, label);
    const DampingSpec damping = parse_damping(v.sub("damping"));
    const double y_at_zero = v.has("y_at_zero") ? v.number("y_at_zero") : p.number("y_at_zero");
    OdeSigmoid model = [&] {
      try {
        return OdeSigmoid(damping, k, y_at_zero);
      } catch (const std::exception& e) {
        v.fail("y_at_zero", e.what());
      }
    }();
    const auto ip = inflection_of(model);
    const double offset = align ? ip.t0 - *align : 0.0;
    std::vector<double> grid(times);
    for (double& t : grid) t += offset;
    const Trajectory tr = integrate(model, grid);

    Csv csv({"t", "y", "dydt"});
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double y = tr.series.value(j);
      csv.row({times[j], y, model.rate(y)});
    }
    c.artifacts.add_csv(label + ".csv", csv, "trajectory " + label);
    labels.push_back(label);
    curves.emplace_back(times, std::vector<double>(tr.series.values().begin(),
                                                   tr.series.values().end()));

    const auto reach = time_to_reach(model, y_at_zero, model.L());
    ojson entry{{"label", label},
                {"damping", std::string(to_string(damping.kind()))},
                {"L", model.L()},
                {"k", k},
                {"y_at_zero", y_at_zero},
                {"time_offset", offset},
                {"inflection_t0", ip.t0 - offset},
                {"inflection_y0", ip.y0},
                {"finite_arrival", reach.finite_arrival},
                {"arrival_time", reach.finite_arrival ? ojson(reach.time - offset) : ojson(nullptr)},
                {"clauses", report_json(verify_sigmoid(model))}};
    out.push_back(entry);
  }
  if (curves.empty()) p.fail("variants", "need at least one variant");
  c.summary["variants"] = out;

  if (const auto level = p.optional_number("agreement_below")) {
    // Largest gap between any two variants while all of them are below the level.
    double gap = 0.0;
    std::size_t used = 0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& s : curves) {
        lo = std::min(lo, s.value(j));
        hi = std::max(hi, s.value(j));
      }
      if (hi >= *level) continue;
      gap = std::max(gap, hi - lo);
      ++used;
    }
    c.summary["agreement"] = {{"below", *level}, {"points", used}, {"max_gap", gap}};
  }
}

struct Aggregate {
  std::vector<double> mean, sd, lo, hi;
};

Aggregate abm_runs(const ContagionConfig& cfg, int runs) {
  const auto n = static_cast<std::size_t>(cfg.horizon_days) + 1;
  Aggregate a{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
              std::vector<double>(n, INFINITY), std::vector<double>(n, -INFINITY)};
  std::vector<double> sq(n, 0.0);
  for (int r = 0; r < runs; ++r) {
    ContagionConfig one = cfg;
    one.seed = cfg.seed ^ static_cast<std::uint64_t>(r);
    const TimeSeries s = run_abm(one);
    for (std::size_t d = 0; d < n; ++d) {
      const double v = s.value(d);
      a.mean[d] += v;
      sq[d] += v * v;
      a.lo[d] = std::min(a.lo[d], v);
      a.hi[d] = std::max(a.hi[d], v);
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    a.mean[d] /= runs;
    const double var = runs > 1 ? (sq[d] - runs * a.mean[d] * a.mean[d]) / (runs - 1) : 0.0;
    a.sd[d] = std::sqrt(std::max(var, 0.0));
  }
  return a;
}

void op_contagion(Context& c) {
  const Block& p = c.params;
  p.only({"runs", "configs", "tolerance"});
  const auto runs = p.integer("runs", 100);
  if (runs < 0) p.fail("runs", "must be >= 0");
  const double tol = p.number("tolerance", 0.1);

  std::vector<std::vector<double>> reference;
  std::vector<std::string> names;
  ojson out = ojson::array();
  std::size_t i = 0;
  for (const Block& b : p.list("configs")) {
    const ContagionConfig cfg = parse_contagion(b, derive_seed(c.seed, 100 + i));
    const std::string label = b.text("name", "config" + std::to_string(i));
    check_label(b, label);
    ++i;
    const TimeSeries mf = run_meanfield(cfg);

    Csv csv(runs > 0 ? std::vector<std::string>{"day", "meanfield", "abm_mean", "abm_sd",
                                                "abm_min", "abm_max"}
                     : std::vector<std::string>{"day", "meanfield"});
    std::vector<double> ref(mf.values().begin(), mf.values().end());
    ojson entry{{"name", label},
                {"populations", cfg.population_sizes()},
                {"meanfield_final", mf.value(mf.size() - 1)}};
    if (runs > 0) {
      const Aggregate a = abm_runs(cfg, static_cast<int>(runs));
      double dev = 0.0;
      for (std::size_t d = 0; d < mf.size(); ++d) {
        csv.row({mf.time(d), mf.value(d), a.mean[d], a.sd[d], a.lo[d], a.hi[d]});
        dev = std::max(dev, std::abs(a.mean[d] - mf.value(d)));
      }
      ref = a.mean;
      entry["abm_runs"] = runs;
      entry["abm_mean_final"] = a.mean.back();
      entry["max_abs_deviation_from_meanfield"] = dev;
      entry["relative_deviation_from_meanfield"] = dev / std::max(mf.value(mf.size() - 1), 1.0);
    } else {
      for (std::size_t d = 0; d < mf.size(); ++d) csv.row({mf.time(d), mf.value(d)});
    }
    const double plateau = ref.back();
    std::size_t half = 0;
    while (half + 1 < ref.size() && ref[half] < 0.5 * plateau) ++half;
    entry["final"] = plateau;
    entry["half_plateau_day"] = half;
    c.artifacts.add_csv(label + ".csv", csv, "epidemic curve " + label);
    out.push_back(entry);
    reference.push_back(std::move(ref));
    names.push_back(label);
  }
  if (reference.empty()) p.fail("configs", "need at least one configuration");
  c.summary["configs"] = out;

  if (reference.size() >= 2) {
    // First day the two first curves differ by more than the tolerance.
    const auto& a = reference[0];
    const auto& b = reference[1];
    std::size_t agree = 0;
    while (agree < a.size() && std::abs(a[agree] - b[agree]) <= tol * std::max(a[agree], b[agree]))
      ++agree;
    c.summary["comparison"] = {{"first", names[0]},
                               {"second", names[1]},
                               {"tolerance", tol},
                               {"agree_through_day", agree == 0 ? ojson(nullptr) : ojson(agree - 1)},
                               {"final_ratio", a.back() / b.back()}};
  }
}

void op_fit(Context& c) {
  const Block& p = c.params;
  p.only({"data", "family", "prefix_end", "fit"});
  const Dataset d = data_field(c);
  const TimeSeries prefix = prefix_of(p, d.observed);
  const FitResult f = fit_ls(prefix, family_field(p), fit_field(p, derive_seed(c.seed, 2)));

  Csv csv({"t", "observed", "clean", "fitted", "in_window"});
  for (std::size_t i = 0; i < d.observed.size(); ++i) {
    const double t = d.observed.time(i);
    csv.row({t, d.observed.value(i), d.clean.value(i), eval(f.spec, t),
             t <= prefix.back_time() ? 1.0 : 0.0});
  }
  c.artifacts.add_csv("fit.csv", csv, "data and fitted curve");
  c.summary["truth"] = truth_json(d);
  c.summary["window_end"] = prefix.back_time();
  c.summary["points"] = prefix.size();
  c.summary["fit"] = fit_json(f);
}

void op_error_surface(Context& c) {
  const Block& p = c.params;
  p.only({"data", "forecast_times", "L_grid", "t0_grid", "k", "factor"});
  const Dataset d = data_field(c);
  const auto taus = p.grid("forecast_times");
  const auto Lg = p.grid("L_grid");
  const auto tg = p.grid("t0_grid");
  const KPolicy kp = p.has("k") ? parse_k_policy(p.sub("k")) : KPolicy::bracket(1e-3, 10.0);
  const double factor = p.number("factor", 1.1);

  ojson out = ojson::array();
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const TimeSeries prefix = d.observed.up_to(taus[i]);
    if (prefix.size() < 3) p.fail("forecast_times", "fewer than three data points before a forecast time");
    const Eigen::MatrixXd s = error_surface(prefix, Lg, tg, kp);
    std::vector<std::string> header{"L"};
    for (const double t0 : tg) header.push_back("t0=" + format_number(t0));
    Csv csv(header);
    for (std::size_t r = 0; r < Lg.size(); ++r) {
      std::vector<double> row{Lg[r]};
      for (std::size_t col = 0; col < tg.size(); ++col)
        row.push_back(s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)));
      csv.row(row);
    }
    const std::string file = "surface_" + std::to_string(i) + ".csv";
    c.artifacts.add_csv(file, csv, "rmse surface at t=" + format_number(taus[i]));

    const auto region = near_minimum_region(s, Lg, tg, factor);
    out.push_back({{"forecast_time", taus[i]},
                   {"file", file},
                   {"axes", {{"rows", "L"}, {"columns", "t0"}}},
                   {"points", prefix.size()},
                   {"min_rmse", s.minCoeff()},
                   {"min_L", Lg[region.min_row]},
                   {"min_t0", tg[region.min_col]},
                   {"region_cells", region.cells},
                   {"region_L_span", region.L_span},
                   {"region_t0_span", region.t0_span},
                   {"region_components", region.components},
                   {"region_anisotropy", region.anisotropy}});
  }
  c.summary["truth"] = truth_json(d);
  c.summary["rows"] = "L";
  c.summary["columns"] = "t0";
  c.summary["k_policy"] = kp.fixed ? ojson{{"fixed", *kp.fixed}} : ojson{{"bracket", {kp.lo, kp.hi}}};
  c.summary["factor"] = factor;
  c.summary["surfaces"] = out;
}

ojson parameter_json(const ParameterSummary& s) {
  return {{"mean", s.mean}, {"sd", s.sd}, {"mode", s.mode}};
}

void op_bayes(Context& c) {
  const Block& p = c.params;
  p.only({"data", "prior", "prefix_end"});
  const Dataset d = data_field(c);
  const TimeSeries prefix = prefix_of(p, d.observed);
  const PriorSpec prior = p.has("prior") ? parse_prior(p.sub("prior")) : PriorSpec{};
  const PosteriorGrid g = bayes_update(prefix, prior);

  auto marginal = [&](const char* name, const std::vector<double>& axis,
                      const std::vector<double>& prob) {
    Csv csv({name, "probability"});
    for (std::size_t i = 0; i < axis.size(); ++i) csv.row({axis[i], prob[i]});
    c.artifacts.add_csv(std::string("marginal_") + name + ".csv", csv,
                        std::string("posterior marginal of ") + name);
  };
  marginal("k", g.k_axis(), g.marginal_k());
  marginal("L", g.L_axis(), g.marginal_L());
  marginal("t0", g.t0_axis(), g.marginal_t0());

  const PosteriorSummary s = g.summary();
  c.summary["truth"] = truth_json(d);
  c.summary["points"] = prefix.size();
  c.summary["known_k"] = optional_json(prior.known_k);
  c.summary["noise_sigma"] = prior.noise_sigma;
  c.summary["posterior"] = {
      {"k", parameter_json(s.k)}, {"L", parameter_json(s.L)}, {"t0", parameter_json(s.t0)}};
}

void op_replicate(Context& c) {
  const Block& p = c.params;
  p.only({"n_reps", "sample_times", "sample_sigma", "truth", "prior", "known_k"});
  ReplicationConfig cfg;
  cfg.seed = c.seed;
  cfg.n_reps = static_cast<int>(p.integer("n_reps", cfg.n_reps));
  if (cfg.n_reps < 2) p.fail("n_reps", "need at least two replications");
  if (p.has("sample_times")) cfg.sample_times = p.grid("sample_times");
  cfg.sample_sigma = p.number("sample_sigma", cfg.sample_sigma);
  if (!(cfg.sample_sigma >= 0.0)) p.fail("sample_sigma", "must be >= 0");
  if (p.has("truth")) {
    const Block t = p.sub("truth");
    t.only({"k", "L", "t0"});
    cfg.true_k = t.number("k", cfg.true_k);
    cfg.true_L = t.number("L", cfg.true_L);
    cfg.true_t0 = t.number("t0", cfg.true_t0);
  }
  if (p.has("prior")) cfg.prior = parse_prior(p.sub("prior"));
  cfg.known_k = p.number("known_k", cfg.known_k);
  const ReplicationSummary r = replicate_known_k_experiment(cfg);

  Csv csv({"trial", "mean_L_unknown_k", "sd_L_unknown_k", "mode_L_unknown_k", "mean_L_known_k",
           "sd_L_known_k", "mode_L_known_k"});
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const auto& t = r.trials[i];
    csv.row({static_cast<double>(i), t.unknown_k.L.mean, t.unknown_k.L.sd, t.unknown_k.L.mode,
             t.known_k.L.mean, t.known_k.L.sd, t.known_k.L.mode});
  }
  c.artifacts.add_csv("trials.csv", csv, "per-trial posterior of L");
  c.summary["n_reps"] = cfg.n_reps;
  c.summary["sample_times"] = cfg.sample_times;
  c.summary["sample_sigma"] = cfg.sample_sigma;
  c.summary["truth"] = {{"k", cfg.true_k}, {"L", cfg.true_L}, {"t0", cfg.true_t0}};
  c.summary["known_k"] = cfg.known_k;
  c.summary["mean_L_unknown_k"] = r.mean_L_unknown_k;
  c.summary["sd_L_unknown_k"] = r.sd_L_unknown_k;
  c.summary["mean_L_known_k"] = r.mean_L_known_k;
  c.summary["sd_L_known_k"] = r.sd_L_known_k;
  c.summary["mean_mode_L_unknown_k"] = r.mean_mode_L_unknown_k;
  c.summary["sd_mode_L_unknown_k"] = r.sd_mode_L_unknown_k;
  c.summary["mean_mode_L_known_k"] = r.mean_mode_L_known_k;
  c.summary["sd_mode_L_known_k"] = r.sd_mode_L_known_k;
  c.summary["mean_posterior_sd_unknown_k"] = r.mean_posterior_sd_unknown_k;
  c.summary["mean_posterior_sd_known_k"] = r.mean_posterior_sd_known_k;
  c.summary["share_known_not_wider"] = r.share_known_not_wider;
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void op_rolling_forecast(Context& c) {
  const Block& p = c.params;
  p.only({"data", "forecast_times", "family", "fit"});
  const Dataset d = data_field(c);
  const auto taus = p.grid("forecast_times");
  const FitOptions fo = fit_field(p, derive_seed(c.seed, 2));
  const ForecastTrajectory tr = [&] {
    try {
      return rolling_forecast(d.observed, taus, family_field(p), fo);
    } catch (const std::invalid_argument& e) {
      p.fail("forecast_times", e.what());
    }
  }();

  Csv traj({"forecast_time", "L_hat", "t0_hat", "rmse", "converged"});
  for (std::size_t i = 0; i < taus.size(); ++i) {
    traj.row({taus[i], tr.L_hat[i], tr.t0_hat[i], tr.rmse[i], tr.converged[i] ? 1.0 : 0.0});
  }
  c.artifacts.add_csv("trajectory.csv", traj, "forecast trajectory");

  Csv data({"t", "observed", "clean"});
  for (std::size_t i = 0; i < d.observed.size(); ++i)
    data.row({d.observed.time(i), d.observed.value(i), d.clean.value(i)});
  c.artifacts.add_csv("data.csv", data, "data");

  Csv curves({"forecast_time", "t", "fitted"});
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!std::isfinite(tr.L_hat[i])) continue;
    for (const double t : d.observed.times()) curves.row({taus[i], t, eval(tr.fits[i].spec, t)});
  }
  c.artifacts.add_csv("fitted_curves.csv", curves, "fitted curves per forecast time");

  c.summary["truth"] = truth_json(d);
  ojson ent = ojson::array();
  for (std::size_t i = 0; i < taus.size(); ++i) {
    ojson e{{"forecast_time", taus[i]},
            {"L_hat", number_or_null(tr.L_hat[i])},
            {"t0_hat", number_or_null(tr.t0_hat[i])},
            {"rmse", number_or_null(tr.rmse[i])},
            {"converged", static_cast<bool>(tr.converged[i])}};
    if (d.true_L) e["L_ratio"] = number_or_null(tr.L_hat[i] / *d.true_L);
    if (d.true_t0) {
      e["distance_to_forecast_time"] = number_or_null(std::abs(tr.t0_hat[i] - taus[i]));
      e["distance_to_true_t0"] = number_or_null(std::abs(tr.t0_hat[i] - *d.true_t0));
    }
    ent.push_back(e);
  }
  c.summary["forecasts"] = ent;
  if (d.true_L) {
    std::vector<double> ratio;
    for (const double L : tr.L_hat) ratio.push_back(L / *d.true_L);
    c.summary["median_L_ratio"] = number_or_null(median(ratio));
  }
}

void op_sensitivity(Context& c) {
  const Block& p = c.params;
  p.only({"model", "windows", "sigma"});
  SensitivityOptions so;
  so.sigma = p.number("sigma", 1.0);
  if (!(so.sigma > 0.0)) p.fail("sigma", "must be positive");

  const Block m = p.sub("model");
  m.only({"curve", "ode"});
  if (m.has("curve") == m.has("ode")) m.fail("", "give exactly one of curve or ode");
  std::function<SensitivityAnalysis(std::span<const double>)> run;
  ojson model;
  if (m.has("curve")) {
    const SigmoidSpec spec = parse_curve(m.sub("curve"));
    run = [spec, so](std::span<const double> t) { return sensitivity(spec, t, so); };
    model = {{"kind", "curve"}, {"spec", spec_json(spec)}};
  } else {
    const Block o = m.sub("ode");
    o.only({"damping", "k", "y_at_zero"});
    const DampingSpec damping = parse_damping(o.sub("damping"));
    const OdeSigmoid ode = [&] {
      try {
        return OdeSigmoid(damping, o.number("k", 1.0), o.number("y_at_zero"));
      } catch (const std::exception& e) {
        o.fail("y_at_zero", e.what());
      }
    }();
    run = [ode, so](std::span<const double> t) { return sensitivity(ode, t, so); };
    model = {{"kind", "ode"},
             {"damping", std::string(to_string(damping.kind()))},
             {"L", ode.L()},
             {"k", ode.k()},
             {"y_at_zero", ode.y_at_zero()}};
  }

  ojson out = ojson::array();
  std::size_t i = 0;
  for (const Block& w : p.list("windows")) {
    w.only({"label", "times"});
    const std::string label = label_or(w, i++);
    check_label(w, label);
    const auto times = w.grid("times");
    if (times.size() < 3) w.fail("times", "need at least three sample times");
    const SensitivityAnalysis a = run(times);

    Csv csv({"t", "dy_dk", "dy_dL", "dy_dt0", "scaled_k", "scaled_L", "scaled_t0"});
    for (std::size_t j = 0; j < times.size(); ++j) {
      const auto r = static_cast<Eigen::Index>(j);
      csv.row({times[j], a.absolute.values(r, 0), a.absolute.values(r, 1), a.absolute.values(r, 2),
               a.scaled.values(r, 0), a.scaled.values(r, 1), a.scaled.values(r, 2)});
    }
    c.artifacts.add_csv("sensitivity_" + label + ".csv", csv, "sensitivities " + label);

    const auto& rep = a.report;
    const double nk = column_norm(a.scaled, Parameter::k);
    const double nL = column_norm(a.scaled, Parameter::L);
    ojson verdicts = ojson::object();
    ojson norms = ojson::object();
    ojson scaled_norms = ojson::object();
    for (int j = 0; j < 3; ++j) {
      verdicts[kParameterNames[j]] = std::string(to_string(rep.verdicts[j]));
      norms[kParameterNames[j]] = rep.column_norms[j];
      scaled_norms[kParameterNames[j]] = column_norm(a.scaled, static_cast<Parameter>(j));
    }
    ojson eig = ojson::array();
    for (int j = 0; j < 3; ++j) eig.push_back(number_or_null(rep.eigenvalues(j)));
    out.push_back({{"label", label},
                   {"t_first", times.front()},
                   {"t_last", times.back()},
                   {"points", times.size()},
                   {"column_norms", norms},
                   {"scaled_column_norms", scaled_norms},
                   {"scaled_k_over_L", nL > 0 ? ojson(nk / nL) : ojson(nullptr)},
                   {"verdicts", verdicts},
                   {"fim", matrix_json(rep.fim)},
                   {"eigenvalues", eig},
                   {"condition_number", number_or_null(rep.condition_number)},
                   {"condition_number_infinite", std::isinf(rep.condition_number)}});
  }
  if (out.empty()) p.fail("windows", "need at least one window");
  c.summary["model"] = model;
  c.summary["sigma"] = so.sigma;
  c.summary["windows"] = out;
}

void op_remedies(Context& c) {
  const Block& p = c.params;
  p.only({"data", "prefix_end", "family", "fit", "schemes", "damping_belief", "herd_immunity",
          "symmetric_t0"});
  const Dataset d = data_field(c);
  const TimeSeries prefix = prefix_of(p, d.observed);
  const SigmoidFamily family = family_field(p);
  const FitOptions fo = fit_field(p, derive_seed(c.seed, 2));

  std::vector<WeightScheme> schemes;
  if (p.has("schemes")) {
    for (const Block& s : p.list("schemes")) {
      s.only({"kind", "half_life"});
      WeightScheme w;
      try {
        w.kind = parse_weight_kind(s.text("kind"));
      } catch (const std::exception& e) {
        s.fail("kind", e.what());
      }
      w.half_life = s.optional_number("half_life");
      if (w.half_life && !(*w.half_life > 0.0)) s.fail("half_life", "must be positive");
      schemes.push_back(w);
    }
  } else {
    schemes = default_weight_schemes();
  }
  if (schemes.size() < 2) p.fail("schemes", "need at least two weighting schemes");
  const WeightedFitSelection sel = modis_weighted_fit(prefix, schemes, family, fo);

  Csv fits({"scheme", "half_life", "L", "rate", "t0", "rmse", "selected"});
  ojson cand = ojson::array();
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    const FitResult& f = sel.candidates[i];
    const double hl = schemes[i].half_life.value_or(NAN);
    fits.cells({std::string(to_string(schemes[i].kind)), format_number(hl),
                format_number(f.spec.L()), format_number(f.spec.beta()),
                format_number(f.spec.shift()), format_number(f.rmse),
                i == sel.selected_index ? "1" : "0"});
    ojson e = fit_json(f);
    e["scheme"] = std::string(to_string(schemes[i].kind));
    cand.push_back(e);
  }
  c.artifacts.add_csv("weighted_fits.csv", fits, "fits per weighting scheme");

  const FitResult plain = fit_ls(prefix, family, fo);
  DampingBelief belief = DampingBelief::Unknown;
  try {
    belief = parse_damping_belief(p.text("damping_belief", "unknown"));
  } catch (const std::exception& e) {
    p.fail("damping_belief", e.what());
  }
  const BoundReport br = bound_report(plain, prefix, belief);

  c.summary["truth"] = truth_json(d);
  c.summary["window_end"] = prefix.back_time();
  c.summary["points"] = prefix.size();
  c.summary["weighted"] = {{"selected_index", sel.selected_index},
                           {"selected", fit_json(sel.selected)},
                           {"candidates", cand}};
  c.summary["unweighted_fit"] = fit_json(plain);
  c.summary["bound"] = {{"damping_belief", std::string(to_string(belief))},
                        {"L_hat", br.L_hat},
                        {"y_last", br.y_last},
                        {"label", br.label},
                        {"doubling_ratio", number_or_null(br.doubling_ratio)},
                        {"doubling_artifact_suspected", br.doubling_artifact_suspected},
                        {"below_one_third", br.below_one_third}};

  if (p.has("symmetric_t0")) {
    const double t0 = p.number("symmetric_t0");
    const SymmetricCompletion sc = [&] {
      try {
        return symmetric_completion(prefix, t0);
      } catch (const std::exception& e) {
        p.fail("symmetric_t0", e.what());
      }
    }();
    Csv csv({"t", "y"});
    for (std::size_t i = 0; i < sc.continuation.size(); ++i)
      csv.row({sc.continuation.time(i), sc.continuation.value(i)});
    c.artifacts.add_csv("symmetric_completion.csv", csv, "mirrored continuation");
    c.summary["symmetric_completion"] = {{"t0", t0}, {"y0", sc.y0}, {"L_estimate", sc.L_estimate}};
  }

  if (p.has("herd_immunity")) {
    const Block h = p.sub("herd_immunity");
    h.only({"population", "R0"});
    const double P = h.number("population"), R0 = h.number("R0");
    try {
      c.summary["herd_immunity"] = {
          {"population", P}, {"R0", R0}, {"limit", herd_immunity_limit(P, R0)}};
    } catch (const std::exception& e) {
      h.fail("R0", e.what());
    }
  }
}

}  // namespace

std::vector<Artifact> execute(const Scenario& scenario, std::uint64_t seed) {
  static const std::map<std::string, std::function<void(Context&)>> ops{
      {"curve-eval", op_curve_eval},
      {"ode-integrate", op_ode_integrate},
      {"contagion", op_contagion},
      {"fit", op_fit},
      {"error-surface", op_error_surface},
      {"bayes", op_bayes},
      {"replicate-known-k", op_replicate},
      {"rolling-forecast", op_rolling_forecast},
      {"sensitivity", op_sensitivity},
      {"remedies", op_remedies},
  };
  const Block top(scenario.doc, scenario.doc.root, "");
  if (!top.has("params")) top.fail("params", "missing");
  Context c{scenario, seed, top.sub("params"), {}, ojson::object()};
  c.summary["scenario"] = scenario.name;
  c.summary["operation"] = scenario.operation;
  c.summary["seed"] = operation_needs_seed(scenario.operation) ? ojson(seed) : ojson(nullptr);
  ops.at(scenario.operation)(c);
  c.artifacts.add_json("summary.json", c.summary, "summary");
  return c.artifacts.items();
}

}  // namespace sigmoids::cli
