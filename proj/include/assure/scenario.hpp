#pragma once

// Configuration-driven front end: a JSON scenario description (file and/or
// flag overrides) is parsed into a ScenarioConfig, dispatched to the
// matching engine, and the results are written as a curve CSV plus a
// summary JSON with full provenance (seed, config echo, config hash).

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "assure/betabinom.hpp"
#include "assure/costeff.hpp"
#include "assure/errors.hpp"
#include "assure/mc_engine.hpp"
#include "assure/precision.hpp"
#include "assure/scalar.hpp"
#include "assure/sizing.hpp"

namespace assure::cli {

using json = nlohmann::ordered_json;

enum class ScenarioKind { Scalar, CostEff, Precision, TwoProp };
enum class EngineKind { ClosedForm, McKnownVar, McUnknownVar };

struct SizingParams {
  std::optional<double> gamma;
  int n_min = 0, n_max = 0, step = 0;  // 0 = use the scenario default grid
  int refine_window = 1;
};

struct OutputPaths {
  std::string curve_csv = "curve.csv";
  std::string summary_json = "summary.json";
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::Scalar;
  EngineKind engine = EngineKind::ClosedForm;
  double alpha = 0.05;
  std::optional<int> n;  // point-evaluation sample size

  scalar::ScalarConfig scalar;
  std::optional<double> n0;  // single-prior closed form when present
  costeff::CostEffConfig costeff;
  precision::PrecisionConfig precision;
  precision::PrecisionMode precision_mode = precision::PrecisionMode::CoverageAtXbar;
  betabinom::PropDesign twoprop;
  std::optional<IgParams> ig_design, ig_analysis;

  MCSettings mc;
  bool seed_sampled = false;  // seed was drawn, not supplied
  SizingParams sizing;
  OutputPaths output;
  bool log_fit = false;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void missing(const std::string& field) {
  throw ConfigError("missing required field: " + field);
}

[[noreturn]] inline void bad(const std::string& field, const std::string& why) {
  throw ConfigError("invalid field " + field + ": " + why);
}

inline double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  return j.get<double>();
}

inline double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  return as_number(j.at(key), key);
}

inline int get_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad(key, "expected an integer");
  return j.at(key).get<int>();
}

// Accepts a number or the string "inf" for an infinite precision parameter.
inline double get_precision_param(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "infinity") return kInfinitePrecision;
    bad(key, "expected a number or \"inf\"");
  }
  return as_number(v, key);
}

inline ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "scalar") return ScenarioKind::Scalar;
  if (s == "costeff") return ScenarioKind::CostEff;
  if (s == "precision") return ScenarioKind::Precision;
  if (s == "two-prop") return ScenarioKind::TwoProp;
  bad("scenario", "unknown scenario '" + s + "'");
}

inline EngineKind parse_engine_kind(const std::string& s) {
  if (s == "closed-form") return EngineKind::ClosedForm;
  if (s == "mc-known-var") return EngineKind::McKnownVar;
  if (s == "mc-unknown-var") return EngineKind::McUnknownVar;
  bad("engine", "unknown engine '" + s + "'");
}

inline const char* scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Scalar: return "scalar";
    case ScenarioKind::CostEff: return "costeff";
    case ScenarioKind::Precision: return "precision";
    case ScenarioKind::TwoProp: return "two-prop";
  }
  return "?";
}

inline const char* engine_name(EngineKind k) {
  switch (k) {
    case EngineKind::ClosedForm: return "closed-form";
    case EngineKind::McKnownVar: return "mc-known-var";
    case EngineKind::McUnknownVar: return "mc-unknown-var";
  }
  return "?";
}

struct GridDefaults {
  int n_min, n_max, step;
};

inline GridDefaults default_grid(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Scalar: return {1, 200, 5};
    case ScenarioKind::CostEff: return {50, 1200, 50};
    case ScenarioKind::Precision: return {1, 120, 1};
    case ScenarioKind::TwoProp: return {10, 500, 20};
  }
  return {1, 100, 1};
}

}  // namespace detail

/// Deep merge: object fields of `patch` override `base` recursively, any
/// other value replaces the base value.
inline json merge_config(json base, const json& patch) {
  if (!base.is_object() || !patch.is_object()) return patch;
  for (const auto& [key, value] : patch.items()) {
    if (base.contains(key) && base.at(key).is_object() && value.is_object())
      base[key] = merge_config(base.at(key), value);
    else
      base[key] = value;
  }
  return base;
}

inline ScenarioConfig parse_config(const json& j) {
  ScenarioConfig cfg;
  if (!j.contains("scenario")) detail::missing("scenario");
  cfg.scenario = detail::parse_scenario_kind(j.at("scenario").get<std::string>());

  const bool mc_only = cfg.scenario == ScenarioKind::Precision ||
                       cfg.scenario == ScenarioKind::TwoProp ||
                       cfg.scenario == ScenarioKind::CostEff;
  cfg.engine = detail::parse_engine_kind(
      j.contains("engine") ? j.at("engine").get<std::string>()
                           : (mc_only ? "mc-known-var" : "closed-form"));

  const double default_alpha = cfg.scenario == ScenarioKind::CostEff ? 0.025 : 0.05;
  cfg.alpha = detail::get_number(j, "alpha", default_alpha);
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) detail::bad("alpha", "must lie in (0,1)");
  if (j.contains("n")) cfg.n = detail::get_int(j, "n", 0);

  switch (cfg.scenario) {
    case ScenarioKind::Scalar: {
      const json s = j.value("scalar", json::object());
      if (!s.contains("delta")) detail::missing("scalar.delta");
      cfg.scalar.delta = detail::as_number(s.at("delta"), "scalar.delta");
      cfg.scalar.sigma = detail::get_number(s, "sigma", 1.0);
      cfg.scalar.n_a = detail::get_precision_param(s, "n_a", 0.0);
      cfg.scalar.n_d = detail::get_precision_param(s, "n_d", kInfinitePrecision);
      cfg.scalar.alpha = cfg.alpha;
      if (s.contains("n0")) cfg.n0 = detail::as_number(s.at("n0"), "scalar.n0");
      break;
    }
    case ScenarioKind::CostEff: {
      const json c = j.value("costeff", json::object());
      if (!c.contains("K")) detail::missing("costeff.K");
      cfg.costeff.K = detail::as_number(c.at("K"), "costeff.K");
      costeff::CostEffConfig defaults;
      cfg.costeff.sigma2 = detail::get_number(c, "sigma2", defaults.sigma2);
      cfg.costeff.tau2 = detail::get_number(c, "tau2", defaults.tau2);
      cfg.costeff.alpha = cfg.alpha;
      if (cfg.engine == EngineKind::ClosedForm)
        detail::bad("engine", "closed-form is not available for scenario 'costeff'");
      break;
    }
    case ScenarioKind::Precision: {
      const json p = j.value("precision", json::object());
      if (!p.contains("d")) detail::missing("precision.d");
      cfg.precision.d = detail::as_number(p.at("d"), "precision.d");
      cfg.precision.sigma2 = detail::get_number(p, "sigma2", 1.0);
      cfg.precision.theta0_a = detail::get_number(p, "theta0_a", 0.0);
      cfg.precision.theta0_d = detail::get_number(p, "theta0_d", 0.0);
      cfg.precision.n_a = detail::get_precision_param(p, "n_a", 0.0);
      cfg.precision.n_d = detail::get_precision_param(p, "n_d", kInfinitePrecision);
      cfg.precision.alpha = cfg.alpha;
      if (p.contains("mode")) {
        const std::string m = p.at("mode").get<std::string>();
        if (m == "coverage-at-xbar")
          cfg.precision_mode = precision::PrecisionMode::CoverageAtXbar;
        else if (m == "theta-draw")
          cfg.precision_mode = precision::PrecisionMode::ThetaDraw;
        else
          detail::bad("precision.mode", "expected coverage-at-xbar or theta-draw");
      }
      if (cfg.engine != EngineKind::McKnownVar)
        detail::bad("engine", "scenario 'precision' supports mc-known-var only");
      break;
    }
    case ScenarioKind::TwoProp: {
      const json t = j.value("two_prop", json::object());
      cfg.twoprop.alpha1 = detail::get_number(t, "alpha1", 1.0);
      cfg.twoprop.beta1 = detail::get_number(t, "beta1", 1.0);
      cfg.twoprop.alpha2 = detail::get_number(t, "alpha2", 1.0);
      cfg.twoprop.beta2 = detail::get_number(t, "beta2", 1.0);
      const int psi = detail::get_int(t, "psi", 0);
      if (psi != 0 && psi != 1) detail::bad("two_prop.psi", "expected 0 or 1");
      cfg.twoprop.psi = psi == 1 ? betabinom::ProportionSource::Exact
                                 : betabinom::ProportionSource::DrawFromPrior;
      cfg.twoprop.p1 = detail::get_number(t, "p1", -1.0);
      cfg.twoprop.p2 = detail::get_number(t, "p2", -1.0);
      if (psi == 1 && (!t.contains("p1") || !t.contains("p2")))
        detail::missing("two_prop.p1 and two_prop.p2 (psi = 1)");
      cfg.twoprop.n1 = detail::get_int(t, "n1", cfg.n.value_or(0));
      cfg.twoprop.n2 = detail::get_int(t, "n2", cfg.n.value_or(0));
      cfg.twoprop.alpha = cfg.alpha;
      if (cfg.engine != EngineKind::McKnownVar)
        detail::bad("engine", "scenario 'two-prop' supports mc-known-var only");
      break;
    }
  }

  if (cfg.engine == EngineKind::McUnknownVar) {
    if (!j.contains("variance_priors")) detail::missing("variance_priors");
    const json& v = j.at("variance_priors");
    for (const char* key : {"a_design", "b_design", "a_analysis", "b_analysis"})
      if (!v.contains(key)) detail::missing(std::string("variance_priors.") + key);
    cfg.ig_design = IgParams{detail::as_number(v.at("a_design"), "variance_priors.a_design"),
                             detail::as_number(v.at("b_design"), "variance_priors.b_design")};
    cfg.ig_analysis =
        IgParams{detail::as_number(v.at("a_analysis"), "variance_priors.a_analysis"),
                 detail::as_number(v.at("b_analysis"), "variance_priors.b_analysis")};
  }

  const json mc = j.value("mc", json::object());
  cfg.mc.replicates = detail::get_int(mc, "replicates", 1000);
  cfg.mc.inner_samples = detail::get_int(mc, "inner_samples", 500);
  cfg.mc.worker_count = detail::get_int(mc, "workers", 1);
  if (mc.contains("seed")) {
    if (!mc.at("seed").is_number()) detail::bad("mc.seed", "expected an integer");
    cfg.mc.master_seed = mc.at("seed").get<std::uint64_t>();
  } else {
    std::random_device rd;
    cfg.mc.master_seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    cfg.seed_sampled = true;
  }

  const detail::GridDefaults grid = detail::default_grid(cfg.scenario);
  const json sz = j.value("sizing", json::object());
  if (sz.contains("gamma")) cfg.sizing.gamma = detail::as_number(sz.at("gamma"), "sizing.gamma");
  cfg.sizing.n_min = detail::get_int(sz, "n_min", grid.n_min);
  cfg.sizing.n_max = detail::get_int(sz, "n_max", grid.n_max);
  cfg.sizing.step = detail::get_int(sz, "step", grid.step);
  cfg.sizing.refine_window = detail::get_int(sz, "refine_window", 1);

  const json out = j.value("output", json::object());
  cfg.output.curve_csv = out.value("curve_csv", std::string("curve.csv"));
  cfg.output.summary_json = out.value("summary_json", std::string("summary.json"));
  cfg.log_fit = j.value("log_fit", false);
  return cfg;
}

/// Canonical echo of the effective configuration; parse_config(echo_config(c))
/// reproduces c.
inline json echo_config(const ScenarioConfig& cfg) {
  json j;
  j["scenario"] = detail::scenario_name(cfg.scenario);
  j["engine"] = detail::engine_name(cfg.engine);
  j["alpha"] = cfg.alpha;
  if (cfg.n) j["n"] = *cfg.n;
  auto precision_param = [](double v) -> json {
    if (std::isinf(v)) return "inf";
    return v;
  };
  switch (cfg.scenario) {
    case ScenarioKind::Scalar: {
      json s;
      s["delta"] = cfg.scalar.delta;
      s["sigma"] = cfg.scalar.sigma;
      s["n_a"] = precision_param(cfg.scalar.n_a);
      s["n_d"] = precision_param(cfg.scalar.n_d);
      if (cfg.n0) s["n0"] = *cfg.n0;
      j["scalar"] = std::move(s);
      break;
    }
    case ScenarioKind::CostEff: {
      json c;
      c["K"] = cfg.costeff.K;
      c["sigma2"] = cfg.costeff.sigma2;
      c["tau2"] = cfg.costeff.tau2;
      j["costeff"] = std::move(c);
      break;
    }
    case ScenarioKind::Precision: {
      json p;
      p["d"] = cfg.precision.d;
      p["sigma2"] = cfg.precision.sigma2;
      p["theta0_a"] = cfg.precision.theta0_a;
      p["theta0_d"] = cfg.precision.theta0_d;
      p["n_a"] = precision_param(cfg.precision.n_a);
      p["n_d"] = precision_param(cfg.precision.n_d);
      p["mode"] = cfg.precision_mode == precision::PrecisionMode::CoverageAtXbar
                      ? "coverage-at-xbar"
                      : "theta-draw";
      j["precision"] = std::move(p);
      break;
    }
    case ScenarioKind::TwoProp: {
      json t;
      t["n1"] = cfg.twoprop.n1;
      t["n2"] = cfg.twoprop.n2;
      t["alpha1"] = cfg.twoprop.alpha1;
      t["beta1"] = cfg.twoprop.beta1;
      t["alpha2"] = cfg.twoprop.alpha2;
      t["beta2"] = cfg.twoprop.beta2;
      t["psi"] = cfg.twoprop.psi == betabinom::ProportionSource::Exact ? 1 : 0;
      if (cfg.twoprop.psi == betabinom::ProportionSource::Exact) {
        t["p1"] = cfg.twoprop.p1;
        t["p2"] = cfg.twoprop.p2;
      }
      j["two_prop"] = std::move(t);
      break;
    }
  }
  if (cfg.ig_design) {
    json v;
    v["a_design"] = cfg.ig_design->shape;
    v["b_design"] = cfg.ig_design->scale;
    v["a_analysis"] = cfg.ig_analysis->shape;
    v["b_analysis"] = cfg.ig_analysis->scale;
    j["variance_priors"] = std::move(v);
  }
  json mc;
  mc["replicates"] = cfg.mc.replicates;
  mc["inner_samples"] = cfg.mc.inner_samples;
  mc["seed"] = cfg.mc.master_seed;
  mc["workers"] = cfg.mc.worker_count;
  j["mc"] = std::move(mc);
  json sz;
  if (cfg.sizing.gamma) sz["gamma"] = *cfg.sizing.gamma;
  sz["n_min"] = cfg.sizing.n_min;
  sz["n_max"] = cfg.sizing.n_max;
  sz["step"] = cfg.sizing.step;
  sz["refine_window"] = cfg.sizing.refine_window;
  j["sizing"] = std::move(sz);
  json out;
  out["curve_csv"] = cfg.output.curve_csv;
  out["summary_json"] = cfg.output.summary_json;
  j["output"] = std::move(out);
  j["log_fit"] = cfg.log_fit;
  return j;
}

inline std::string config_hash(const json& echoed) {
  const std::string dump = echoed.dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// ---------------------------------------------------------------------------
// Engines
// ---------------------------------------------------------------------------

/// Single-point assurance evaluator used for both point runs and grids.
inline AssuranceEstimate evaluate_at(const ScenarioConfig& cfg, int n,
                                     const MCSettings& settings) {
  switch (cfg.scenario) {
    case ScenarioKind::Scalar: {
      scalar::ScalarConfig s = cfg.scalar;
      s.n = n;
      switch (cfg.engine) {
        case EngineKind::ClosedForm: {
          const double value =
              cfg.n0 ? single_prior_assurance(s.delta, s.sigma, n, *cfg.n0, s.alpha)
                     : scalar::closed_form(s);
          return AssuranceEstimate{value, 0.0, 0, std::nullopt, settings.master_seed};
        }
        case EngineKind::McKnownVar:
          return scalar::assurance_known(s, settings);
        case EngineKind::McUnknownVar:
          return scalar::assurance_unknown(s, *cfg.ig_design, *cfg.ig_analysis, settings);
      }
      break;
    }
    case ScenarioKind::CostEff: {
      costeff::CostEffConfig c = cfg.costeff;
      c.n = n;
      if (cfg.engine == EngineKind::McUnknownVar)
        return costeff::assurance_unknown(c, *cfg.ig_design, *cfg.ig_analysis, settings);
      return costeff::assurance(c, settings);
    }
    case ScenarioKind::Precision: {
      precision::PrecisionConfig p = cfg.precision;
      p.n = n;
      return precision::assurance(p, settings, cfg.precision_mode);
    }
    case ScenarioKind::TwoProp: {
      betabinom::PropDesign d = cfg.twoprop;
      d.n1 = n;
      d.n2 = n;
      return betabinom::assurance_two_prop(d, settings);
    }
  }
  throw ConfigError("unsupported scenario/engine combination");
}

inline sizing::Engine make_engine(const ScenarioConfig& cfg) {
  return [cfg](int n, const MCSettings& settings) { return evaluate_at(cfg, n, settings); };
}

inline sizing::SizingRequest make_sizing_request(const ScenarioConfig& cfg) {
  sizing::SizingRequest req;
  req.engine = make_engine(cfg);
  req.gamma = cfg.sizing.gamma.value_or(0.5);
  req.n_min = cfg.sizing.n_min;
  req.n_max = cfg.sizing.n_max;
  req.step = cfg.sizing.step;
  req.refine_window = cfg.sizing.refine_window;
  req.settings = cfg.mc;
  return req;
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << contents;
}

}  // namespace detail

inline std::string curve_to_csv(const std::vector<sizing::CurvePoint>& curve,
                                const std::string& engine, std::uint64_t seed) {
  std::string csv = "n,assurance,stderr,engine,seed,replicates\n";
  for (const auto& pt : curve) {
    csv += std::to_string(pt.n);
    csv += ',';
    csv += detail::fmt_double(pt.assurance);
    csv += ',';
    csv += detail::fmt_double(pt.std_error);
    csv += ',';
    csv += engine;
    csv += ',';
    csv += std::to_string(seed);
    csv += ',';
    csv += std::to_string(pt.replicates);
    csv += '\n';
  }
  return csv;
}

struct RunArtifacts {
  int exit_code = 0;
  json summary;
};

namespace detail {

inline json base_summary(const ScenarioConfig& cfg, std::optional<int> n_star,
                         std::optional<double> gamma, std::optional<std::string> curve_file,
                         double elapsed_ms) {
  const json echoed = echo_config(cfg);
  json j;
  j["n_star"] = n_star ? json(*n_star) : json(nullptr);
  j["gamma"] = gamma ? json(*gamma) : json(nullptr);
  j["curve_file"] = curve_file ? json(*curve_file) : json(nullptr);
  j["seed"] = cfg.mc.master_seed;
  j["config"] = echoed;
  j["elapsed_ms"] = elapsed_ms;
  j["config_hash"] = config_hash(echoed);
  return j;
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

}  // namespace detail

/// `assurance`: one point estimate at the configured n.
inline RunArtifacts run_assurance(const ScenarioConfig& cfg) {
  const detail::Stopwatch watch;
  if (!cfg.n && cfg.scenario != ScenarioKind::TwoProp) detail::missing("n");
  int n = cfg.n.value_or(0);
  if (cfg.scenario == ScenarioKind::TwoProp) {
    n = cfg.n.value_or(cfg.twoprop.n1);
    if (n < 1) detail::missing("n (or two_prop.n1/n2)");
  }
  AssuranceEstimate est;
  if (cfg.scenario == ScenarioKind::TwoProp && !cfg.n) {
    est = betabinom::assurance_two_prop(cfg.twoprop, cfg.mc);
  } else {
    est = evaluate_at(cfg, n, cfg.mc);
  }
  RunArtifacts out;
  out.summary = detail::base_summary(cfg, std::nullopt, cfg.sizing.gamma, std::nullopt,
                                     watch.elapsed_ms());
  out.summary["assurance"] = est.estimate;
  out.summary["stderr"] = est.std_error;
  out.summary["replicates"] = est.replicates;
  return out;
}

/// `curve`: assurance across the configured n-grid, written as CSV.
inline RunArtifacts run_curve(const ScenarioConfig& cfg) {
  const detail::Stopwatch watch;
  sizing::SizingRequest req = make_sizing_request(cfg);
  const sizing::SizingResult res = sizing::assurance_curve(req);
  detail::write_file(cfg.output.curve_csv,
                     curve_to_csv(res.curve, detail::engine_name(cfg.engine),
                                  cfg.mc.master_seed));
  RunArtifacts out;
  out.summary = detail::base_summary(cfg, std::nullopt, cfg.sizing.gamma,
                                     cfg.output.curve_csv, watch.elapsed_ms());
  if (cfg.log_fit) {
    const sizing::LogFit fit = sizing::fit_log_curve(res.curve);
    out.summary["log_fit"] = json{{"intercept", fit.intercept}, {"slope", fit.slope}};
  }
  detail::write_file(cfg.output.summary_json, out.summary.dump(2) + "\n");
  return out;
}

/// `size`: minimal n achieving the target assurance. Exit 3 when the target
/// is unreachable on the grid.
inline RunArtifacts run_size(const ScenarioConfig& cfg) {
  const detail::Stopwatch watch;
  if (!cfg.sizing.gamma) detail::missing("sizing.gamma");
  sizing::SizingRequest req = make_sizing_request(cfg);
  const sizing::SizingResult res = sizing::min_sample_size(req);
  detail::write_file(cfg.output.curve_csv,
                     curve_to_csv(res.curve, detail::engine_name(cfg.engine),
                                  cfg.mc.master_seed));
  RunArtifacts out;
  out.exit_code = res.n_star ? 0 : 3;
  out.summary = detail::base_summary(cfg, res.n_star, cfg.sizing.gamma, cfg.output.curve_csv,
                                     watch.elapsed_ms());
  out.summary["max_smoothed_assurance"] = res.max_smoothed;
  if (cfg.log_fit) {
    const sizing::LogFit fit = sizing::fit_log_curve(res.curve);
    out.summary["log_fit"] = json{{"intercept", fit.intercept}, {"slope", fit.slope}};
  }
  detail::write_file(cfg.output.summary_json, out.summary.dump(2) + "\n");
  return out;
}

/// `power`: frequentist operating characteristic of the scenario.
inline RunArtifacts run_power(const ScenarioConfig& cfg) {
  const detail::Stopwatch watch;
  RunArtifacts out;
  switch (cfg.scenario) {
    case ScenarioKind::Scalar: {
      if (!cfg.n) detail::missing("n");
      out.summary = detail::base_summary(cfg, std::nullopt, std::nullopt, std::nullopt,
                                         watch.elapsed_ms());
      out.summary["power"] =
          freq_power(cfg.scalar.delta, cfg.scalar.sigma, *cfg.n, cfg.alpha);
      return out;
    }
    case ScenarioKind::TwoProp: {
      const int n = cfg.n.value_or(cfg.twoprop.n1);
      if (n < 1) detail::missing("n (or two_prop.n1)");
      if (cfg.twoprop.psi != betabinom::ProportionSource::Exact)
        detail::bad("two_prop.psi", "power needs exact proportions (psi = 1)");
      out.summary = detail::base_summary(cfg, std::nullopt, std::nullopt, std::nullopt,
                                         watch.elapsed_ms());
      out.summary["power"] =
          betabinom::freq_prop_power(cfg.twoprop.p1, cfg.twoprop.p2, n, cfg.alpha);
      return out;
    }
    case ScenarioKind::Precision: {
      out.summary = detail::base_summary(cfg, std::nullopt, std::nullopt, std::nullopt,
                                         watch.elapsed_ms());
      out.summary["sample_size"] = precision::freq_sample_size(
          cfg.precision.d, std::sqrt(cfg.precision.sigma2), cfg.alpha);
      return out;
    }
    case ScenarioKind::CostEff:
      detail::bad("scenario", "no frequentist power form for 'costeff'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Published-table reproduction report
// ---------------------------------------------------------------------------

struct TableRow {
  double K;
  int n;
  int replicates;
  double reference;
  double estimate;
  double std_error;
  bool within;
};

/// Reruns the published cost-effectiveness operating points (four (K, n)
/// pairs at R in {250, 500, 1000}) and the K = 20000 spot grid, comparing
/// against the reference values.
inline std::vector<TableRow> reproduce_tables(std::uint64_t seed, int workers = 1) {
  struct Cell {
    double K;
    int n;
    double ref[3];  // R = 250, 500, 1000
  };
  static const Cell kCells[4] = {
      {5000, 1048, {0.708, 0.701, 0.700}},
      {7000, 541, {0.676, 0.714, 0.694}},
      {10000, 382, {0.688, 0.676, 0.697}},
      {20000, 285, {0.716, 0.698, 0.719}},
  };
  static const int kReps[3] = {250, 500, 1000};
  static const std::pair<int, double> kSpot[4] = {
      {1, 0.473}, {185, 0.655}, {285, 0.697}, {1200, 0.782}};

  std::vector<TableRow> rows;
  for (int ri = 0; ri < 3; ++ri) {
    for (const Cell& cell : kCells) {
      costeff::CostEffConfig cfg;
      cfg.K = cell.K;
      cfg.n = cell.n;
      const AssuranceEstimate est =
          costeff::assurance(cfg, MCSettings{kReps[ri], 1, seed, workers});
      const double diff = std::abs(est.estimate - cell.ref[ri]);
      rows.push_back({cell.K, cell.n, kReps[ri], cell.ref[ri], est.estimate, est.std_error,
                      diff <= 3.5 * est.std_error});
    }
  }
  for (const auto& [n, ref] : kSpot) {
    costeff::CostEffConfig cfg;
    cfg.K = 20000;
    cfg.n = n;
    const AssuranceEstimate est = costeff::assurance(cfg, MCSettings{1000, 1, seed, workers});
    const double diff = std::abs(est.estimate - ref);
    rows.push_back(
        {20000, n, 1000, ref, est.estimate, est.std_error, diff <= 3.5 * est.std_error});
  }
  return rows;
}

inline void print_table_report(const std::vector<TableRow>& rows, std::ostream& os) {
  os << "cost-effectiveness reference reproduction (known variance)\n";
  char line[160];
  std::snprintf(line, sizeof line, "%8s %6s %6s %10s %10s %8s %12s %7s\n", "K", "n", "R",
                "reference", "estimate", "|diff|", "3.5*stderr", "within");
  os << line;
  for (const TableRow& r : rows) {
    std::snprintf(line, sizeof line, "%8.0f %6d %6d %10.3f %10.3f %8.3f %12.3f %7s\n", r.K,
                  r.n, r.replicates, r.reference, r.estimate,
                  std::abs(r.estimate - r.reference), 3.5 * r.std_error,
                  r.within ? "yes" : "NO");
    os << line;
  }
}

// ---------------------------------------------------------------------------
// Entry point shared by the binary and the tests
// ---------------------------------------------------------------------------

/// Dispatches one subcommand against a merged configuration. Returns the
/// process exit code: 0 success, 2 configuration error, 3 target not
/// achieved.
inline int run(const std::string& command, const json& merged, std::ostream& out,
               std::ostream& err) {
  try {
    if (command == "reproduce-tables") {
      std::uint64_t seed = 42;
      int workers = 1;
      if (merged.contains("mc")) {
        if (merged.at("mc").contains("seed")) seed = merged.at("mc").at("seed").get<std::uint64_t>();
        if (merged.at("mc").contains("workers")) workers = merged.at("mc").at("workers").get<int>();
      }
      print_table_report(reproduce_tables(seed, workers), out);
      return 0;
    }
    const ScenarioConfig cfg = parse_config(merged);
    if (cfg.seed_sampled)
      err << "seed not supplied; sampled seed " << cfg.mc.master_seed << "\n";
    RunArtifacts artifacts;
    if (command == "power")
      artifacts = run_power(cfg);
    else if (command == "assurance")
      artifacts = run_assurance(cfg);
    else if (command == "curve")
      artifacts = run_curve(cfg);
    else if (command == "size")
      artifacts = run_size(cfg);
    else
      throw ConfigError("unknown command: " + command);
    out << artifacts.summary.dump(2) << "\n";
    return artifacts.exit_code;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    // Out-of-domain parameter values are configuration mistakes here.
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace assure::cli
