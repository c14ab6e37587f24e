// Command-line front end: scenario configs come from an optional JSON file
// plus flag overrides; every run is reproducible from the seed echoed into
// the summary.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "assure/scenario.hpp"

namespace {

using assure::cli::json;

struct Flags {
  std::string config_path;
  std::string scenario, engine, n_a, n_d, mode;
  double alpha = 0, K = 0, sigma2 = 0, tau2 = 0, delta = 0, sigma = 0, n0 = 0, d = 0,
         theta0_a = 0, theta0_d = 0, gamma = 0, p1 = 0, p2 = 0, alpha1 = 0, beta1 = 0,
         alpha2 = 0, beta2 = 0, a_design = 0, b_design = 0, a_analysis = 0, b_analysis = 0;
  int n = 0, n1 = 0, n2 = 0, psi = 0, replicates = 0, inner = 0, workers = 0, n_min = 0,
      n_max = 0, step = 0, refine_window = 0;
  std::uint64_t seed = 0;
  std::string out_csv, out_json;
  bool log_fit = false;
};

void attach(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON scenario file");
  sub->add_option("--scenario", f.scenario, "scalar | costeff | precision | two-prop");
  sub->add_option("--engine", f.engine, "closed-form | mc-known-var | mc-unknown-var");
  sub->add_option("--alpha", f.alpha, "credibility level");
  sub->add_option("--n", f.n, "point-evaluation sample size");
  sub->add_option("--K", f.K, "threshold unit cost (costeff)");
  sub->add_option("--sigma2", f.sigma2, "sampling variance (costeff efficacy / precision)");
  sub->add_option("--tau2", f.tau2, "cost sampling variance (costeff)");
  sub->add_option("--delta", f.delta, "effect size (scalar)");
  sub->add_option("--sigma", f.sigma, "outcome standard deviation (scalar)");
  sub->add_option("--n-a", f.n_a, "analysis prior precision, number or 'inf'");
  sub->add_option("--n-d", f.n_d, "design prior precision, number or 'inf'");
  sub->add_option("--n0", f.n0, "single-prior precision (scalar closed form)");
  sub->add_option("--d", f.d, "precision half-width (precision)");
  sub->add_option("--theta0-a", f.theta0_a, "analysis prior mean (precision)");
  sub->add_option("--theta0-d", f.theta0_d, "design prior mean (precision)");
  sub->add_option("--mode", f.mode, "precision mode: coverage-at-xbar | theta-draw");
  sub->add_option("--n1", f.n1, "first arm size (two-prop)");
  sub->add_option("--n2", f.n2, "second arm size (two-prop)");
  sub->add_option("--psi", f.psi, "1 = exact proportions, 0 = draw from priors");
  sub->add_option("--p1", f.p1, "exact proportion, arm 1");
  sub->add_option("--p2", f.p2, "exact proportion, arm 2");
  sub->add_option("--alpha1", f.alpha1, "beta prior shape, arm 1");
  sub->add_option("--beta1", f.beta1, "beta prior shape, arm 1");
  sub->add_option("--alpha2", f.alpha2, "beta prior shape, arm 2");
  sub->add_option("--beta2", f.beta2, "beta prior shape, arm 2");
  sub->add_option("--a-design", f.a_design, "design variance prior shape");
  sub->add_option("--b-design", f.b_design, "design variance prior scale");
  sub->add_option("--a-analysis", f.a_analysis, "analysis variance prior shape");
  sub->add_option("--b-analysis", f.b_analysis, "analysis variance prior scale");
  sub->add_option("--seed", f.seed, "master seed (omit to sample one)");
  sub->add_option("--replicates,-R", f.replicates, "outer Monte Carlo replicates");
  sub->add_option("--inner,-J", f.inner, "inner posterior draws (unknown variance)");
  sub->add_option("--workers", f.workers, "replicate parallelism (output-invariant)");
  sub->add_option("--gamma", f.gamma, "target assurance (size)");
  sub->add_option("--n-min", f.n_min, "grid start");
  sub->add_option("--n-max", f.n_max, "grid end");
  sub->add_option("--step", f.step, "grid step");
  sub->add_option("--refine-window", f.refine_window, "bisection stop width");
  sub->add_option("--out-csv", f.out_csv, "curve CSV path");
  sub->add_option("--out-json", f.out_json, "summary JSON path");
  sub->add_flag("--log-fit", f.log_fit, "report a log(n) fit of the curve");
}

json precision_param(const std::string& raw) {
  if (raw == "inf" || raw == "Infinity" || raw == "infinity") return json("inf");
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return json(v);
  } catch (const std::exception&) {
    throw assure::ConfigError("invalid precision parameter '" + raw +
                              "': expected a number or 'inf'");
  }
}

json overrides_from_flags(const CLI::App* sub, const Flags& f, const json& file_cfg) {
  json ov = json::object();
  auto set = [&](const char* flag, const char* path1, const char* path2, json value) {
    if (!sub->count(flag)) return;
    if (path2 == nullptr)
      ov[path1] = std::move(value);
    else
      ov[path1][path2] = std::move(value);
  };
  set("--scenario", "scenario", nullptr, f.scenario);
  set("--engine", "engine", nullptr, f.engine);
  set("--alpha", "alpha", nullptr, f.alpha);
  set("--n", "n", nullptr, f.n);

  const std::string scen = sub->count("--scenario")
                               ? f.scenario
                               : file_cfg.value("scenario", std::string("scalar"));
  const char* var_block = scen == "precision" ? "precision" : "costeff";
  const char* prior_block = scen == "precision" ? "precision" : "scalar";

  set("--K", "costeff", "K", f.K);
  set("--sigma2", var_block, "sigma2", f.sigma2);
  set("--tau2", "costeff", "tau2", f.tau2);
  set("--delta", "scalar", "delta", f.delta);
  set("--sigma", "scalar", "sigma", f.sigma);
  if (sub->count("--n-a")) ov[prior_block]["n_a"] = precision_param(f.n_a);
  if (sub->count("--n-d")) ov[prior_block]["n_d"] = precision_param(f.n_d);
  set("--n0", "scalar", "n0", f.n0);
  set("--d", "precision", "d", f.d);
  set("--theta0-a", "precision", "theta0_a", f.theta0_a);
  set("--theta0-d", "precision", "theta0_d", f.theta0_d);
  set("--mode", "precision", "mode", f.mode);
  set("--n1", "two_prop", "n1", f.n1);
  set("--n2", "two_prop", "n2", f.n2);
  set("--psi", "two_prop", "psi", f.psi);
  set("--p1", "two_prop", "p1", f.p1);
  set("--p2", "two_prop", "p2", f.p2);
  set("--alpha1", "two_prop", "alpha1", f.alpha1);
  set("--beta1", "two_prop", "beta1", f.beta1);
  set("--alpha2", "two_prop", "alpha2", f.alpha2);
  set("--beta2", "two_prop", "beta2", f.beta2);
  set("--a-design", "variance_priors", "a_design", f.a_design);
  set("--b-design", "variance_priors", "b_design", f.b_design);
  set("--a-analysis", "variance_priors", "a_analysis", f.a_analysis);
  set("--b-analysis", "variance_priors", "b_analysis", f.b_analysis);
  set("--seed", "mc", "seed", f.seed);
  set("--replicates", "mc", "replicates", f.replicates);
  set("--inner", "mc", "inner_samples", f.inner);
  set("--workers", "mc", "workers", f.workers);
  set("--gamma", "sizing", "gamma", f.gamma);
  set("--n-min", "sizing", "n_min", f.n_min);
  set("--n-max", "sizing", "n_max", f.n_max);
  set("--step", "sizing", "step", f.step);
  set("--refine-window", "sizing", "refine_window", f.refine_window);
  set("--out-csv", "output", "curve_csv", f.out_csv);
  set("--out-json", "output", "summary_json", f.out_json);
  if (sub->count("--log-fit")) ov["log_fit"] = true;
  return ov;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian assurance and sample size determination"};
  app.require_subcommand(1);
  Flags f;
  const char* commands[] = {"power", "assurance", "curve", "size", "reproduce-tables"};
  const char* descriptions[] = {
      "frequentist power / sample size for the scenario",
      "one assurance estimate at a fixed n",
      "assurance over an n-grid, written as CSV",
      "smallest n achieving the target assurance",
      "rerun the published cost-effectiveness operating points",
  };
  for (int i = 0; i < 5; ++i) attach(app.add_subcommand(commands[i], descriptions[i]), f);

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  try {
    json file_cfg = json::object();
    if (sub->count("--config")) {
      std::ifstream in(f.config_path);
      if (!in) {
        std::cerr << "configuration error: cannot open config file: " << f.config_path
                  << "\n";
        return 2;
      }
      try {
        file_cfg = json::parse(in);
      } catch (const json::parse_error& e) {
        std::cerr << "configuration error: " << f.config_path << ": " << e.what() << "\n";
        return 2;
      }
    }
    const json merged =
        assure::cli::merge_config(file_cfg, overrides_from_flags(sub, f, file_cfg));
    return assure::cli::run(sub->get_name(), merged, std::cout, std::cerr);
  } catch (const assure::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
}
