#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "assure/assurance.hpp"
#include "assure/sizing.hpp"
#include "assure/statkit.hpp"

using namespace assure;

namespace {

// Closed-form engines wrapped for the sizing interface.
sizing::Engine freq_engine(double ds, double alpha) {
  return [ds, alpha](int n, const MCSettings& s) {
    return AssuranceEstimate{freq_power(ds, 1.0, n, alpha), 0.0, s.replicates, std::nullopt,
                             s.master_seed};
  };
}

sizing::Engine single_prior_engine(double ds, double n0, double alpha) {
  return [ds, n0, alpha](int n, const MCSettings& s) {
    return AssuranceEstimate{single_prior_assurance(ds, 1.0, n, n0, alpha), 0.0, s.replicates,
                             std::nullopt, s.master_seed};
  };
}

double sse(const std::vector<double>& y, const std::vector<double>& fit) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - fit[i]) * (y[i] - fit[i]);
  return s;
}

}  // namespace

TEST_CASE("isotonic regression", "[sizing]") {
  SECTION("monotone input is returned unchanged") {
    const std::vector<double> y = {0.1, 0.2, 0.2, 0.55, 0.9};
    REQUIRE(sizing::isotonic_fit(y, {}) == y);
  }
  SECTION("textbook pooling") {
    const std::vector<double> fit = sizing::isotonic_fit({1.0, 3.0, 2.0}, {});
    REQUIRE(fit[0] == 1.0);
    REQUIRE(fit[1] == Catch::Approx(2.5));
    REQUIRE(fit[2] == Catch::Approx(2.5));
  }
  SECTION("fit minimizes squared error among monotone candidates") {
    RngStream rng(700, 0);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> y(6);
      for (auto& v : y) v = rng.uniform();
      const std::vector<double> fit = sizing::isotonic_fit(y, {});
      for (std::size_t i = 1; i < fit.size(); ++i) REQUIRE(fit[i] >= fit[i - 1] - 1e-15);
      const double best = sse(y, fit);
      for (int cand = 0; cand < 200; ++cand) {
        std::vector<double> other(6);
        for (auto& v : other) v = rng.uniform();
        std::sort(other.begin(), other.end());
        REQUIRE(best <= sse(y, other) + 1e-12);
      }
    }
  }
  SECTION("weights shift the pooled value") {
    const std::vector<double> fit = sizing::isotonic_fit({2.0, 0.0}, {3.0, 1.0});
    REQUIRE(fit[0] == Catch::Approx(1.5));
    REQUIRE(fit[1] == Catch::Approx(1.5));
  }
}

TEST_CASE("curve generation on a deterministic engine", "[sizing]") {
  sizing::SizingRequest req;
  req.engine = freq_engine(0.4, 0.05);
  req.gamma = 0.75;
  req.n_min = 1;
  req.n_max = 100;
  req.step = 1;
  req.settings = MCSettings{100, 1, 3, 1};
  const sizing::SizingResult res = sizing::assurance_curve(req);
  REQUIRE(res.curve.size() == 100);
  for (std::size_t i = 1; i < res.curve.size(); ++i)
    REQUIRE(res.curve[i].assurance > res.curve[i - 1].assurance);
  // No smoothing needed: the fit is the curve itself.
  for (std::size_t i = 0; i < res.curve.size(); ++i)
    REQUIRE(res.smoothed[i] == res.curve[i].assurance);
}

TEST_CASE("minimal sample size on the frequentist curve", "[sizing]") {
  for (int step : {1, 5, 7, 25}) {
    sizing::SizingRequest req;
    req.engine = freq_engine(0.4, 0.05);
    req.gamma = 0.75;
    req.n_min = 1;
    req.n_max = 120;
    req.step = step;
    req.settings = MCSettings{100, 1, 3, 1};
    const sizing::SizingResult res = sizing::min_sample_size(req);
    INFO("step " << step);
    REQUIRE(res.n_star.has_value());
    REQUIRE(*res.n_star == 34);
  }
}

TEST_CASE("minimal n is monotone in the target", "[sizing]") {
  int prev = 0;
  for (double gamma : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
    sizing::SizingRequest req;
    req.engine = freq_engine(0.3, 0.05);
    req.gamma = gamma;
    req.n_min = 1;
    req.n_max = 400;
    req.step = 10;
    req.settings = MCSettings{100, 1, 3, 1};
    const sizing::SizingResult res = sizing::min_sample_size(req);
    REQUIRE(res.n_star.has_value());
    REQUIRE(*res.n_star >= prev);
    prev = *res.n_star;
  }
}

TEST_CASE("unreachable target reports not-achieved with the best value", "[sizing]") {
  sizing::SizingRequest req;
  req.engine = single_prior_engine(0.4, 0.0, 0.05);  // vague prior pins assurance at 0.5
  req.gamma = 0.999;
  req.n_min = 10;
  req.n_max = 500;
  req.step = 50;
  req.settings = MCSettings{100, 1, 3, 1};
  const sizing::SizingResult res = sizing::min_sample_size(req);
  REQUIRE_FALSE(res.n_star.has_value());
  REQUIRE(res.max_smoothed == 0.5);
}

TEST_CASE("grid validation", "[sizing]") {
  sizing::SizingRequest req;
  req.engine = freq_engine(0.4, 0.05);
  req.gamma = 0.75;
  req.n_min = 50;
  req.n_max = 10;
  req.step = 1;
  REQUIRE_THROWS_AS(sizing::assurance_curve(req), ConfigError);
  req.n_max = 60;
  req.gamma = 1.5;
  REQUIRE_THROWS_AS(sizing::assurance_curve(req), ConfigError);
}

TEST_CASE("engine failures carry the offending n", "[sizing]") {
  sizing::SizingRequest req;
  req.engine = [](int n, const MCSettings& s) -> AssuranceEstimate {
    if (n > 30) throw NumericError("engine exploded");
    return {0.1, 0.0, s.replicates, std::nullopt, s.master_seed};
  };
  req.gamma = 0.75;
  req.n_min = 10;
  req.n_max = 60;
  req.step = 10;
  REQUIRE_THROWS_WITH(sizing::assurance_curve(req),
                      Catch::Matchers::ContainsSubstring("n = 40"));
}

TEST_CASE("first grid point already above target", "[sizing]") {
  sizing::SizingRequest req;
  req.engine = freq_engine(2.0, 0.05);  // enormous effect
  req.gamma = 0.9;
  req.n_min = 5;
  req.n_max = 50;
  req.step = 5;
  req.settings = MCSettings{100, 1, 3, 1};
  const sizing::SizingResult res = sizing::min_sample_size(req);
  REQUIRE(res.n_star == 5);
}

TEST_CASE("log-curve overlay recovers planted coefficients", "[sizing]") {
  std::vector<sizing::CurvePoint> curve;
  for (int n : {10, 20, 40, 80, 160})
    curve.push_back({n, 0.12 + 0.07 * std::log(static_cast<double>(n)), 0.0, 100});
  const sizing::LogFit fit = sizing::fit_log_curve(curve);
  REQUIRE(fit.intercept == Catch::Approx(0.12).margin(1e-10));
  REQUIRE(fit.slope == Catch::Approx(0.07).margin(1e-10));
  REQUIRE_THROWS_AS(sizing::fit_log_curve({curve[0]}), ConfigError);
}
