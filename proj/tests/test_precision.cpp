#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "assure/precision.hpp"
#include "oracles.hpp"

using namespace assure;
using precision::PrecisionConfig;
using precision::PrecisionMode;

TEST_CASE("inner coverage", "[precision]") {
  SECTION("vague analysis prior makes coverage independent of the sample mean") {
    PrecisionConfig cfg{25, 0.8, 0.0, 0.0, 0.0, 10.0, 4.0, 0.05};
    const double at_zero = precision::inner_coverage(0.0, cfg);
    const double at_five = precision::inner_coverage(5.0, cfg);
    REQUIRE(at_zero == Catch::Approx(at_five).margin(1e-14));
    const double direct =
        2.0 * std_normal_cdf(std::sqrt(25.0) * 0.8 / 2.0) - 1.0;
    REQUIRE(at_zero == Catch::Approx(direct).margin(1e-12));
  }
  SECTION("infinite half-width covers everything") {
    PrecisionConfig cfg{16, 1e9, 0.3, 0.0, 4.0, 10.0, 4.0, 0.05};
    REQUIRE(precision::inner_coverage(0.7, cfg) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("worked value with the prior centred at the sample mean") {
    const double xbar = 1.7;
    PrecisionConfig cfg{16, 1.0, xbar, 0.0, 4.0, 10.0, 4.0, 0.05};
    const double got = precision::inner_coverage(xbar, cfg);
    REQUIRE(got == Catch::Approx(0.9747).margin(5e-4));
    const long double expect =
        oracles::normal_cdf_ref(std::sqrt(20.0L) / 2.0L) -
        oracles::normal_cdf_ref(-std::sqrt(20.0L) / 2.0L);
    REQUIRE(got == Catch::Approx(static_cast<double>(expect)).margin(1e-12));
  }
  SECTION("coverage lies in [0,1] and grows with d") {
    RngStream rng(300, 0);
    for (int rep = 0; rep < 1000; ++rep) {
      PrecisionConfig cfg;
      cfg.n = 1 + static_cast<int>(rng.uniform() * 60);
      cfg.d = 0.05 + rng.uniform();
      cfg.theta0_a = rng.normal();
      cfg.n_a = rng.uniform() * 10.0;
      cfg.sigma2 = 0.3 + 3.0 * rng.uniform();
      const double xbar = rng.normal();
      const double narrow = precision::inner_coverage(xbar, cfg);
      PrecisionConfig wider = cfg;
      wider.d = cfg.d + 0.5;
      const double wide = precision::inner_coverage(xbar, wider);
      REQUIRE(narrow >= 0.0);
      REQUIRE(narrow <= 1.0);
      REQUIRE(wide >= narrow);
    }
  }
  SECTION("posterior mean sits between the prior mean and the sample mean") {
    RngStream rng(301, 0);
    for (int rep = 0; rep < 200; ++rep) {
      const double n = 1.0 + rng.uniform() * 50.0;
      const double n_a = 0.1 + rng.uniform() * 20.0;
      const double theta0 = rng.normal();
      const double xbar = rng.normal();
      const double lambda = (n * xbar + n_a * theta0) / (n_a + n);
      REQUIRE(lambda >= std::min(theta0, xbar) - 1e-12);
      REQUIRE(lambda <= std::max(theta0, xbar) + 1e-12);
    }
  }
}

TEST_CASE("vague-prior assurance is a deterministic step in n", "[precision]") {
  // sigma = 2, d = 0.5, alpha = 0.05: the step sits at n = 62.
  const MCSettings settings{200, 1, 55, 4};
  for (int n = 40; n < 90; ++n) {
    PrecisionConfig cfg{n, 0.5, 0.7, 0.3, 0.0, 25.0, 4.0, 0.05};
    const AssuranceEstimate est = precision::assurance(cfg, settings);
    const double indicator =
        2.0 * std_normal_cdf(std::sqrt(static_cast<double>(n)) * 0.5 / 2.0) - 1.0 >= 0.95
            ? 1.0
            : 0.0;
    REQUIRE(est.estimate == indicator);
    REQUIRE(est.std_error == 0.0);
    REQUIRE((n >= 62) == (est.estimate == 1.0));
  }
  REQUIRE(precision::freq_sample_size(0.5, 2.0, 0.05) == 62);
}

TEST_CASE("frequentist precision sample size", "[precision]") {
  REQUIRE(precision::freq_sample_size(1.0, 1.0, 0.05) == 4);
  REQUIRE(precision::freq_sample_size(0.5, 2.0, 0.05) == 62);
  SECTION("doubling the half-width quarters the pre-ceiling size") {
    const double z = std_normal_quantile(0.975);
    for (double d : {0.2, 0.5, 1.3}) {
      const double raw = z * z * 4.0 / (d * d);
      const double raw2 = z * z * 4.0 / (4.0 * d * d);
      REQUIRE(raw2 == Catch::Approx(raw / 4.0).margin(1e-12));
      REQUIRE(precision::freq_sample_size(2.0 * d, 2.0, 0.05) ==
              static_cast<int>(std::ceil(raw / 4.0)));
    }
  }
  REQUIRE_THROWS_AS(precision::freq_sample_size(0.0, 1.0, 0.05), DomainError);
}

TEST_CASE("vanishing half-width forces zero assurance", "[precision]") {
  PrecisionConfig cfg{50, 1e-12, 0.0, 0.0, 2.0, 10.0, 4.0, 0.05};
  const AssuranceEstimate est = precision::assurance(cfg, MCSettings{100, 1, 9, 1});
  REQUIRE(est.estimate == 0.0);
}

TEST_CASE("theta-draw mode is genuinely random where the default is exact", "[precision]") {
  // Just past the step the default mode accepts every replicate; plugging a
  // posterior draw into the window keeps the outcome near a coin flip.
  PrecisionConfig cfg{62, 0.5, 0.7, 0.3, 0.0, 25.0, 4.0, 0.05};
  const MCSettings settings{400, 1, 123, 4};
  const AssuranceEstimate exact = precision::assurance(cfg, settings);
  REQUIRE(exact.estimate == 1.0);
  // The window is widest at theta = xbar, so adding posterior noise can only
  // shrink coverage; just past the step almost every draw falls below 1-alpha.
  const AssuranceEstimate literal =
      precision::assurance(cfg, settings, PrecisionMode::ThetaDraw);
  REQUIRE(literal.estimate > 0.01);
  REQUIRE(literal.estimate < 0.4);
}

TEST_CASE("design precision edge cases", "[precision]") {
  PrecisionConfig cfg{20, 0.5, 0.0, 0.0, 1.0, 0.0, 4.0, 0.05};
  REQUIRE_THROWS_AS(precision::assurance(cfg, MCSettings{10, 1, 1, 1}), DomainError);
  cfg.n_d = std::numeric_limits<double>::infinity();
  REQUIRE_NOTHROW(precision::assurance(cfg, MCSettings{10, 1, 1, 1}));
}
