#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "assure/costeff.hpp"
#include "assure/sizing.hpp"
#include "oracles.hpp"

using namespace assure;

TEST_CASE("design matrix and noise structure", "[costeff]") {
  costeff::CostEffConfig cfg;
  cfg.K = 5000;
  cfg.n = 2;
  const ModelDesign design = costeff::build_design(cfg);
  REQUIRE(design.X.rows() == 8);
  REQUIRE(design.X.cols() == 4);
  for (int j = 0; j < 4; ++j) {
    double colsum = 0.0;
    for (int i = 0; i < 8; ++i) colsum += design.X(i, j);
    REQUIRE(colsum == 2.0);
  }
  // Row blocks: efficacy arm 1, cost arm 1, efficacy arm 2, cost arm 2.
  const double ratio = cfg.tau2 / cfg.sigma2;
  const Vector ones(8, 1.0);
  const Vector vinv_ones = design.Vn.apply_inverse(ones);
  const std::vector<double> expected = {1.0, 1.0, ratio, ratio, 1.0, 1.0, ratio, ratio};
  for (int i = 0; i < 8; ++i) REQUIRE(vinv_ones[i] == Catch::Approx(1.0 / expected[i]));
  // sigma^2 Vn recovers the per-observation sampling variances.
  for (int i = 0; i < 8; ++i) {
    const double var = cfg.sigma2 * expected[i];
    REQUIRE(var == Catch::Approx(i % 4 < 2 ? cfg.sigma2 : cfg.tau2));
  }
}

TEST_CASE("net monetary benefit contrast", "[costeff]") {
  SECTION("zero threshold reduces to pure cost saving") {
    const Hypothesis hyp = costeff::build_contrast(0.0);
    const Vector beta = {5.0, 6000.0, 6.5, 7200.0};
    REQUIRE(dot(hyp.u, beta) == 6000.0 - 7200.0);
  }
  SECTION("published prior mean at K = 10000") {
    const Hypothesis hyp = costeff::build_contrast(10000.0);
    const Vector beta = {5.0, 6000.0, 6.5, 7200.0};
    REQUIRE(dot(hyp.u, beta) == Catch::Approx(13800.0));
    REQUIRE(hyp.C == 0.0);
  }
  SECTION("swapping treatment labels negates the benefit") {
    const Hypothesis hyp = costeff::build_contrast(7000.0);
    const Vector beta = {4.0, 5500.0, 6.0, 7000.0};
    const Vector swapped = {6.0, 7000.0, 4.0, 5500.0};
    REQUIRE(dot(hyp.u, swapped) == Catch::Approx(-dot(hyp.u, beta)));
  }
  SECTION("negative threshold is rejected") {
    REQUIRE_THROWS_AS(costeff::build_contrast(-1.0), DomainError);
  }
}

TEST_CASE("published priors", "[costeff]") {
  const auto [dp, ap] = costeff::ohagan_priors();
  REQUIRE(dp.mu == Vector{5.0, 6000.0, 6.5, 7200.0});
  REQUIRE(dp.cov(0, 2) == 3.0);
  REQUIRE(dp.cov(2, 0) == 3.0);
  REQUIRE(dp.cov(0, 0) == 4.0);
  REQUIRE(dp.cov(1, 1) == 1e7);
  REQUIRE(dp.cov(3, 3) == 1e7);
  // PSD: the efficacy block has eigenvalues 4 +/- 3.
  REQUIRE(CholeskyFactor(dp.cov).positive_definite());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) REQUIRE(ap.precision(i, j) == 0.0);
  REQUIRE_FALSE(ap.ig.has_value());

  const DesignPrior scaled = costeff::to_conjugate(dp, 4.0);
  REQUIRE(scaled.cov(0, 0) == 1.0);
  REQUIRE(scaled.cov(0, 2) == 0.75);
  REQUIRE(scaled.cov(1, 1) == 2.5e6);
}

TEST_CASE("known-variance assurance tracks the closed form at every published cell",
          "[costeff]") {
  const double ks[4] = {5000, 7000, 10000, 20000};
  const int ns[4] = {1048, 541, 382, 285};
  for (int i = 0; i < 4; ++i) {
    costeff::CostEffConfig cfg;
    cfg.K = ks[i];
    cfg.n = ns[i];
    const AssuranceEstimate est = costeff::assurance(cfg, MCSettings{800, 1, 4242, 8});
    const double cf = oracles::costeff_closed_form(cfg.K, cfg.n, cfg.sigma2, cfg.tau2);
    INFO("K=" << ks[i] << " n=" << ns[i] << " closed form " << cf);
    // Each published (K, n) pair is the smallest n whose assurance reaches 0.70.
    REQUIRE(cf >= 0.69999);
    REQUIRE(cf <= 0.7010);
    REQUIRE(oracles::costeff_closed_form(cfg.K, cfg.n - 1, cfg.sigma2, cfg.tau2) < 0.70);
    REQUIRE(std::abs(est.estimate - cf) <= 3.5 * est.std_error);
  }
}

TEST_CASE("dispersed variance priors land near the published unknown-variance point",
          "[costeff]") {
  costeff::CostEffConfig cfg;
  cfg.K = 10000;
  cfg.n = 382;
  const IgParams dispersed{3.0, 2.0 * cfg.sigma2};
  const AssuranceEstimate est =
      costeff::assurance_unknown(cfg, dispersed, dispersed, MCSettings{300, 500, 11, 8});
  REQUIRE(est.estimate >= 0.62);
  REQUIRE(est.estimate <= 0.82);
}

TEST_CASE("smoothed assurance curves rise with n for each threshold cost", "[costeff]") {
  for (double K : {5000.0, 7000.0, 10000.0, 20000.0}) {
    sizing::SizingRequest req;
    req.engine = [K](int n, const MCSettings& s) {
      costeff::CostEffConfig cfg;
      cfg.K = K;
      cfg.n = n;
      return costeff::assurance(cfg, s);
    };
    req.gamma = 0.5;
    req.n_min = 40;
    req.n_max = 1240;
    req.step = 300;
    req.settings = MCSettings{400, 1, 7, 8};
    const sizing::SizingResult res = sizing::assurance_curve(req);
    for (std::size_t i = 1; i < res.smoothed.size(); ++i)
      REQUIRE(res.smoothed[i] >= res.smoothed[i - 1]);
    REQUIRE(res.smoothed.back() > res.smoothed.front() + 0.05);
    // The monotone fit should stay close to the raw estimates.
    for (std::size_t i = 0; i < res.curve.size(); ++i)
      REQUIRE(std::abs(res.smoothed[i] - res.curve[i].assurance) <=
              4.0 * std::max(res.curve[i].std_error, 1e-3));
  }
}
