#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "zbm/oracle.hpp"
#include "zbm/stats.hpp"

using namespace zbm;

TEST_CASE("brownian path starts at zero", "[bm]") {
  AlphaGrid grid = make_alpha_grid(16, 1.0);
  for (int i = 0; i < 10; ++i) {
    BrownianPath p = simulate_bm(grid, 1, i);
    CHECK(p.values[0] == Complex{});
  }
}

TEST_CASE("brownian endpoint variance is one half per component", "[bm]") {
  AlphaGrid grid = make_alpha_grid(2, 1.0);  // only the endpoint matters
  const int n = 100000;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    BrownianPath p = simulate_bm(grid, 2, i);
    double re = p.values[1].real();
    s2 += re * re;
  }
  CHECK(s2 / n == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("brownian covariance at alpha 0.3 and 0.7", "[bm]") {
  auto grid = std::make_shared<const std::vector<double>>(
      std::vector<double>{0.0, 0.3, 0.7});
  const int n = 100000;
  Complex acc{};
  for (int i = 0; i < n; ++i) {
    BrownianPath p = simulate_bm(grid, 3, i);
    acc += std::conj(p.values[1]) * p.values[2];
  }
  acc /= static_cast<double>(n);
  CHECK(acc.real() == Catch::Approx(0.3).margin(0.02));
  CHECK(acc.imag() == Catch::Approx(0.0).margin(0.02));
}

TEST_CASE("brownian increments over disjoint intervals are uncorrelated", "[bm]") {
  auto grid = std::make_shared<const std::vector<double>>(
      std::vector<double>{0.0, 0.5, 1.0});
  const int n = 100000;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    BrownianPath p = simulate_bm(grid, 4, i);
    double x = p.values[1].real();
    double y = p.values[2].real() - p.values[1].real();
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  double corr = sxy / std::sqrt(sxx * syy);
  CHECK(std::abs(corr) <= 0.02);
}

TEST_CASE("bm grid must start at zero", "[bm]") {
  auto bad = std::make_shared<const std::vector<double>>(
      std::vector<double>{0.5, 1.0});
  CHECK_THROWS_AS(simulate_bm(bad, 1, 0), domain_error);
}

TEST_CASE("half normal cdf", "[cdf]") {
  CHECK(half_normal_cdf(-1.0) == 0.0);
  CHECK(half_normal_cdf(0.0) == 0.0);
  CHECK(half_normal_cdf(50.0) == Catch::Approx(1.0).margin(1e-15));
  // 2 Phi(1) - 1
  CHECK(half_normal_cdf(1.0) == Catch::Approx(0.6826894921370859).margin(1e-12));
}

TEST_CASE("arcsine cdf", "[cdf]") {
  CHECK(arcsine_cdf(0.0) == 0.0);
  CHECK(arcsine_cdf(1.0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(arcsine_cdf(0.5) == Catch::Approx(0.5).margin(1e-15));
  CHECK(arcsine_cdf(0.25) == Catch::Approx(1.0 / 3.0).margin(1e-15));
  CHECK_THROWS_AS(arcsine_cdf(-0.1), domain_error);
  CHECK_THROWS_AS(arcsine_cdf(1.1), domain_error);
}

TEST_CASE("bm arcsine statistic matches the analytic law", "[bmstat]") {
  BmStatisticSpec spec;
  spec.kind = BmStatistic::arcsine;
  AlphaGrid grid = make_alpha_grid(4096, 1.0);
  std::vector<double> draws = bm_statistic_sample(spec, 10000, grid, 5);
  double ks = ks_one_sample(EmpiricalDistribution(draws),
                            [](double y) { return arcsine_cdf(std::clamp(y, 0.0, 1.0)); });
  // DKW noise at n = 1e4 is 1.36/sqrt(n) ~ 0.0136; allow 1.5x for
  // discretization bias of the 4096-point grid
  CHECK(ks <= 1.5 * 1.36 / std::sqrt(10000.0));
}

TEST_CASE("bm plain max matches the half normal with variance 1/2", "[bmstat]") {
  BmStatisticSpec spec;
  spec.kind = BmStatistic::max_plain;
  AlphaGrid grid = make_alpha_grid(4096, 1.0);
  std::vector<double> draws = bm_statistic_sample(spec, 10000, grid, 6);
  // rescale to |N(0,1)| units
  for (double& v : draws) v *= std::sqrt(2.0);
  double ks = ks_one_sample(EmpiricalDistribution(draws),
                            [](double u) { return half_normal_cdf(u); });
  CHECK(ks <= 0.02);
}

TEST_CASE("bm occupation with phi = 1 is exactly t", "[bmstat]") {
  BmStatisticSpec spec;
  spec.kind = BmStatistic::occupation;
  spec.phi = [](double) { return 1.0; };
  spec.t = 0.75;
  AlphaGrid grid = make_alpha_grid(64, 1.0);
  std::vector<double> draws = bm_statistic_sample(spec, 100, grid, 7);
  for (double v : draws) CHECK(v == Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("bm statistics run through the shared functionals", "[bmstat]") {
  // the same free functions accept zeta process paths and Brownian paths
  AlphaGrid grid = make_alpha_grid(32, 1.0);
  BrownianPath b = simulate_bm(grid, 8, 0);
  double direct = arcsine_statistic(b.alphas(), b.values);
  BmStatisticSpec spec;
  spec.kind = BmStatistic::arcsine;
  std::vector<double> via_sampler = bm_statistic_sample(spec, 1, grid, 8);
  CHECK(direct == via_sampler[0]);
  double mx = max_plain(b.values);
  spec.kind = BmStatistic::max_plain;
  CHECK(mx == bm_statistic_sample(spec, 1, grid, 8)[0]);
}

TEST_CASE("bm max with cap respects the floor", "[bmstat]") {
  BmStatisticSpec spec;
  spec.kind = BmStatistic::max_with_cap;
  spec.cap = 0.56;
  AlphaGrid grid = make_alpha_grid(128, 1.0);
  std::vector<double> draws = bm_statistic_sample(spec, 500, grid, 9);
  for (double v : draws) CHECK(v >= 0.56);
}

TEST_CASE("running sup draws at an interior alpha", "[bmstat]") {
  BmStatisticSpec spec;
  spec.kind = BmStatistic::running_sup_at;
  spec.t = 0.5;
  AlphaGrid grid = make_alpha_grid(257, 1.0);
  std::vector<double> draws = bm_statistic_sample(spec, 200, grid, 10);
  for (std::size_t i = 0; i < draws.size(); ++i) {
    BrownianPath p = simulate_bm(grid, 10, i);
    std::vector<double> sup = running_sup(p.values);
    CHECK(draws[i] == sup[128]);  // alpha = 0.5 sits at index 128
  }
}
