#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "zbm/parallel.hpp"
#include "zbm/process.hpp"
#include "zbm/rng.hpp"

namespace zbm {

// Simulated standard complex Brownian motion B = (B1 + i B2)/sqrt(2):
// E|B(alpha)|^2 = alpha, each component of variance alpha/2.
struct BrownianPath {
  AlphaGrid alpha_grid;
  std::vector<Complex> values;  // values[0] = 0

  const std::vector<double>& alphas() const { return *alpha_grid; }
};

inline constexpr std::uint64_t kBmStreamBase = 0xB0'0000'0000ull;

inline BrownianPath simulate_bm(AlphaGrid grid, std::uint64_t seed,
                                std::uint64_t stream = 0) {
  const auto& alphas = *grid;
  if (alphas.empty() || alphas[0] != 0.0)
    throw domain_error("simulate_bm: grid must start at 0");
  Philox rng(seed, kBmStreamBase + stream);
  BrownianPath path;
  path.alpha_grid = std::move(grid);
  path.values.assign(alphas.size(), Complex{});
  for (std::size_t k = 1; k < alphas.size(); ++k) {
    double sd = std::sqrt(0.5 * (alphas[k] - alphas[k - 1]));
    path.values[k] = path.values[k - 1] + sd * rng.gaussian_complex();
  }
  return path;
}

// CDF of |N(0,1)|: 1 - 2 * upper normal tail for u >= 0, 0 below.
inline double half_normal_cdf(double u) {
  if (u < 0.0) return 0.0;
  return std::erf(u / 1.4142135623730950488);
}

// Arcsine law (2/pi) arcsin sqrt(y) on [0, 1].
inline double arcsine_cdf(double y) {
  if (y < 0.0 || y > 1.0) throw domain_error("arcsine_cdf: y outside [0,1]");
  return 0.63661977236758134308 * std::asin(std::sqrt(y));
}

// ---- Oracle statistic sampling -------------------------------------------------

enum class BmStatistic { max_with_cap, max_plain, arcsine, occupation, running_sup_at };

struct BmStatisticSpec {
  BmStatistic kind = BmStatistic::max_plain;
  double cap = 0.0;                              // for max_with_cap
  std::function<double(double)> phi;             // for occupation
  double t = 1.0;                                // occupation horizon / sup position
};

// n_paths independent draws of the statistic on simulated Brownian paths.
// Uses the same path-functional code as the zeta process, which removes any
// estimator mismatch between oracle and subject.
inline std::vector<double> bm_statistic_sample(const BmStatisticSpec& spec,
                                               std::size_t n_paths, AlphaGrid grid,
                                               std::uint64_t seed,
                                               unsigned workers = 1) {
  std::vector<double> out(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    BrownianPath path = simulate_bm(grid, seed, i);
    switch (spec.kind) {
      case BmStatistic::max_with_cap:
        out[i] = max_statistic(path.values, spec.cap);
        break;
      case BmStatistic::max_plain:
        out[i] = max_plain(path.values);
        break;
      case BmStatistic::arcsine:
        out[i] = arcsine_statistic(path.alphas(), path.values);
        break;
      case BmStatistic::occupation:
        out[i] = occupation_functional(path.alphas(), path.values, spec.phi, spec.t);
        break;
      case BmStatistic::running_sup_at: {
        std::vector<double> sup = running_sup(path.values);
        const auto& alphas = path.alphas();
        std::size_t k = 0;
        while (k + 1 < alphas.size() && alphas[k] < spec.t) ++k;
        out[i] = sup[k];
        break;
      }
    }
  });
  return out;
}

}  // namespace zbm
