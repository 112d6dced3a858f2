#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "zbm/arith.hpp"
#include "zbm/rng.hpp"
#include "zbm/zeta.hpp"

namespace zbm {

enum class PathModel { direct, prime_sum, selberg_mollified };

inline const char* to_string(PathModel m) {
  switch (m) {
    case PathModel::direct: return "direct";
    case PathModel::prime_sum: return "prime_sum";
    case PathModel::selberg_mollified: return "selberg_mollified";
  }
  return "?";
}

using AlphaGrid = std::shared_ptr<const std::vector<double>>;

inline AlphaGrid make_alpha_grid(std::size_t points, double alpha_max = 1.0) {
  if (points < 2) throw domain_error("alpha grid needs at least 2 points");
  auto grid = std::make_shared<std::vector<double>>(points);
  for (std::size_t k = 0; k < points; ++k)
    (*grid)[k] = alpha_max * static_cast<double>(k) / static_cast<double>(points - 1);
  (*grid)[0] = 0.0;
  return grid;
}

inline double sigma_of_alpha(double T, double alpha) {
  return 0.5 + std::exp(-alpha * std::log(std::log(T)));  // 1/2 + (log T)^{-alpha}
}

// One sampled trajectory alpha -> Z^(T)(alpha).
struct ProcessPath {
  double T = 0.0;
  double tau = 0.0;
  AlphaGrid alpha_grid;
  std::vector<Complex> values;
  PathModel model = PathModel::prime_sum;
  double normalization = 1.0;  // sqrt(log log T)

  const std::vector<double>& alphas() const { return *alpha_grid; }
};

// ---- Model evaluation at one tau ---------------------------------------------

// Precomputed per-model term tables; immutable after construction, safe to
// share across sampling workers.
class PathEvaluator {
 public:
  PathEvaluator(PathModel model, double T, DirichletModelConfig config,
                const PrimeTable* primes, const MollifierTable* mollifier)
      : model_(model), T_(T), config_(config) {
    if (model == PathModel::prime_sum) {
      if (!primes || static_cast<double>(primes->limit) < config.cutoff)
        throw capacity_error("prime table smaller than prime_sum cutoff");
      logp_.reserve(primes->primes.size());
      wsqrt_.reserve(primes->primes.size());
      for (std::uint64_t p : primes->primes) {
        if (static_cast<double>(p) > config.cutoff) break;
        double u = std::log(static_cast<double>(p));
        logp_.push_back(u);
        wsqrt_.push_back(std::exp(-0.5 * u));
      }
    } else if (model == PathModel::selberg_mollified) {
      if (!mollifier) throw domain_error("selberg model needs a mollifier table");
      terms_.reserve(mollifier->entries.size());
      for (const auto& e : mollifier->entries) {
        double u = std::log(static_cast<double>(e.n));
        terms_.push_back({u, e.weight / u});
      }
    }
  }

  // L(1/2 + (log T)^{-alpha} + i tau) for each requested alpha, unnormalized.
  // Throws near_zero_error for the direct model when the horizontal walk hits
  // a near-zero of zeta.
  std::vector<Complex> evaluate(double tau, std::span<const double> alphas) const {
    switch (model_) {
      case PathModel::prime_sum: return eval_prime_sum(tau, alphas);
      case PathModel::selberg_mollified: return eval_selberg(tau, alphas);
      case PathModel::direct: return eval_direct(tau, alphas);
    }
    return {};
  }

  double T() const { return T_; }
  PathModel model() const { return model_; }

 private:
  std::vector<Complex> eval_prime_sum(double tau, std::span<const double> alphas) const {
    std::vector<Complex> out(alphas.size());
    if (logp_.empty()) return out;
    LogBinProfile<1> bins(tau, logp_.front(), logp_.back() + 1e-12,
                          detail::profile_buckets(logp_.size()));
    for (std::size_t i = 0; i < logp_.size(); ++i) bins.add(logp_[i], wsqrt_[i]);
    double llT = std::log(std::log(T_));
    for (std::size_t k = 0; k < alphas.size(); ++k)
      out[k] = bins.eval(std::exp(-alphas[k] * llT));
    return out;
  }

  std::vector<Complex> eval_selberg(double tau, std::span<const double> alphas) const {
    std::vector<Complex> out(alphas.size());
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      double sigma = sigma_of_alpha(T_, alphas[k]);
      KahanComplexSum sum;
      for (const auto& term : terms_)
        sum.add(term.w_over_logn * std::exp(-sigma * term.logn) *
                cis_neg(tau, term.logn));
      out[k] = sum.value();
    }
    return out;
  }

  std::vector<Complex> eval_direct(double tau, std::span<const double> alphas) const {
    // Walk requires descending sigma, i.e. ascending alpha.
    std::vector<std::size_t> order(alphas.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return alphas[a] < alphas[b]; });
    std::vector<double> sigmas(alphas.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      sigmas[i] = sigma_of_alpha(T_, alphas[order[i]]);
    ZetaEmProfile prof(tau);
    std::vector<Complex> walked = log_zeta_horizontal_multi(prof, sigmas);
    std::vector<Complex> out(alphas.size());
    for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = walked[i];
    return out;
  }

  PathModel model_;
  double T_;
  DirichletModelConfig config_;
  std::vector<double> logp_, wsqrt_;
  struct MollTerm {
    double logn;
    double w_over_logn;
  };
  std::vector<MollTerm> terms_;
};

// ---- Path sampling -----------------------------------------------------------

enum class TauRange { zero_to_T, T_to_2T };

// Draws tau uniformly per path index (stream-split RNG, so results do not
// depend on worker scheduling) and evaluates the process on the grid.
// Direct-model near-zero hits redraw tau; redraws are counted.
class PathSampler {
 public:
  PathSampler(const PathEvaluator& evaluator, AlphaGrid grid, TauRange range,
              std::uint64_t seed)
      : evaluator_(evaluator), grid_(std::move(grid)), range_(range), seed_(seed) {}

  struct Draw {
    ProcessPath path;
    unsigned rejections = 0;
  };

  Draw sample(std::uint64_t index) const {
    return sample_at(index, *grid_, {});
  }

  // Also evaluates at extra alphas (e.g. covariance nodes) in the same model
  // evaluation pass.
  Draw sample_at(std::uint64_t index, const std::vector<double>& grid_alphas,
                 std::span<const double> extra_alphas,
                 std::vector<Complex>* extra_out = nullptr) const {
    Philox rng(seed_, kTauStreamBase + index);
    double T = evaluator_.T();
    double lo = range_ == TauRange::zero_to_T ? 0.0 : T;
    double hi = range_ == TauRange::zero_to_T ? T : 2.0 * T;
    std::vector<double> all(grid_alphas);
    all.insert(all.end(), extra_alphas.begin(), extra_alphas.end());
    Draw draw;
    for (unsigned attempt = 0; attempt < kMaxRedraws; ++attempt) {
      double tau = rng.uniform(lo, hi);
      if (tau < 2.0) continue;  // log zeta evaluation near the pole
      try {
        std::vector<Complex> values = evaluator_.evaluate(tau, all);
        double norm = std::sqrt(std::log(std::log(T)));
        ProcessPath path;
        path.T = T;
        path.tau = tau;
        path.alpha_grid = grid_;
        path.model = evaluator_.model();
        path.normalization = norm;
        path.values.assign(values.begin(),
                           values.begin() + static_cast<std::ptrdiff_t>(grid_alphas.size()));
        for (auto& v : path.values) v /= norm;
        if (extra_out) {
          extra_out->assign(values.begin() + static_cast<std::ptrdiff_t>(grid_alphas.size()),
                            values.end());
          for (auto& v : *extra_out) v /= norm;
        }
        draw.path = std::move(path);
        return draw;
      } catch (const near_zero_error&) {
        ++draw.rejections;
      }
    }
    throw near_zero_error("path sampling: redraw budget exhausted");
  }

  static constexpr std::uint64_t kTauStreamBase = 0x7A75'0000'0000ull;
  static constexpr unsigned kMaxRedraws = 128;

 private:
  const PathEvaluator& evaluator_;
  AlphaGrid grid_;
  TauRange range_;
  std::uint64_t seed_;
};

// ---- Path functionals ----------------------------------------------------------
//
// Free functions over (alphas, values) spans so the Brownian oracle paths run
// through the identical estimator code as the zeta paths.

// max over the grid of Re, then capped below by the sigma >= 3/2 tail bound.
inline double max_statistic(std::span<const Complex> values, double cap) {
  double m = cap;
  for (const Complex& v : values) m = std::max(m, v.real());
  return m;
}

inline double max_plain(std::span<const Complex> values) {
  double m = -std::numeric_limits<double>::infinity();
  for (const Complex& v : values) m = std::max(m, v.real());
  return m;
}

// log zeta(3/2) / sqrt(log log T): upper bound for Re Z beyond alpha = 0.
inline double max_statistic_cap(double normalization) {
  static const double log_zeta_3_2 = std::log(zeta_em(1.5, 0.0, 1e-13).real());
  return log_zeta_3_2 / normalization;
}

inline double max_statistic(const ProcessPath& path) {
  return max_statistic(path.values, max_statistic_cap(path.normalization));
}

// Lebesgue measure of {alpha in [0,1]: Re >= 0} under linear interpolation.
// Grid values exactly at zero count as nonnegative.
inline double arcsine_statistic(std::span<const double> alphas,
                                std::span<const Complex> values) {
  double measure = 0.0;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    double a = alphas[k], b = alphas[k + 1];
    if (a >= 1.0) break;
    b = std::min(b, 1.0);
    double w = b - a;
    if (w <= 0.0) continue;
    double ya = values[k].real();
    double yb = values[k + 1].real();
    if (ya >= 0.0 && yb >= 0.0) {
      measure += w;
    } else if (ya < 0.0 && yb < 0.0) {
      // nothing
    } else {
      double r = ya / (ya - yb);  // crossing point fraction
      measure += (ya >= 0.0) ? r * w : (1.0 - r) * w;
    }
  }
  return measure;
}

inline double arcsine_statistic(const ProcessPath& path) {
  return arcsine_statistic(path.alphas(), path.values);
}

inline int sign_change_count(std::span<const Complex> values) {
  int changes = 0;
  for (std::size_t k = 0; k + 1 < values.size(); ++k)
    if (values[k].real() * values[k + 1].real() < 0.0) ++changes;
  return changes;
}

inline int sign_change_count(const ProcessPath& path) {
  return sign_change_count(path.values);
}

// running_sup[k] = max_{j <= k} |Re values[j]|.
inline std::vector<double> running_sup(std::span<const Complex> values) {
  std::vector<double> out(values.size());
  double m = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    m = std::max(m, std::abs(values[k].real()));
    out[k] = m;
  }
  return out;
}

inline std::vector<double> running_sup(const ProcessPath& path) {
  return running_sup(path.values);
}

// Trapezoidal integral of phi(Re values) over alpha in [0, t].
template <typename Phi>
double occupation_functional(std::span<const double> alphas,
                             std::span<const Complex> values, Phi&& phi, double t) {
  if (t > alphas.back() + 1e-12) throw domain_error("occupation: t beyond grid");
  double acc = 0.0;
  double prev_a = alphas[0];
  double prev_f = phi(values[0].real());
  for (std::size_t k = 1; k < values.size(); ++k) {
    double a = alphas[k];
    double y = values[k].real();
    if (a >= t) {
      // partial segment up to t with linearly interpolated Re value
      double span = alphas[k] - alphas[k - 1];
      double yt = span > 0.0
                      ? values[k - 1].real() +
                            (y - values[k - 1].real()) * (t - alphas[k - 1]) / span
                      : y;
      acc += 0.5 * (prev_f + phi(yt)) * (t - prev_a);
      return acc;
    }
    double f = phi(y);
    acc += 0.5 * (prev_f + f) * (a - prev_a);
    prev_a = a;
    prev_f = f;
  }
  return acc;
}

// Occupation measure of Re Z over alpha in [0, t], binned at fixed width.
struct OccupationHistogram {
  double bin_width = 0.05;
  int lo_bin = 0;                // value bin index of masses[0]
  std::vector<double> masses;    // alpha-measure per Re-value bin
};

// Statistics bundle for one path.
struct PathStatistics {
  double max_real = 0.0;
  double arcsine_measure = 0.0;
  int sign_changes = 0;
  std::vector<double> running_sup;
  OccupationHistogram occupation;
};

inline PathStatistics compute_path_statistics(const ProcessPath& path,
                                              double occupation_t = 1.0) {
  PathStatistics stats;
  stats.max_real = max_statistic(path);
  stats.arcsine_measure = arcsine_statistic(path);
  stats.sign_changes = sign_change_count(path);
  stats.running_sup = running_sup(path);

  const auto& alphas = path.alphas();
  occupation_t = std::min(occupation_t, alphas.back());
  constexpr double kBinWidth = 0.05;
  int lo = 0, hi = 0;
  for (const Complex& v : path.values) {
    int b = static_cast<int>(std::floor(v.real() / kBinWidth));
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  stats.occupation.bin_width = kBinWidth;
  stats.occupation.lo_bin = lo;
  stats.occupation.masses.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
    if (alphas[k] >= occupation_t) break;
    double w = std::min(alphas[k + 1], occupation_t) - alphas[k];
    double mid = 0.5 * (path.values[k].real() + path.values[k + 1].real());
    int b = static_cast<int>(std::floor(mid / kBinWidth));
    b = std::clamp(b, lo, hi);
    stats.occupation.masses[static_cast<std::size_t>(b - lo)] += w;
  }
  return stats;
}

}  // namespace zbm
