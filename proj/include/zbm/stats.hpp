#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "zbm/arith.hpp"
#include "zbm/numeric.hpp"
#include "zbm/parallel.hpp"
#include "zbm/rng.hpp"
#include "zbm/trig.hpp"
#include "zbm/zeta.hpp"

namespace zbm {

// Sorted real samples with ECDF queries.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> samples)
      : samples_(std::move(samples)) {
    if (samples_.empty()) throw domain_error("empirical distribution needs n >= 1");
    std::sort(samples_.begin(), samples_.end());
  }

  const std::vector<double>& samples() const { return samples_; }
  std::size_t n() const { return samples_.size(); }

  // P(X <= x)
  double ecdf(double x) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(n());
  }

 private:
  std::vector<double> samples_;
};

// sup_x |ECDF - cdf| including both one-sided gaps at each jump. The lower
// gap compares against the cdf's left limit, so a step cdf equal to the ECDF
// scores exactly 0; for continuous cdfs the two evaluations coincide.
inline double ks_one_sample(const EmpiricalDistribution& dist,
                            const std::function<double(double)>& cdf) {
  double n = static_cast<double>(dist.n());
  double ks = 0.0;
  for (std::size_t i = 0; i < dist.n(); ++i) {
    double x = dist.samples()[i];
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - cdf(x)));
    double left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    ks = std::max(ks, std::abs(static_cast<double>(i) / n - left));
  }
  return ks;
}

// sup-norm distance of the two ECDFs, merged scan.
inline double ks_two_sample(const EmpiricalDistribution& a,
                            const EmpiricalDistribution& b) {
  const auto& xs = a.samples();
  const auto& ys = b.samples();
  double na = static_cast<double>(xs.size());
  double nb = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double ks = 0.0;
  while (i < xs.size() || j < ys.size()) {
    double v = (j >= ys.size() || (i < xs.size() && xs[i] <= ys[j])) ? xs[i] : ys[j];
    while (i < xs.size() && xs[i] <= v) ++i;
    while (j < ys.size() && ys[j] <= v) ++j;
    ks = std::max(ks, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return ks;
}

// ---- Complex covariance ---------------------------------------------------------

// Entrywise sample version of Cov(X, Y) = E[conj(X) Y] - E[conj(X)] E[Y],
// with leave-one-out (jackknife) standard errors.
struct CovarianceEstimate {
  std::vector<double> alphas;
  std::size_t dim = 0;
  std::size_t n_samples = 0;
  std::vector<Complex> matrix;         // row-major dim x dim
  std::vector<double> standard_errors;

  Complex at(std::size_t i, std::size_t j) const { return matrix[i * dim + j]; }
  double se(std::size_t i, std::size_t j) const { return standard_errors[i * dim + j]; }
};

inline CovarianceEstimate complex_covariance(
    const std::vector<std::vector<Complex>>& samples, std::vector<double> alphas) {
  if (samples.size() < 2) throw domain_error("complex_covariance: need >= 2 samples");
  std::size_t d = samples.front().size();
  for (const auto& row : samples)
    if (row.size() != d) throw domain_error("complex_covariance: ragged samples");
  std::size_t n = samples.size();
  double dn = static_cast<double>(n);

  std::vector<Complex> s1(d, Complex{});
  std::vector<Complex> s2(d * d, Complex{});
  for (const auto& row : samples) {
    for (std::size_t i = 0; i < d; ++i) {
      s1[i] += row[i];
      for (std::size_t j = 0; j < d; ++j) s2[i * d + j] += std::conj(row[i]) * row[j];
    }
  }

  CovarianceEstimate est;
  est.alphas = std::move(alphas);
  est.dim = d;
  est.n_samples = n;
  est.matrix.assign(d * d, Complex{});
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      est.matrix[i * d + j] =
          s2[i * d + j] / dn - std::conj(s1[i] / dn) * (s1[j] / dn);

  // Jackknife over samples; SE of the complex entry as a modulus.
  std::vector<Complex> mean_loo(d * d, Complex{});
  std::vector<std::vector<Complex>> loo(n, std::vector<Complex>(d * d));
  double dm = dn - 1.0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      Complex m1i = (s1[i] - samples[s][i]) / dm;
      for (std::size_t j = 0; j < d; ++j) {
        Complex c = (s2[i * d + j] - std::conj(samples[s][i]) * samples[s][j]) / dm -
                    std::conj(m1i) * ((s1[j] - samples[s][j]) / dm);
        loo[s][i * d + j] = c;
        mean_loo[i * d + j] += c / dn;
      }
    }
  }
  est.standard_errors.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d * d; ++i) {
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) acc += std::norm(loo[s][i] - mean_loo[i]);
    est.standard_errors[i] = std::sqrt(acc * dm / dn);
  }
  return est;
}

// ---- Technical lemma checks -----------------------------------------------------

// Ratio of sum_{p <= x^3} (p^{-1-eta} - p^{-1-eta'}) to (beta - alpha) log log T
// with eta = (log T)^{-alpha}, eta' = (log T)^{-beta}. Zero for alpha = beta.
inline double lemma33_check(double alpha, double beta, double x, double T,
                            const PrimeTable& table) {
  if (!(0.0 <= alpha && alpha <= beta && beta <= 1.0))
    throw domain_error("lemma33_check: need 0 <= alpha <= beta <= 1");
  double x3 = x * x * x;
  if (static_cast<double>(table.limit) < x3)
    throw capacity_error("lemma33_check: prime table smaller than x^3");
  if (alpha == beta) return 0.0;
  double logT = std::log(T);
  double llT = std::log(logT);
  double eta = std::exp(-alpha * llT);
  double eta_p = std::exp(-beta * llT);
  KahanSum num;
  for (std::uint64_t p : table.primes) {
    if (static_cast<double>(p) > x3) break;
    double u = std::log(static_cast<double>(p));
    num.add(std::exp(-(1.0 + eta) * u) - std::exp(-(1.0 + eta_p) * u));
  }
  return num.value() / ((beta - alpha) * llT);
}

// Closed-form mean value of |sum alpha_k e^{i lambda_k t}|^2 over [0, T].
struct MvResult {
  double numeric_integral = 0.0;
  double main_term = 0.0;  // T * sum |alpha_k|^2
  double delta = 0.0;      // minimal frequency gap (+inf for a single term)
};

inline MvResult mv_mean_value_check(const std::vector<double>& lambdas,
                                    const std::vector<Complex>& coeffs, double T) {
  if (lambdas.size() != coeffs.size())
    throw domain_error("mv_mean_value_check: size mismatch");
  MvResult res;
  res.delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
      double gap = std::abs(lambdas[i] - lambdas[j]);
      if (gap == 0.0) throw domain_error("mv_mean_value_check: repeated frequency");
      res.delta = std::min(res.delta, gap);
    }
  KahanSum sq;
  for (const Complex& a : coeffs) sq.add(std::norm(a));
  res.main_term = T * sq.value();
  KahanSum cross;
  for (std::size_t j = 0; j < lambdas.size(); ++j)
    for (std::size_t k = j + 1; k < lambdas.size(); ++k) {
      double w = lambdas[k] - lambdas[j];
      // int_0^T e^{iwt} dt = (e^{iwT} - 1) / (iw), exact
      Complex osc = (cis(w * T) - 1.0) / Complex{0.0, w};
      cross.add(2.0 * (std::conj(coeffs[j]) * coeffs[k] * osc).real());
    }
  res.numeric_integral = res.main_term + cross.value();
  return res;
}

// Monte Carlo fourth moment of sum phi(n) n^{-1/2 - i tau} against the
// (sum_p phi(p)^2 / p)^2 envelope.
struct FourthMomentResult {
  double moment_estimate = 0.0;
  double bound = 0.0;
};

inline FourthMomentResult fourth_moment_check(
    const std::map<std::uint64_t, double>& phi, double x, double T,
    std::size_t n_samples, std::uint64_t seed, unsigned workers = 1) {
  double x3 = x * x * x;
  std::map<std::uint64_t, double> phi_at_prime;
  for (const auto& [n, v] : phi) {
    if (v < 0.0) throw domain_error("fourth_moment_check: phi must be nonnegative");
    double vm = von_mangoldt(n);
    if (vm == 0.0)
      throw domain_error("fourth_moment_check: phi supported off prime powers");
    if (static_cast<double>(n) > x3)
      throw domain_error("fourth_moment_check: support beyond x^3");
    // recover the underlying prime
    std::uint64_t p = n;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) {
        p = d;
        break;
      }
    if (p == n && phi_at_prime.find(p) == phi_at_prime.end()) phi_at_prime[p] = v;
  }
  for (const auto& [n, v] : phi) {
    std::uint64_t p = n;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) {
        p = d;
        break;
      }
    double vp = phi_at_prime.count(p) ? phi_at_prime[p] : 0.0;
    if (n != p && v > vp + 1e-12 * std::max(1.0, vp))
      throw domain_error("fourth_moment_check: phi(p^i) > phi(p)");
  }

  FourthMomentResult res;
  KahanSum bound;
  for (const auto& [p, v] : phi_at_prime) bound.add(v * v / static_cast<double>(p));
  res.bound = bound.value() * bound.value();

  struct Term {
    double logn;
    double w;  // phi(n) / sqrt(n)
  };
  std::vector<Term> terms;
  terms.reserve(phi.size());
  for (const auto& [n, v] : phi) {
    double u = std::log(static_cast<double>(n));
    terms.push_back({u, v * std::exp(-0.5 * u)});
  }
  std::vector<double> draws(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    Philox rng(seed, i);
    double tau = rng.uniform(0.0, T);
    KahanComplexSum s;
    for (const Term& term : terms) s.add(term.w * cis_neg(tau, term.logn));
    double m = std::norm(s.value());
    draws[i] = m * m;
  });
  KahanSum mean;
  for (double v : draws) mean.add(v);
  res.moment_estimate = mean.value() / static_cast<double>(n_samples);
  return res;
}

// Numeric check of the normal-convergence hypotheses for the weighted prime
// sums a_{p,T} = (1/sqrt(log log T)) sum_l p^{-sigma_l}, sigma_l = 1/2 + (log T)^{-alpha_l}.
struct Lemma22Report {
  double T = 0.0;
  std::vector<double> alphas;
  double sup_ap = 0.0;
  std::uint64_t argmax_p = 0;
  double sum_sq = 0.0;           // sum_p |a_{p,T}|^2
  double m_T = 0.0;              // T^{1 / log log T}
  double tail_sum_sq = 0.0;      // past m_T
  double tail_weighted = 0.0;    // with the (1 + p/T) weight
  std::vector<double> ratio;     // row-major: sum_p p^{-si-sj} / ((ai ^ aj) llT)
};

inline Lemma22Report lemma22_hypotheses_check(const std::vector<double>& alphas,
                                              double T, const PrimeTable& table) {
  if (static_cast<double>(table.limit) < T)
    throw capacity_error("lemma22_hypotheses_check: prime table smaller than T");
  for (double a : alphas)
    if (!(a > 0.0 && a <= 1.0))
      throw domain_error("lemma22_hypotheses_check: alphas must lie in (0, 1]");
  Lemma22Report rep;
  rep.T = T;
  rep.alphas = alphas;
  double logT = std::log(T);
  double llT = std::log(logT);
  rep.m_T = std::exp(logT / llT);
  std::size_t d = alphas.size();
  std::vector<double> sigma(d);
  for (std::size_t i = 0; i < d; ++i) sigma[i] = 0.5 + std::exp(-alphas[i] * llT);

  KahanSum sum_sq, tail_sq, tail_w;
  std::vector<KahanSum> pair_sums(d * d);
  double inv_sqrt_llT = 1.0 / std::sqrt(llT);
  for (std::uint64_t p : table.primes) {
    if (static_cast<double>(p) > T) break;
    double u = std::log(static_cast<double>(p));
    double a = 0.0;
    for (std::size_t i = 0; i < d; ++i) a += std::exp(-sigma[i] * u);
    a *= inv_sqrt_llT;
    if (a > rep.sup_ap) {
      rep.sup_ap = a;
      rep.argmax_p = p;
    }
    sum_sq.add(a * a);
    if (static_cast<double>(p) > rep.m_T) {
      tail_sq.add(a * a);
      tail_w.add(a * a * (1.0 + static_cast<double>(p) / T));
    }
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j)
        pair_sums[i * d + j].add(std::exp(-(sigma[i] + sigma[j]) * u));
  }
  rep.sum_sq = sum_sq.value();
  rep.tail_sum_sq = tail_sq.value();
  rep.tail_weighted = tail_w.value();
  rep.ratio.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double r = pair_sums[i * d + j].value() /
                 (std::min(alphas[i], alphas[j]) * llT);
      rep.ratio[i * d + j] = r;
      rep.ratio[j * d + i] = r;
    }
  return rep;
}

}  // namespace zbm
