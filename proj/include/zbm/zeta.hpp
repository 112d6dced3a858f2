#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "zbm/arith.hpp"
#include "zbm/numeric.hpp"
#include "zbm/trig.hpp"

namespace zbm {

using Complex = std::complex<double>;

// Evaluations aborting on |zeta| below this threshold raise near_zero_error;
// the path sampler redraws tau and counts the rejection.
inline constexpr double kNearZeroThreshold = 1e-8;

// Euler-Maclaurin truncation N = ceil(kEmFactor * t / (2 pi)) + 20 with
// Bernoulli corrections through order 12. The neglected correction scales
// like (t / (2 pi N))^13 / (pi N^sigma); at factor 3.0 the measured error is
// below 6e-9 for t <= 1e4 and sigma >= 1/2, with plenty of margin for the
// 1e-6-relative consistency checks.
inline constexpr double kEmFactor = 3.0;
inline constexpr double kDefaultUnwrapStep = 1e-2;

namespace detail {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// B_{2k} / (2k)! for k = 1..6.
inline constexpr double kEmCoeff[6] = {
    1.0 / 12.0,       -1.0 / 720.0,      1.0 / 30240.0,
    -1.0 / 1209600.0, 1.0 / 47900160.0,  -691.0 / 1307674368000.0,
};

inline std::uint64_t em_truncation(double t, double factor = kEmFactor) {
  double n = factor * std::abs(t) / kTwoPi;
  return static_cast<std::uint64_t>(std::max(20.0, std::ceil(n) + 20.0));
}

// Magnitude of the first neglected Bernoulli correction (k = 7).
inline double em_error_bound(Complex s, double n) {
  double prod = 1.38888888888888889e-11;  // B14 / 14! = (7/6) / 14!
  for (int j = 0; j < 13; ++j) prod *= std::abs(s + static_cast<double>(j));
  return prod * std::pow(n, -(s.real() + 13.0));
}

// Tail of the Euler-Maclaurin formula at truncation N:
//   N^{1-s}/(s-1) + N^{-s}/2 + sum_k c_k (s)_{2k-1} N^{-s-2k+1}.
inline Complex em_tail(Complex s, double n) {
  double logn = std::log(n);
  Complex npow = std::exp(-s * logn);  // N^{-s}
  Complex tail = npow * n / (s - 1.0) + 0.5 * npow;
  Complex rising = s;                  // s(s+1)...(s+2k-2)
  Complex scale = npow / n;            // N^{-s-2k+1}
  for (int k = 0; k < 6; ++k) {
    tail += kEmCoeff[k] * rising * scale;
    rising *= (s + static_cast<double>(2 * k + 1)) * (s + static_cast<double>(2 * k + 2));
    scale /= n * n;
  }
  return tail;
}

// d/ds of em_tail.
inline Complex em_tail_deriv(Complex s, double n) {
  double logn = std::log(n);
  Complex npow = std::exp(-s * logn);
  Complex d = npow * n * (-logn / (s - 1.0) - 1.0 / ((s - 1.0) * (s - 1.0)));
  d += -0.5 * logn * npow;
  Complex rising = s;
  Complex rising_d = 1.0;  // d/ds of the rising product
  Complex scale = npow / n;
  for (int k = 0; k < 6; ++k) {
    d += kEmCoeff[k] * (rising_d - rising * logn) * scale;
    Complex a = s + static_cast<double>(2 * k + 1);
    Complex b = s + static_cast<double>(2 * k + 2);
    rising_d = rising_d * a * b + rising * (a + b);
    rising *= a * b;
    scale /= n * n;
  }
  return d;
}

}  // namespace detail

// ---- Binned multi-sigma evaluation ------------------------------------------
//
// For fixed t, sums of the form sum_j w_j x_j^{-sigma} e^{-i t log x_j} are
// needed at hundreds of sigma values (the horizontal walk, the alpha grid).
// Terms are bucketed by u = log x on a uniform grid; each bucket keeps complex
// moments sum w e^{-itu} delta^m about the bucket center, and eval() expands
// e^{-sigma delta} to the stored order. With the default bucket counts the
// in-bucket remainder stays below ~2e-7 for every use here, and eval costs
// O(buckets) per sigma instead of O(terms).
template <int Order>
class LogBinProfile {
  static_assert(Order == 1 || Order == 2);

 public:
  LogBinProfile(double t, double u_min, double u_max, std::size_t buckets)
      : t_(t), u0_(u_min), buckets_(buckets) {
    double width = std::max(u_max - u_min, 1e-9);
    du_ = width / static_cast<double>(buckets);
    inv_du_ = static_cast<double>(buckets) / width;
    m0_.assign(buckets, Complex{});
    m1_.assign(buckets, Complex{});
    if constexpr (Order == 2) m2_.assign(buckets, Complex{});
  }

  void add(double u, double w) {
    double x = (u - u0_) * inv_du_;
    auto b = static_cast<std::size_t>(x);
    if (b >= buckets_) b = buckets_ - 1;
    double delta = u - (u0_ + (static_cast<double>(b) + 0.5) * du_);
    double s, c;
    double r = phase_mod_2pi(t_, u);
    detail::kernel_sincos(r, s, c);
    Complex e{w * c, -w * s};
    m0_[b] += e;
    m1_[b] += e * delta;
    if constexpr (Order == 2) m2_[b] += e * (0.5 * delta * delta);
  }

  // sum_j w_j e^{-(sigma + i t) u_j}
  Complex eval(double sigma) const {
    double uc = u0_ + 0.5 * du_;
    double f = std::exp(-sigma * uc);
    double g = std::exp(-sigma * du_);
    double s2 = sigma * sigma;
    Complex acc{};
    for (std::size_t b = 0; b < buckets_; ++b) {
      Complex corr = m0_[b] - sigma * m1_[b];
      if constexpr (Order == 2) corr += s2 * m2_[b];
      acc += f * corr;
      f *= g;
    }
    return acc;
  }

  double t() const { return t_; }

 private:
  double t_, u0_, du_, inv_du_;
  std::size_t buckets_;
  std::vector<Complex> m0_, m1_, m2_;
};

namespace detail {

inline std::size_t profile_buckets(std::uint64_t terms) {
  std::size_t b = 1024;
  while (b < 65536 && b * 8 < terms) b *= 2;
  return b;
}

}  // namespace detail

// ---- Single-point Euler-Maclaurin -------------------------------------------

// zeta(sigma + i t) to absolute accuracy tol. Direct term summation; use
// ZetaEmProfile for many sigmas at one t.
inline Complex zeta_em(double sigma, double t, double tol = 1e-12) {
  if (sigma <= -1.0) throw domain_error("zeta_em: sigma <= -1 unsupported");
  if (sigma == 1.0 && t == 0.0) throw domain_error("zeta_em: pole at s = 1");
  if (tol < 1e-14) throw precision_error("zeta_em: tol below double-precision floor");
  bool conj = t < 0.0;
  Complex s{sigma, std::abs(t)};
  std::uint64_t n = detail::em_truncation(t);
  while (detail::em_error_bound(s, static_cast<double>(n)) > 0.25 * tol) {
    n += n / 2;
    if (n > (1ull << 27)) throw precision_error("zeta_em: truncation overflow");
  }
  KahanComplexSum sum;
  sum.add(Complex{1.0, 0.0});
  for (std::uint64_t k = 2; k < n; ++k) {
    double u = std::log(static_cast<double>(k));
    sum.add(std::exp(-sigma * u) * cis_neg(s.imag(), u));
  }
  Complex z = sum.value() + detail::em_tail(s, static_cast<double>(n));
  return conj ? std::conj(z) : z;
}

// zeta'(sigma + i t), term-wise differentiated Euler-Maclaurin.
inline Complex zeta_em_deriv(double sigma, double t, double tol = 1e-9) {
  if (sigma == 1.0 && t == 0.0) throw domain_error("zeta_em_deriv: pole at s = 1");
  bool conj = t < 0.0;
  Complex s{sigma, std::abs(t)};
  std::uint64_t n = detail::em_truncation(t);
  while (detail::em_error_bound(s, static_cast<double>(n)) *
             (std::log(static_cast<double>(n)) + 14.0) > 0.5 * tol) {
    n += n / 2;
    if (n > (1ull << 27)) throw precision_error("zeta_em_deriv: truncation overflow");
  }
  KahanComplexSum sum;
  for (std::uint64_t k = 2; k < n; ++k) {
    double u = std::log(static_cast<double>(k));
    sum.add(-u * std::exp(-sigma * u) * cis_neg(s.imag(), u));
  }
  Complex z = sum.value() + detail::em_tail_deriv(s, static_cast<double>(n));
  return conj ? std::conj(z) : z;
}

// zeta'/zeta with a near-zero guard.
inline Complex zeta_log_deriv(double sigma, double t) {
  Complex z = zeta_em(sigma, t, 1e-10);
  if (std::abs(z) < kNearZeroThreshold)
    throw near_zero_error("zeta_log_deriv: |zeta| below near-zero threshold");
  return zeta_em_deriv(sigma, t, 1e-8 * std::abs(z)) / z;
}

// ---- Horizontal log zeta -----------------------------------------------------

// Binned Euler-Maclaurin state for one height t: zeta(sigma + i t) for any
// sigma in (1/2, 10] at O(buckets) cost after a single O(N) fill.
class ZetaEmProfile {
 public:
  explicit ZetaEmProfile(double t) : t_(t), n_(detail::em_truncation(t)) {
    auto nd = static_cast<double>(n_);
    bins_.emplace_back(t, std::log(2.0), std::log(nd),
                       detail::profile_buckets(n_));
    auto& bins = bins_.front();
    for (std::uint64_t k = 2; k < n_; ++k)
      bins.add(std::log(static_cast<double>(k)), 1.0);
  }

  Complex zeta(double sigma) const {
    Complex s{sigma, t_};
    return 1.0 + bins_.front().eval(sigma) +
           detail::em_tail(s, static_cast<double>(n_));
  }

  double t() const { return t_; }

 private:
  double t_;
  std::uint64_t n_;
  std::vector<LogBinProfile<2>> bins_;  // single element; avoids copy ctor needs
};

namespace detail {

inline double wrap_to_pi(double x) {
  constexpr double pi = 3.14159265358979323846;
  while (x > pi) x -= kTwoPi;
  while (x < -pi) x += kTwoPi;
  return x;
}

// Walks sigma from 10 down to each target, accumulating the continuous
// argument. Targets must be sorted descending, all inside (1/2, 10].
inline std::vector<Complex> log_zeta_walk(const ZetaEmProfile& prof,
                                          std::span<const double> targets,
                                          double step) {
  std::vector<Complex> out;
  out.reserve(targets.size());
  double sigma = 10.0;
  Complex z = prof.zeta(sigma);
  if (std::abs(z) < kNearZeroThreshold)
    throw near_zero_error("log_zeta_horizontal: |zeta| below threshold");
  double raw = std::arg(z);        // in (-pi, pi]; tiny at sigma = 10
  double unwrapped = raw;
  double h = step;
  std::size_t next_target = 0;
  while (next_target < targets.size() && targets[next_target] >= sigma) {
    out.push_back(Complex{std::log(std::abs(z)), unwrapped});
    ++next_target;
  }
  const double h_min = step * 0x1.0p-16;
  while (next_target < targets.size()) {
    double goal = targets[next_target];
    double sigma_next = std::max(sigma - h, goal);
    Complex z_next = prof.zeta(sigma_next);
    if (std::abs(z_next) < kNearZeroThreshold)
      throw near_zero_error("log_zeta_horizontal: |zeta| below threshold");
    double raw_next = std::arg(z_next);
    double inc = wrap_to_pi(raw_next - raw);
    if (std::abs(inc) >= 1.5707963267948966) {
      h *= 0.5;
      if (h < h_min)
        throw near_zero_error("log_zeta_horizontal: phase unwrap step exhausted");
      continue;
    }
    sigma = sigma_next;
    z = z_next;
    raw = raw_next;
    unwrapped += inc;
    h = std::min(2.0 * h, step);
    while (next_target < targets.size() && sigma <= targets[next_target]) {
      out.push_back(Complex{std::log(std::abs(z)), unwrapped});
      ++next_target;
    }
  }
  return out;
}

}  // namespace detail

// log zeta(sigma + i t) with the branch fixed by continuous continuation from
// sigma = 10, where the Dirichlet tail pins the argument near 0.
inline Complex log_zeta_horizontal(double t, double sigma,
                                   double step = kDefaultUnwrapStep) {
  if (t < 2.0) throw domain_error("log_zeta_horizontal: t >= 2 required");
  if (!(sigma > 0.5 && sigma <= 10.0))
    throw domain_error("log_zeta_horizontal: sigma outside (1/2, 10]");
  ZetaEmProfile prof(t);
  double target[1] = {sigma};
  return detail::log_zeta_walk(prof, target, step)[0];
}

// Same walk evaluated at many descending sigmas (one profile fill, one walk).
inline std::vector<Complex> log_zeta_horizontal_multi(
    const ZetaEmProfile& prof, std::span<const double> sigmas_descending,
    double step = kDefaultUnwrapStep) {
  if (prof.t() < 2.0) throw domain_error("log_zeta_horizontal: t >= 2 required");
  for (std::size_t i = 0; i < sigmas_descending.size(); ++i) {
    if (!(sigmas_descending[i] > 0.5 && sigmas_descending[i] <= 10.0))
      throw domain_error("log_zeta_horizontal: sigma outside (1/2, 10]");
    if (i > 0 && sigmas_descending[i] > sigmas_descending[i - 1])
      throw domain_error("log_zeta_horizontal: sigmas must descend");
  }
  return detail::log_zeta_walk(prof, sigmas_descending, step);
}

// ---- Zeta point --------------------------------------------------------------

enum class PointStatus { ok, near_zero, not_computed };

struct ZetaPoint {
  double sigma = 0.0;
  double t = 0.0;
  Complex value{};
  Complex log_value{};
  PointStatus status = PointStatus::not_computed;
};

inline ZetaPoint zeta_point(double sigma, double t) {
  ZetaPoint p;
  p.sigma = sigma;
  p.t = t;
  p.value = zeta_em(sigma, t, 1e-10);
  if (sigma > 0.5 && sigma <= 10.0 && t >= 2.0) {
    try {
      p.log_value = log_zeta_horizontal(t, sigma);
      p.status = PointStatus::ok;
    } catch (const near_zero_error&) {
      p.status = PointStatus::near_zero;
    }
  }
  return p;
}

// ---- Dirichlet models --------------------------------------------------------

enum class DirichletModel { prime_sum, selberg_mollified };

struct DirichletModelConfig {
  DirichletModel model = DirichletModel::prime_sum;
  double cutoff = 2.0;  // P = T for prime_sum, x^3 for selberg_mollified
};

// sum_{p <= cutoff} p^{-sigma} e^{-i t log p}, ascending, compensated.
inline Complex dirichlet_prime_sum(double sigma, double t, double cutoff,
                                   const PrimeTable& table) {
  if (static_cast<double>(table.limit) < cutoff)
    throw capacity_error("dirichlet_prime_sum: prime table smaller than cutoff");
  KahanComplexSum sum;
  for (std::uint64_t p : table.primes) {
    if (static_cast<double>(p) > cutoff) break;
    double u = std::log(static_cast<double>(p));
    sum.add(std::exp(-sigma * u) * cis_neg(t, u));
  }
  return sum.value();
}

// sum over mollifier entries of Lambda_x(n)/(log n) n^{-sigma} e^{-i t log n}.
inline Complex selberg_log_sum(double sigma, double t,
                               const MollifierTable& mollifier) {
  KahanComplexSum sum;
  for (const auto& e : mollifier.entries) {
    double u = std::log(static_cast<double>(e.n));
    sum.add((e.weight / u) * std::exp(-sigma * u) * cis_neg(t, u));
  }
  return sum.value();
}

// sum of Lambda_x(n) n^{-sigma} e^{-i t log n} (the zeta'/zeta-level sum).
inline Complex selberg_weight_sum(double sigma, double t,
                                  const MollifierTable& mollifier) {
  KahanComplexSum sum;
  for (const auto& e : mollifier.entries) {
    double u = std::log(static_cast<double>(e.n));
    sum.add(e.weight * std::exp(-sigma * u) * cis_neg(t, u));
  }
  return sum.value();
}

enum class ExVariant { log_form, logderiv_form };

// Residual between (log) zeta and its mollified Dirichlet approximation.
//   log_form:      log zeta(s) - sum Lambda_x(n) / (n^s log n)
//   logderiv_form: zeta'/zeta(s) + sum Lambda_x(n) / n^s
inline Complex ex_residual(double sigma, double t, const MollifierTable& mollifier,
                           ExVariant variant) {
  if (variant == ExVariant::log_form)
    return log_zeta_horizontal(t, sigma) - selberg_log_sum(sigma, t, mollifier);
  return zeta_log_deriv(sigma, t) + selberg_weight_sum(sigma, t, mollifier);
}

}  // namespace zbm
