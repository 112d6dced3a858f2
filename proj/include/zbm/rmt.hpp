#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <lapacke.h>

#include "zbm/numeric.hpp"
#include "zbm/process.hpp"
#include "zbm/rng.hpp"

namespace zbm {

// Eigenangles of a Haar-distributed n x n unitary, sorted ascending in [0, 2pi).
struct UnitarySample {
  int n = 0;
  std::vector<double> eigenangles;
  unsigned eig_retries = 0;  // eigensolver non-convergences, each with a fresh draw
};

namespace detail {

inline std::vector<Complex> ginibre(int n, Philox& rng) {
  std::vector<Complex> a(static_cast<std::size_t>(n) * n);
  for (auto& z : a) z = rng.gaussian_complex();
  return a;
}

// QR with the R-diagonal phase correction that makes the factorization
// unique, so Q is exactly Haar. Column-major in place.
inline void haar_from_ginibre(std::vector<Complex>& a, int n) {
  std::vector<Complex> tau(static_cast<std::size_t>(n));
  auto* ap = reinterpret_cast<lapack_complex_double*>(a.data());
  if (LAPACKE_zgeqrf(LAPACK_COL_MAJOR, n, n, ap, n,
                     reinterpret_cast<lapack_complex_double*>(tau.data())) != 0)
    throw precision_error("zgeqrf failed");
  std::vector<Complex> phase(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Complex r = a[static_cast<std::size_t>(j) * n + j];
    double m = std::abs(r);
    phase[static_cast<std::size_t>(j)] = m > 0.0 ? r / m : Complex{1.0, 0.0};
  }
  if (LAPACKE_zungqr(LAPACK_COL_MAJOR, n, n, n, ap, n,
                     reinterpret_cast<lapack_complex_double*>(tau.data())) != 0)
    throw precision_error("zungqr failed");
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      a[static_cast<std::size_t>(j) * n + i] *= phase[static_cast<std::size_t>(j)];
}

inline bool eigenangles_of(std::vector<Complex> u, int n, std::vector<double>& out) {
  std::vector<Complex> w(static_cast<std::size_t>(n));
  int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n,
                           reinterpret_cast<lapack_complex_double*>(u.data()), n,
                           reinterpret_cast<lapack_complex_double*>(w.data()),
                           nullptr, 1, nullptr, 1);
  if (info != 0) return false;
  out.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double a = std::arg(w[static_cast<std::size_t>(j)]);
    if (a < 0.0) a += 6.283185307179586476925;
    out[static_cast<std::size_t>(j)] = a;
  }
  std::sort(out.begin(), out.end());
  return true;
}

}  // namespace detail

inline constexpr std::uint64_t kHaarStreamBase = 0x4A41'0000'0000ull;

inline UnitarySample sample_haar_unitary(int n, std::uint64_t seed,
                                         std::uint64_t stream = 0) {
  if (n < 1 || n > 4096) throw domain_error("sample_haar_unitary: n outside [1, 4096]");
  UnitarySample sample;
  sample.n = n;
  Philox rng(seed, kHaarStreamBase + stream);
  for (unsigned attempt = 0; attempt < 8; ++attempt) {
    std::vector<Complex> a = detail::ginibre(n, rng);
    detail::haar_from_ginibre(a, n);
    if (detail::eigenangles_of(std::move(a), n, sample.eigenangles)) return sample;
    ++sample.eig_retries;
  }
  throw precision_error("sample_haar_unitary: eigensolver failed repeatedly");
}

// Matrix variant for tests that need the pre-eigendecomposition unitary.
struct HaarMatrixSample {
  int n = 0;
  std::vector<Complex> matrix;  // column-major
  UnitarySample angles;
};

inline HaarMatrixSample sample_haar_unitary_matrix(int n, std::uint64_t seed,
                                                   std::uint64_t stream = 0) {
  if (n < 1 || n > 4096) throw domain_error("sample_haar_unitary: n outside [1, 4096]");
  Philox rng(seed, kHaarStreamBase + stream);
  HaarMatrixSample out;
  out.n = n;
  out.matrix = detail::ginibre(n, rng);
  detail::haar_from_ginibre(out.matrix, n);
  out.angles.n = n;
  if (!detail::eigenangles_of(out.matrix, n, out.angles.eigenangles))
    throw precision_error("sample_haar_unitary: eigensolver failed");
  return out;
}

// Characteristic-polynomial trajectory
//   alpha -> (1/sqrt(log n)) sum_j log(e^{n^{-alpha}} - e^{i theta_j}).
// Every factor has real part e^{n^{-alpha}} - cos(theta) > 0, so the principal
// branch of each log is already the continuous-in-alpha continuation from
// alpha = 0.
struct RmtPath {
  int n = 0;
  AlphaGrid alpha_grid;
  std::vector<Complex> values;

  const std::vector<double>& alphas() const { return *alpha_grid; }
};

// Unnormalized single-alpha value; valid for any n >= 1.
inline Complex rmt_log_charpoly(const UnitarySample& sample, double alpha) {
  double eps = std::pow(static_cast<double>(sample.n), -alpha);
  double r = std::exp(eps);
  KahanComplexSum sum;
  for (double theta : sample.eigenangles) {
    double re = r - std::cos(theta);
    double im = -std::sin(theta);
    double mod2 = re * re + im * im;
    if (mod2 < 1e-28) throw near_zero_error("rmt_path: factor below modulus floor");
    sum.add(Complex{0.5 * std::log(mod2), std::atan2(im, re)});
  }
  return sum.value();
}

inline RmtPath rmt_path(const UnitarySample& sample, AlphaGrid grid) {
  if (sample.n < 2)
    throw domain_error("rmt_path: n >= 2 required by the 1/sqrt(log n) normalization");
  RmtPath path;
  path.n = sample.n;
  path.alpha_grid = grid;
  double norm = std::sqrt(std::log(static_cast<double>(sample.n)));
  path.values.reserve(grid->size());
  for (double alpha : *grid)
    path.values.push_back(rmt_log_charpoly(sample, alpha) / norm);
  return path;
}

}  // namespace zbm
