#pragma once

#include <cmath>
#include <complex>

namespace zbm {

// Fast unit-circle evaluation e^{i*phase} for phase = t * u with t as large
// as ~1e9 and u = log n up to ~21. The product is formed exactly with an FMA
// two-product before reduction mod 2*pi, so the reduced argument is accurate
// to the rounding of u itself (~2e-7 rad at t = 2e8, far below any tolerance
// used here). The kernel polynomials are the fdlibm sin/cos kernels; absolute
// error of the pair is below 3e-10. Roughly 3x faster than calling libm
// sin/cos on the unreduced argument, which dominates the Monte Carlo budget.

namespace detail {

inline constexpr double kTwoPiHi = 6.283185307179586476925286766559;
inline constexpr double kTwoPiLo = 2.4492935982947063545e-16;
inline constexpr double kInvTwoPi = 0.15915494309189533577;
inline constexpr double kPiOver2Hi = 1.57079632679489655800e+00;
inline constexpr double kPiOver2Lo = 6.12323399573676603587e-17;

// sin/cos on [-pi/4, pi/4] after quadrant reduction of r in [-pi, pi].
// Kernel polynomials and groupings are fdlibm's k_sin / k_cos.
inline void kernel_sincos(double r, double& s, double& c) {
  double q = std::nearbyint(r * (2.0 * kInvTwoPi * 2.0));  // r / (pi/2)
  int iq = static_cast<int>(q) & 3;
  double x = std::fma(-q, kPiOver2Hi, r) - q * kPiOver2Lo;
  double z = x * x;
  double sr = 1.58969099521155010221e-10;
  sr = std::fma(sr, z, -2.50507602534068634195e-08);
  sr = std::fma(sr, z, 2.75573137070700676789e-06);
  sr = std::fma(sr, z, -1.98412698298579819205e-04);
  sr = std::fma(sr, z, 8.33333333332248946124e-03);
  sr = std::fma(sr, z, -1.66666666666666324348e-01);
  double ps = std::fma(z * x, sr, x);
  double cr = -1.13596475577881948265e-11;
  cr = std::fma(cr, z, 2.08757232129817482790e-09);
  cr = std::fma(cr, z, -2.75573143513906633035e-07);
  cr = std::fma(cr, z, 2.48015872894767294178e-05);
  cr = std::fma(cr, z, -1.38888888888741095749e-03);
  cr = std::fma(cr, z, 4.16666666666666019037e-02);
  double pc = std::fma(z * z, cr, 1.0 - 0.5 * z);
  double ss = (iq & 1) ? pc : ps;
  double cc = (iq & 1) ? ps : pc;
  s = (iq == 2 || iq == 3) ? -ss : ss;
  c = (iq == 1 || iq == 2) ? -cc : cc;
}

}  // namespace detail

// (t * u) mod 2*pi, in [-pi-eps, pi+eps]. Exact two-product via FMA.
inline double phase_mod_2pi(double t, double u) {
  double p = t * u;
  double perr = std::fma(t, u, -p);
  double k = std::nearbyint(p * detail::kInvTwoPi);
  return (std::fma(-k, detail::kTwoPiHi, p) + perr) - k * detail::kTwoPiLo;
}

// e^{-i t u}; the sign convention matches Dirichlet terms n^{-it} = e^{-it log n}.
inline std::complex<double> cis_neg(double t, double u) {
  double r = phase_mod_2pi(t, u);
  double s, c;
  detail::kernel_sincos(r, s, c);
  return {c, -s};
}

inline std::complex<double> cis(double phase) {
  double r = phase_mod_2pi(1.0, phase);
  double s, c;
  detail::kernel_sincos(r, s, c);
  return {c, s};
}

}  // namespace zbm
