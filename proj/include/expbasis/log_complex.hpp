#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

// Log-domain complex scalars. Products over ~10^5 factors and values on the
// scale of e^{pi t} overflow binary64 long before t reaches the sweep ranges,
// so every generating-function magnitude is carried as (log|w|, arg w).

namespace expbasis {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Wrap into (-pi, pi].
inline double wrap_phase(double p) {
  if (p > -kPi && p <= kPi) return p;
  p = std::remainder(p, 2.0 * kPi);
  if (p <= -kPi) p += 2.0 * kPi;
  return p;
}

struct LogComplex {
  double log_mag = 0.0;  // natural log of |w|; -inf encodes an exact zero
  double phase = 0.0;    // radians in (-pi, pi]

  static LogComplex zero() { return {kNegInf, 0.0}; }
  bool is_zero() const { return log_mag == kNegInf; }
};

inline LogComplex lc_from(cplx w) {
  double m = std::abs(w);
  if (m == 0.0) return LogComplex::zero();
  return {std::log(m), wrap_phase(std::arg(w))};
}

inline LogComplex lc_from_real(double x) {
  if (x == 0.0) return LogComplex::zero();
  return {std::log(std::abs(x)), x > 0 ? 0.0 : kPi};
}

// Overflows for log_mag beyond ~709; callers use it only at moderate scales.
inline cplx lc_to(const LogComplex& a) {
  if (a.is_zero()) return {0.0, 0.0};
  double m = std::exp(a.log_mag);
  return {m * std::cos(a.phase), m * std::sin(a.phase)};
}

inline LogComplex lc_mul(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero() || b.is_zero()) return LogComplex::zero();
  return {a.log_mag + b.log_mag, wrap_phase(a.phase + b.phase)};
}

inline LogComplex lc_div(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero()) return LogComplex::zero();
  return {a.log_mag - b.log_mag, wrap_phase(a.phase - b.phase)};
}

inline LogComplex lc_neg(const LogComplex& a) {
  if (a.is_zero()) return a;
  return {a.log_mag, wrap_phase(a.phase + kPi)};
}

// a + b evaluated at the common scale max(log_mag); near-exact cancellation
// loses relative accuracy as usual for floating subtraction.
inline LogComplex lc_add(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  double m = std::max(a.log_mag, b.log_mag);
  double ra = std::exp(a.log_mag - m), rb = std::exp(b.log_mag - m);
  double re = ra * std::cos(a.phase) + rb * std::cos(b.phase);
  double im = ra * std::sin(a.phase) + rb * std::sin(b.phase);
  double h = std::hypot(re, im);
  if (h == 0.0) return LogComplex::zero();
  return {m + std::log(h), wrap_phase(std::atan2(im, re))};
}

inline LogComplex lc_sub(const LogComplex& a, const LogComplex& b) {
  return lc_add(a, lc_neg(b));
}

// log(e^a + e^b) for real log-domain positives.
inline double log_add_real(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// sin(pi x), cos(pi x) with argument reduction so that large near-integer x
// keeps full precision (sin(pi n) is exactly 0).
inline void sincospi(double x, double& s, double& c) {
  double k = std::nearbyint(x);
  double r = x - k;
  double sr = std::sin(kPi * r), cr = std::cos(kPi * r);
  bool odd = std::fmod(std::abs(k), 2.0) == 1.0;
  s = odd ? -sr : sr;
  c = odd ? -cr : cr;
}

// log of sin(pi z), overflow-free for any |Im z|:
//   sin(pi(x+iy)) = sin(pi x)cosh(pi y) + i cos(pi x)sinh(pi y)
// is rescaled by e^{-pi|y|} before taking logs.
inline LogComplex log_sinpi(cplx z) {
  double x = z.real(), y = z.imag();
  double sx, cx;
  sincospi(x, sx, cx);
  double ay = std::abs(y);
  double em = std::exp(-2.0 * kPi * ay);          // underflows harmlessly
  double grow = -std::expm1(-2.0 * kPi * ay);     // 1 - e^{-2 pi |y|}
  double re = sx * 0.5 * (1.0 + em);
  double im = cx * 0.5 * grow * (y > 0 ? 1.0 : (y < 0 ? -1.0 : 0.0));
  double h = std::hypot(re, im);
  if (h == 0.0) return LogComplex::zero();
  return {kPi * ay + std::log(h), wrap_phase(std::atan2(im, re))};
}

}  // namespace expbasis
