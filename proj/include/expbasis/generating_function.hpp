#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "expbasis/log_complex.hpp"
#include "expbasis/polygamma.hpp"
#include "expbasis/quadrature.hpp"
#include "expbasis/spectrum.hpp"

// Overflow-safe evaluation of the generating function
//   F(z) = z * prod_{0<|n|<=N_prod} (1 - z/lambda_n)
// (factor z becomes (1 - z/lambda_0) when lambda_0 != 0), plus the carrier
// function Phi(it) = |F(it)| / d(it, Lambda) and the growth diagnostics
// built on |F|.
//
// The workhorse mode rewrites the product relative to sin(pi z)/pi:
//   F(z) = (sin pi z / pi) * prod_{n != 0} (1 - z/lambda_n)/(1 - z/n).
// Factors with n far from both 0 and Re z are 1 + O(delta/n) and their logs
// are summed analytically per constant-shift run: with lambda_{+-n} = +-(n+d),
//   log pair(n) = log(1 + d/(n-z)) + log(1 + d/(n+z)) - 2 log(1 + d/n),
// expanded in powers of d; sum_n (n+w)^{-r} over an index range comes from
// polygamma.hpp in O(1). Only O(W) factors near 0 and near |Re z| are ever
// multiplied out, so one evaluation costs microseconds at any N_prod.

namespace expbasis {

enum class FMode { raw_symmetric_product, sine_relative, closed_form_sine };

struct GeneratingFunction {
  const Spectrum* spec = nullptr;
  FMode mode = FMode::sine_relative;
  long N_prod = 0;
  // explicit-window radii (around 0 and around |Re z|) and tail-series order
  long W0 = 32;
  long W = 32;
  int R = 5;

  const Spectrum& s() const { return *spec; }
};

inline GeneratingFunction make_genfun(const Spectrum& s, FMode mode,
                                      long N_prod) {
  if (N_prod < 16) throw std::invalid_argument("make_genfun: N_prod < 16");
  if (N_prod > s.N)
    throw std::invalid_argument("make_genfun: N_prod exceeds the spectrum window");
  if (mode == FMode::closed_form_sine && !s.is_integer())
    throw std::invalid_argument(
        "make_genfun: closed_form_sine requires the integer spectrum");
  GeneratingFunction g;
  g.spec = &s;
  g.mode = mode;
  g.N_prod = N_prod;
  return g;
}

// the generating function only points at the spectrum, so binding it to a
// temporary would dangle; keep the spectrum in a named variable instead
GeneratingFunction make_genfun(Spectrum&& s, FMode mode, long N_prod) = delete;

namespace detail {

// real-argument clones of the polygamma helpers; the series sweeps evaluate
// F at tens of thousands of integer points and complex pow is the bottleneck
inline double digamma_real(double w) {
  if (w <= 0.0) throw std::invalid_argument("digamma_real: w must be positive");
  double acc = 0.0;
  while (w < 16.0) {
    acc -= 1.0 / w;
    w += 1.0;
  }
  double iw2 = 1.0 / (w * w);
  double sum = std::log(w) - 0.5 / w;
  double p = iw2;
  for (std::size_t j = 0; j < kBernoulli.size(); ++j) {
    sum -= kBernoulli[j] / (2.0 * (j + 1)) * p;
    p *= iw2;
  }
  return acc + sum;
}

inline double hurwitz_tail_real(int r, double w) {
  if (r < 2 || r > 8) throw std::invalid_argument("hurwitz_tail_real: bad r");
  if (w <= 0.0) throw std::invalid_argument("hurwitz_tail_real: w must be positive");
  double acc = 0.0;
  while (w < 24.0) {
    acc += std::pow(w, -r);
    w += 1.0;
  }
  double iw = 1.0 / w;
  double wr = std::pow(w, -r);
  double sum = wr * w / double(r - 1) + 0.5 * wr;
  double fact = 1.0;
  double rise = 1.0;
  double wp = wr * iw;
  for (std::size_t j = 1; j <= kBernoulli.size(); ++j) {
    fact *= double(2 * j - 1) * double(2 * j);
    rise *= (j == 1) ? double(r) : double(r + 2 * j - 3) * double(r + 2 * j - 2);
    sum += kBernoulli[j - 1] / fact * rise * wp;
    wp *= iw * iw;
  }
  return acc + sum;
}

inline double range_inverse_power_sum_real(int r, long a, long b, double w) {
  if (a > b) return 0.0;
  if (double(a) + w > 0.5) {
    if (r == 1) return digamma_real(double(b) + 1.0 + w) - digamma_real(double(a) + w);
    return hurwitz_tail_real(r, double(a) + w) -
           hurwitz_tail_real(r, double(b) + 1.0 + w);
  }
  if (double(b) + w < -0.5) {
    double v;
    if (r == 1)
      v = digamma_real(double(-a) + 1.0 - w) - digamma_real(double(-b) - w);
    else
      v = hurwitz_tail_real(r, double(-b) - w) -
          hurwitz_tail_real(r, double(-a) + 1.0 - w);
    return (r % 2 == 0) ? v : -v;
  }
  throw std::invalid_argument("range_inverse_power_sum_real: range straddles -w");
}

// multiplicative accumulators working in chunks so only one log is taken
// per ~16 factors; flushed early if a chunk drifts toward overflow
struct ProdAcc {
  double log_mag = 0.0;
  double phase = 0.0;
  bool zero = false;
  cplx chunk{1.0, 0.0};
  int count = 0;

  void flush() {
    if (count == 0) return;
    log_mag += 0.5 * std::log(std::norm(chunk));
    phase += std::arg(chunk);
    chunk = cplx(1.0, 0.0);
    count = 0;
  }
  void mul(cplx f) {
    double n2 = std::norm(f);
    if (n2 == 0.0) {
      zero = true;
      return;
    }
    if (n2 > 1e120 || n2 < 1e-120) {
      flush();
      log_mag += 0.5 * std::log(n2);
      phase += std::arg(f);
      return;
    }
    chunk *= f;
    ++count;
    double c2 = std::norm(chunk);
    if (count >= 16 || c2 > 1e120 || c2 < 1e-120) flush();
  }
};

struct RealProdAcc {
  double log_mag = 0.0;
  bool negative = false;
  bool zero = false;
  double chunk = 1.0;
  int count = 0;

  void flush() {
    if (count == 0) return;
    log_mag += std::log(chunk);
    chunk = 1.0;
    count = 0;
  }
  void mul(double f) {
    if (f == 0.0) {
      zero = true;
      return;
    }
    if (f < 0.0) {
      negative = !negative;
      f = -f;
    }
    if (f > 1e120 || f < 1e-120) {
      flush();
      log_mag += std::log(f);
      return;
    }
    chunk *= f;
    ++count;
    if (count >= 16 || chunk > 1e120 || chunk < 1e-120) flush();
  }
};

// index ranges of [1, N_prod] not covered by the explicit windows
struct TailHoles {
  long a1 = 1, b1 = 0;  // between the origin window and the Re z window
  long a2 = 1, b2 = 0;  // beyond the Re z window
};

inline TailHoles tail_holes(long Np, long W0, long W, long m0) {
  TailHoles h;
  long wlo = std::max(W0 + 1, m0 - W);
  long whi = std::min(Np, m0 + W);
  if (wlo > whi) {
    // the Re z window is empty or swallowed by the origin window
    h.a1 = W0 + 1;
    h.b1 = Np;
    return h;
  }
  h.a1 = W0 + 1;
  h.b1 = std::min(wlo - 1, Np);
  h.a2 = whi + 1;
  h.b2 = Np;
  return h;
}

}  // namespace detail

// ---- raw symmetric product --------------------------------------------

namespace detail {

inline LogComplex eval_F_raw(const GeneratingFunction& g, cplx z) {
  const Spectrum& s = g.s();
  ProdAcc acc;
  cplx l0 = s.lambda(0);
  if (l0 == cplx(0.0, 0.0))
    acc.mul(z);
  else
    acc.mul(1.0 - z / l0);
  for (long n = 1; n <= g.N_prod; ++n) {
    acc.mul(1.0 - z / s.lambda(n));
    if (acc.zero) break;
    acc.mul(1.0 - z / s.lambda(-n));
    if (acc.zero) break;
  }
  if (acc.zero) return LogComplex::zero();
  acc.flush();
  return {acc.log_mag, wrap_phase(acc.phase)};
}

// relative factor (1 - z/lambda)/(1 - z/n) = ((lambda - z) n) / (lambda (n - z))
inline cplx rel_factor(cplx z, cplx lam, double n) {
  return ((lam - z) * n) / (lam * (n - z));
}

// analytic log-sum of the pair factors over [a, b] for one run shift d:
// sum_n log(1 + d/(n-z)) + log(1 + d/(n+z)) - 2 log(1 + d/n)
inline cplx tail_log_sum(const GeneratingFunction& g, long a, long b, double d,
                         cplx z) {
  if (a > b || d == 0.0) return 0.0;
  cplx total = 0.0;
  double dr = 1.0;
  for (int r = 1; r <= g.R; ++r) {
    dr *= d;
    cplx sz = range_inverse_power_sum(r, a, b, -z);
    cplx szm = range_inverse_power_sum(r, a, b, z);
    double s0 = range_inverse_power_sum_real(r, a, b, 0.0);
    double c = ((r % 2 == 1) ? 1.0 : -1.0) * dr / double(r);
    total += c * (sz + szm - 2.0 * s0);
  }
  return total;
}

inline double tail_log_sum_real(const GeneratingFunction& g, long a, long b,
                                double d, double m) {
  if (a > b || d == 0.0) return 0.0;
  double total = 0.0;
  double dr = 1.0;
  for (int r = 1; r <= g.R; ++r) {
    dr *= d;
    double sz = range_inverse_power_sum_real(r, a, b, -m);
    double szm = range_inverse_power_sum_real(r, a, b, m);
    double s0 = range_inverse_power_sum_real(r, a, b, 0.0);
    double c = ((r % 2 == 1) ? 1.0 : -1.0) * dr / double(r);
    total += c * (sz + szm - 2.0 * s0);
  }
  return total;
}

// integer z = m, real mirror-symmetric spectrum with shift runs: everything
// stays in real arithmetic
inline LogComplex eval_F_int_real(const GeneratingFunction& g, long m) {
  const Spectrum& s = g.s();
  long Np = g.N_prod;
  long am = std::labs(m);
  RealProdAcc acc;
  // limit of (sin pi z / pi) / (1 - z/m) at z = m is (-1)^{m+1} m
  double pm = (((am % 2) == 1) ? 1.0 : -1.0);  // (-1)^{m+1}
  acc.mul(pm * double(m));
  cplx l0 = s.lambda(0);
  if (l0 != cplx(0.0, 0.0)) acc.mul((1.0 - double(m) / l0.real()) / double(m));
  double dm = double(m);
  long m0 = am;
  long wlo = std::max(g.W0 + 1, m0 - g.W);
  long whi = std::min(Np, m0 + g.W);
  auto explicit_pair = [&](long n) {
    double ln = s.lambda(n).real();
    double lmn = s.lambda(-n).real();
    double dn = double(n);
    if (n == am) {
      // same-sign factor absorbed into the sine limit above
      if (m > 0) {
        acc.mul((ln - dm) / ln);
        acc.mul((lmn - dm) * (-dn) / (lmn * (-dn - dm)));
      } else {
        acc.mul((lmn - dm) / lmn);
        acc.mul((ln - dm) * dn / (ln * (dn - dm)));
      }
      return;
    }
    acc.mul((ln - dm) * dn / (ln * (dn - dm)));
    acc.mul((lmn - dm) * (-dn) / (lmn * (-dn - dm)));
  };
  for (long n = 1; n <= std::min(g.W0, Np) && !acc.zero; ++n) explicit_pair(n);
  if (wlo <= whi)
    for (long n = wlo; n <= whi && !acc.zero; ++n) explicit_pair(n);
  if (acc.zero) return LogComplex::zero();

  TailHoles h = tail_holes(Np, g.W0, g.W, m0);
  for (const ShiftBlock& b : s.blocks) {
    if (b.lo > Np) break;
    long lo1 = std::max(b.lo, h.a1), hi1 = std::min(b.hi, h.b1);
    if (lo1 <= hi1) acc.log_mag += tail_log_sum_real(g, lo1, hi1, b.delta, dm);
    long lo2 = std::max(b.lo, h.a2), hi2 = std::min(b.hi, h.b2);
    if (lo2 <= hi2) acc.log_mag += tail_log_sum_real(g, lo2, hi2, b.delta, dm);
  }
  acc.flush();
  return {acc.log_mag, acc.negative ? kPi : 0.0};
}

inline LogComplex eval_F_sine_relative(const GeneratingFunction& g, cplx z) {
  const Spectrum& s = g.s();
  long Np = g.N_prod;
  double x = z.real();
  bool integer_z = (z.imag() == 0.0 && x == std::nearbyint(x));
  if (integer_z && std::abs(x) > double(Np))
    throw std::domain_error(
        "eval_F: integer z beyond N_prod leaves the sine zero uncancelled");
  long m = integer_z ? static_cast<long>(std::llrint(x)) : 0;
  if (z == cplx(0.0, 0.0))
    return s.lambda(0) == cplx(0.0, 0.0) ? LogComplex::zero()
                                         : LogComplex{0.0, 0.0};

  bool accelerated = !s.blocks.empty();
  if (integer_z && s.is_real() && accelerated) return eval_F_int_real(g, m);

  ProdAcc acc;
  long m0 = std::lround(std::min(std::abs(x), 4.0e18));
  if (integer_z) {
    long am = std::labs(m);
    m0 = am;
    double pm = (((am % 2) == 1) ? 1.0 : -1.0);
    acc.mul(cplx(pm * double(m), 0.0));
  } else {
    LogComplex ls = log_sinpi(z);
    if (ls.is_zero()) return LogComplex::zero();
    acc.log_mag = ls.log_mag - std::log(kPi);
    acc.phase = ls.phase;
  }
  cplx l0 = s.lambda(0);
  if (l0 != cplx(0.0, 0.0)) acc.mul((1.0 - z / l0) / z);

  long wlo = std::max(g.W0 + 1, m0 - g.W);
  long whi = std::min(Np, m0 + g.W);
  long am = std::labs(m);
  auto explicit_pair = [&](long n) {
    double dn = double(n);
    if (integer_z && n == am) {
      if (m > 0) {
        acc.mul((s.lambda(n) - z) / s.lambda(n));
        acc.mul(rel_factor(z, s.lambda(-n), -dn));
      } else {
        acc.mul((s.lambda(-n) - z) / s.lambda(-n));
        acc.mul(rel_factor(z, s.lambda(n), dn));
      }
      return;
    }
    acc.mul(rel_factor(z, s.lambda(n), dn));
    acc.mul(rel_factor(z, s.lambda(-n), -dn));
  };

  if (!accelerated) {
    for (long n = 1; n <= Np && !acc.zero; ++n) explicit_pair(n);
    if (acc.zero) return LogComplex::zero();
    acc.flush();
    return {acc.log_mag, wrap_phase(acc.phase)};
  }

  for (long n = 1; n <= std::min(g.W0, Np) && !acc.zero; ++n) explicit_pair(n);
  if (wlo <= whi)
    for (long n = wlo; n <= whi && !acc.zero; ++n) explicit_pair(n);
  if (acc.zero) return LogComplex::zero();

  TailHoles h = tail_holes(Np, g.W0, g.W, m0);
  cplx tails = 0.0;
  for (const ShiftBlock& b : s.blocks) {
    if (b.lo > Np) break;
    long lo1 = std::max(b.lo, h.a1), hi1 = std::min(b.hi, h.b1);
    if (lo1 <= hi1) tails += tail_log_sum(g, lo1, hi1, b.delta, z);
    long lo2 = std::max(b.lo, h.a2), hi2 = std::min(b.hi, h.b2);
    if (lo2 <= hi2) tails += tail_log_sum(g, lo2, hi2, b.delta, z);
  }
  acc.flush();
  return {acc.log_mag + tails.real(), wrap_phase(acc.phase + tails.imag())};
}

}  // namespace detail

inline LogComplex eval_F(const GeneratingFunction& g, cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("eval_F: z not finite");
  switch (g.mode) {
    case FMode::closed_form_sine: {
      LogComplex ls = log_sinpi(z);
      if (ls.is_zero()) return ls;
      return {ls.log_mag - std::log(kPi), ls.phase};
    }
    case FMode::raw_symmetric_product:
      return detail::eval_F_raw(g, z);
    case FMode::sine_relative:
      return detail::eval_F_sine_relative(g, z);
  }
  throw std::logic_error("eval_F: unknown mode");
}

// ---- carrier function -------------------------------------------------

namespace detail {

// |F'| at a spectral point by Richardson-extrapolated centered differences,
// with the exponential scale pulled out before exponentiating
inline LogComplex f_prime_abs(const GeneratingFunction& g, cplx w) {
  double hstep = 1e-6;
  LogComplex vp1 = eval_F(g, w + hstep);
  LogComplex vm1 = eval_F(g, w - hstep);
  LogComplex vp2 = eval_F(g, w + 0.5 * hstep);
  LogComplex vm2 = eval_F(g, w - 0.5 * hstep);
  double L = std::max(std::max(vp1.log_mag, vm1.log_mag),
                      std::max(vp2.log_mag, vm2.log_mag));
  if (L == kNegInf) return LogComplex::zero();
  auto scaled = [L](const LogComplex& v) {
    return v.is_zero() ? cplx(0.0, 0.0)
                       : std::polar(std::exp(v.log_mag - L), v.phase);
  };
  cplx d1 = (scaled(vp1) - scaled(vm1)) / (2.0 * hstep);
  cplx d2 = (scaled(vp2) - scaled(vm2)) / hstep;
  cplx deriv = (4.0 * d2 - d1) / 3.0;
  double mag = std::abs(deriv);
  if (mag == 0.0) return LogComplex::zero();
  return {std::log(mag) + L, 0.0};
}

}  // namespace detail

inline LogComplex eval_Phi_it(const GeneratingFunction& g, double t) {
  if (t == 0.0) throw std::invalid_argument("eval_Phi_it: t must be nonzero");
  if (!std::isfinite(t)) throw std::invalid_argument("eval_Phi_it: t not finite");
  const Spectrum& s = g.s();
  if (std::abs(t) > double(s.N) / 2.0)
    throw std::invalid_argument(
        "eval_Phi_it: need |t| <= N/2 so the window contains the nearest point");
  cplx it(0.0, t);
  double d2 = std::numeric_limits<double>::infinity();
  long hit = 0;
  bool exact = false;
  for (long n = -s.N; n <= s.N; ++n) {
    double dd = std::norm(it - s.lambda(n));
    if (dd < d2) {
      d2 = dd;
      hit = n;
    }
  }
  if (d2 == 0.0) exact = true;
  if (exact) return detail::f_prime_abs(g, s.lambda(hit));
  LogComplex f = eval_F(g, it);
  if (f.is_zero()) return LogComplex::zero();
  return {f.log_mag - 0.5 * std::log(d2), 0.0};
}

// ---- growth diagnostics ------------------------------------------------

struct TailFit {
  double a = 0.0;        // least-squares slope of log|F(x+iy)| vs log x
  double s_est = 0.0;    // a + 1/2
  double residual = 0.0; // rms of the fit residuals
  bool flagged = false;  // residual > 0.1: not power-like
};

namespace detail {

inline TailFit fit_tail_slope(const GeneratingFunction& g, double y,
                              double x_lo, double x_hi, int points) {
  TailFit fit;
  double lr = std::log(x_hi / x_lo);
  int P = std::max(points, 8);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(P), ly(P);
  for (int i = 0; i < P; ++i) {
    double x = x_lo * std::exp(lr * double(i) / double(P - 1));
    LogComplex v = eval_F(g, cplx(x, y));
    lx[i] = std::log(x);
    ly[i] = v.log_mag;
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double n = double(P);
  double denom = n * sxx - sx * sx;
  fit.a = (n * sxy - sx * sy) / denom;
  double b = (sy - fit.a * sx) / n;
  double rss = 0.0;
  for (int i = 0; i < P; ++i) {
    double r = ly[i] - (fit.a * lx[i] + b);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  fit.s_est = fit.a + 0.5;
  fit.flagged = fit.residual > 0.1;
  return fit;
}

}  // namespace detail

inline TailFit tail_exponent(const GeneratingFunction& g, double y, double x_lo,
                             double x_hi) {
  if (!(y > 0.0)) throw std::invalid_argument("tail_exponent: y must be > 0");
  if (!(x_lo > 0.0) || !(x_hi >= 1000.0 * x_lo))
    throw std::invalid_argument("tail_exponent: x range must span >= 3 decades");
  if (x_hi > double(g.N_prod))
    throw std::invalid_argument("tail_exponent: x range exceeds N_prod");
  int points = int(25.0 * std::log10(x_hi / x_lo));
  return detail::fit_tail_slope(g, y, x_lo, x_hi, points);
}

// ---- integral of |F(x)|^2 / (x^2 + t^2) --------------------------------

struct FIntegral {
  double log_value = 0.0;     // log of the [-X, X] quadrature
  double log_total = 0.0;     // log of quadrature + tail estimate
  double tail_fraction = 0.0; // estimated mass beyond X over the total
  double slope = 0.0;         // fitted growth exponent used for the tail
  bool reliable = true;       // tail <= 10% and the power model applied
};

// Composite quadrature: panel width <= 1/8 for |x| <= 4t (the integrand
// oscillates with period 1 and peaks near the origin), octave panels with
// adaptive halving beyond. The tail past X is estimated from the last
// half-octave [X/2, X] scaled by the fitted power law:
//   tail = I([X/2, X]) / (2^{1-2a} - 1).
inline FIntegral integrate_F_sq(const GeneratingFunction& g, double t, double X,
                                double rel_tol = 1e-8) {
  if (!(t > 0.0)) throw std::invalid_argument("integrate_F_sq: t must be > 0");
  if (!(X > 4.0 * t)) throw std::invalid_argument("integrate_F_sq: X too small");
  if (X > double(g.N_prod))
    throw std::invalid_argument("integrate_F_sq: X exceeds N_prod");
  auto f = [&](double x) {
    LogComplex v = eval_F(g, cplx(x, 0.0));
    if (v.is_zero()) return 0.0;
    return std::exp(2.0 * v.log_mag - std::log(x * x + t * t));
  };
  const GLRule& rule = gauss_legendre(12);
  double core = 4.0 * t;
  double I = 0.0;
  for (int side = 0; side < 2; ++side) {
    double sgn = side == 0 ? 1.0 : -1.0;
    auto fs = [&](double x) { return f(sgn * x); };
    I += integrate_adaptive(fs, 0.0, core, rule, rel_tol);
    double a = core;
    while (2.0 * a < X) {
      I += integrate_adaptive(fs, a, 2.0 * a, rule, rel_tol);
      a *= 2.0;
    }
    if (a < X) I += integrate_adaptive(fs, a, X, rule, rel_tol);
  }
  double calib = 0.0;
  double clo = std::max(X / 2.0, core);
  for (int side = 0; side < 2; ++side) {
    double sgn = side == 0 ? 1.0 : -1.0;
    auto fs = [&](double x) { return f(sgn * x); };
    calib += integrate_adaptive(fs, clo, X, rule, rel_tol);
  }

  FIntegral out;
  double y = 1.0 + g.s().sup_tau();
  TailFit fit = detail::fit_tail_slope(g, y, std::max(8.0, X / 8.0), X, 13);
  out.slope = fit.a;
  double tail;
  if (fit.a < 0.49 && clo == X / 2.0) {
    tail = calib / (std::pow(2.0, 1.0 - 2.0 * fit.a) - 1.0);
  } else {
    tail = calib;  // growth too close to divergence: cap with the last octave
    out.reliable = false;
  }
  if (fit.flagged) out.reliable = false;
  out.log_value = std::log(I);
  out.log_total = std::log(I + tail);
  out.tail_fraction = tail / (I + tail);
  if (out.tail_fraction > 0.10) out.reliable = false;
  return out;
}

// ---- Lemma-style inequality ratios -------------------------------------

struct PhiRow {
  double t = 0.0;
  double ratio_ii = 0.0;       // |F(it)| / ((|lambda_0|+t) Phi(it))
  double ratio_iii_max = 0.0;  // max_n of the pointwise carrier bound ratio
  double ratio_iv = 0.0;       // Phi(it) against the integral bound
  double ratio_itest = 0.0;    // |F(it)| against the integral bound
  bool integral_ok = true;
};

inline std::vector<PhiRow> phi_inequality_report(const GeneratingFunction& g,
                                                 const std::vector<double>& t_grid,
                                                 double X_factor = 16.0,
                                                 double rel_tol = 1e-8) {
  const Spectrum& s = g.s();
  std::vector<PhiRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t > 0.0))
      throw std::invalid_argument("phi_inequality_report: t must be > 0");
    PhiRow row;
    row.t = t;
    LogComplex F_it = eval_F(g, cplx(0.0, t));
    LogComplex Phi = eval_Phi_it(g, t);
    double l0 = std::abs(s.lambda(0));
    double log_denom = std::log(l0 + t) + Phi.log_mag;
    row.ratio_ii = std::exp(F_it.log_mag - log_denom);
    double best = 0.0;
    cplx it(0.0, t);
    for (long n = -s.N; n <= s.N; ++n) {
      cplx ln = s.lambda(n);
      double r = std::exp(F_it.log_mag +
                          0.5 * std::log(std::norm(ln) + t * t) -
                          std::log(std::abs(it - ln)) - log_denom);
      best = std::max(best, r);
    }
    row.ratio_iii_max = best;
    double X = X_factor * t;
    FIntegral I = integrate_F_sq(g, t, X, rel_tol);
    row.integral_ok = I.reliable;
    // bound (1/pi) integral, then |t|^{+-1/2} e^{pi t} sqrt(...)
    double half_logI = 0.5 * (I.log_total - std::log(kPi));
    double log_rhs_phi = kPi * t - 0.5 * std::log(t) + half_logI;
    double log_rhs_f = kPi * t + 0.5 * std::log(t) + half_logI;
    row.ratio_iv = std::exp(Phi.log_mag - log_rhs_phi);
    row.ratio_itest = std::exp(F_it.log_mag - log_rhs_f);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace expbasis
