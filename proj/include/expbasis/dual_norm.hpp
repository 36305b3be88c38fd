#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "expbasis/generating_function.hpp"
#include "expbasis/log_complex.hpp"
#include "expbasis/spectrum.hpp"

// Dual norms ||psi||_t of the biorthogonal-style functionals attached to a
// spectrum, computed three ways:
//   series:   ||psi||_t^2 = (1/2pi) sum_{|n|<=M} |F(n)|^2/(n^2+t^2)
//                           + 4 |F(it)-F(-it)|^2 / (t sinh 2pi t),
//   integral: ||psi||_t   = ( int_{-X}^{X} |F(x)|^2/(x^2+t^2) dx )^{1/2},
//   closed:   ||psi||_t^2 = 8 tanh(pi t) / (pi^2 t)   (integer spectrum).
// Series and integral are equivalent norms, not equal ones; their ratio
// settles near 4/sqrt(pi) for the integer spectrum and must stay t-uniform
// for perturbed ones. The weight sequence w_n = 1/||psi||_{2^n} feeds the
// interpolation machinery downstream.

namespace expbasis {

struct SeriesNormResult {
  double log_norm = 0.0;         // log ||psi||_t
  long M_final = 0;              // truncation actually reached
  double shell_rel = 0.0;        // relative weight of the last doubling shell
  double boundary_fraction = 0.0;// share of the sinh boundary term in norm^2
  bool converged = false;        // shell_rel dropped below 1e-10
};

struct IntegralNormResult {
  double log_norm = 0.0;
  double X = 0.0;
  double tail_fraction = 0.0;
  bool reliable = true;
};

inline SeriesNormResult psi_norm_series(const GeneratingFunction& g, double t,
                                        long M, long M_cap = 10000000) {
  if (!(t >= 1.0)) throw std::invalid_argument("psi_norm_series: need t >= 1");
  if (double(M) < 4.0 * t)
    throw std::invalid_argument("psi_norm_series: need M >= 4t");
  long cap = std::min(M_cap, g.N_prod);
  if (M > cap) M = cap;

  auto term = [&](long n) {
    LogComplex v = eval_F(g, cplx(double(n), 0.0));
    if (v.is_zero()) return 0.0;
    return std::exp(2.0 * v.log_mag - std::log(double(n) * double(n) + t * t));
  };

  // boundary term, kept in logs: sinh(2pi t) overflows past t ~ 112
  LogComplex F_it = eval_F(g, cplx(0.0, t));
  LogComplex F_mit = eval_F(g, cplx(0.0, -t));
  LogComplex diff = lc_sub(F_it, F_mit);
  double log_boundary = kNegInf;
  if (!diff.is_zero()) {
    double log_sinh2 = 2.0 * kPi * t - std::log(2.0) + std::log1p(-std::exp(-4.0 * kPi * t));
    log_boundary = std::log(4.0) + 2.0 * diff.log_mag - std::log(t) - log_sinh2;
  }

  // ascending |n|: n = 0, then the pairs going outward
  double sum = term(0);
  for (long n = 1; n <= M; ++n) sum += term(n) + term(-n);

  SeriesNormResult out;
  double boundary = (log_boundary == kNegInf) ? 0.0 : std::exp(log_boundary);
  double total = sum / (2.0 * kPi) + boundary;
  if (!(total > 0.0))
    throw std::runtime_error("psi_norm_series: vanishing norm, spectrum degenerate");
  out.shell_rel = 1.0;
  while (true) {
    if (out.shell_rel < 1e-10) {
      out.converged = true;
      break;
    }
    if (M >= cap) break;
    long M2 = std::min(2 * M, cap);
    double shell = 0.0;
    for (long n = M + 1; n <= M2; ++n) shell += term(n) + term(-n);
    shell /= 2.0 * kPi;
    M = M2;
    total += shell;
    out.shell_rel = shell / total;
    if (out.shell_rel < 1e-10) out.converged = true;
  }
  out.M_final = M;
  out.boundary_fraction = boundary / total;
  out.log_norm = 0.5 * std::log(total);
  return out;
}

inline IntegralNormResult psi_norm_integral(const GeneratingFunction& g, double t,
                                            double X, double rel_tol = 1e-8) {
  if (!(t >= 2.0)) throw std::invalid_argument("psi_norm_integral: need t >= 2");
  if (!(X >= 16.0 * t))
    throw std::invalid_argument("psi_norm_integral: need X >= 16t");
  FIntegral I = integrate_F_sq(g, t, X, rel_tol);
  IntegralNormResult out;
  out.log_norm = 0.5 * I.log_total;
  out.X = X;
  out.tail_fraction = I.tail_fraction;
  out.reliable = I.reliable;
  return out;
}

// integer spectrum only; log of ||psi||_t with no truncation error at all
inline double psi_norm_closed_log(const GeneratingFunction& g, double t) {
  if (!g.s().is_integer())
    throw std::invalid_argument("psi_norm_closed_log: integer spectrum only");
  if (!(t > 0.0)) throw std::invalid_argument("psi_norm_closed_log: need t > 0");
  double log_tanh = std::log1p(-std::exp(-2.0 * kPi * t)) -
                    std::log1p(std::exp(-2.0 * kPi * t));
  return 0.5 * (std::log(8.0) + log_tanh - std::log(kPi * kPi * t));
}

// ---- weight sequence ---------------------------------------------------

struct WeightSeq {
  double p = 2.0;
  long n_max = 0;
  std::vector<double> w;  // w[n] = 1/||psi||_{2^n}, n in [0, n_max]

  double at(long n) const {
    if (n < 0) return w.front();  // constant extension below the window
    if (n > n_max) throw std::out_of_range("WeightSeq::at: n beyond n_max");
    return w[static_cast<std::size_t>(n)];
  }
};

inline WeightSeq weight_sequence(const GeneratingFunction& g, long n_max,
                                 double p = 2.0) {
  if (n_max < 4) throw std::invalid_argument("weight_sequence: need n_max >= 4");
  if (p != 2.0)
    throw std::invalid_argument("weight_sequence: only p = 2 is implemented");
  double t_top = std::ldexp(1.0, int(n_max));
  if (double(g.N_prod) < 256.0 * t_top)
    throw std::invalid_argument(
        "weight_sequence: N_prod must cover 256 * 2^n_max");
  WeightSeq ws;
  ws.p = p;
  ws.n_max = n_max;
  ws.w.resize(static_cast<std::size_t>(n_max) + 1);
  for (long n = 0; n <= n_max; ++n) {
    double t = std::ldexp(1.0, int(n));
    // truncation kept proportional to t so the leftover bias cancels in
    // the dyadic ratios the interpolation indices are built from
    SeriesNormResult r = psi_norm_series(g, t, std::lround(16.0 * t),
                                         std::lround(256.0 * t));
    ws.w[static_cast<std::size_t>(n)] = std::exp(-r.log_norm);
  }
  for (long n = 0; n < n_max; ++n) {
    double lo = ws.w[static_cast<std::size_t>(n)];
    double hi = ws.w[static_cast<std::size_t>(n) + 1];
    if (hi < lo * (1.0 - 1e-9) || hi > 2.0 * lo * (1.0 + 1e-9))
      throw std::runtime_error(
          "weight_sequence: doubling invariant w_n <= w_{n+1} <= 2 w_n failed");
  }
  return ws;
}

// ---- norm curves -------------------------------------------------------

enum class NormMethod { series, integral, closed_form };

inline const char* norm_method_name(NormMethod m) {
  switch (m) {
    case NormMethod::series: return "series";
    case NormMethod::integral: return "integral";
    case NormMethod::closed_form: return "closed_form";
  }
  return "unknown";
}

struct CurveParams {
  double M_factor = 16.0;
  double M_cap_factor = 256.0;
  double X_factor = 16.0;
  double quad_rel = 1e-8;
};

struct CurvePoint {
  double t = 0.0;
  double log_norm = 0.0;
  NormMethod method = NormMethod::series;
  double M_or_X = 0.0;       // truncation actually used
  double tail_fraction = 0.0;
};

struct DualNormCurve {
  std::vector<CurvePoint> points;
};

inline DualNormCurve dual_norm_curve(const GeneratingFunction& g,
                                     const std::vector<double>& t_grid,
                                     NormMethod method,
                                     const CurveParams& par = {}) {
  DualNormCurve curve;
  curve.points.reserve(t_grid.size());
  for (double t : t_grid) {
    CurvePoint pt;
    pt.t = t;
    pt.method = method;
    switch (method) {
      case NormMethod::series: {
        SeriesNormResult r = psi_norm_series(
            g, t, std::lround(par.M_factor * t),
            std::lround(par.M_cap_factor * t));
        pt.log_norm = r.log_norm;
        pt.M_or_X = double(r.M_final);
        pt.tail_fraction = r.shell_rel;
        break;
      }
      case NormMethod::integral: {
        IntegralNormResult r =
            psi_norm_integral(g, t, par.X_factor * t, par.quad_rel);
        pt.log_norm = r.log_norm;
        pt.M_or_X = r.X;
        pt.tail_fraction = r.tail_fraction;
        break;
      }
      case NormMethod::closed_form: {
        pt.log_norm = psi_norm_closed_log(g, t);
        pt.M_or_X = 0.0;
        pt.tail_fraction = 0.0;
        break;
      }
    }
    curve.points.push_back(pt);
  }
  return curve;
}

// ||psi||_t may wiggle at scale sqrt(2) between grid points but must not
// grow along t; returns false when any ordered pair violates that
inline bool curve_monotone(const DualNormCurve& c, double slack = 1e-3) {
  double bound = 0.5 * std::log(2.0) + slack;
  for (std::size_t i = 0; i < c.points.size(); ++i)
    for (std::size_t j = i + 1; j < c.points.size(); ++j) {
      const CurvePoint &a = c.points[i], &b = c.points[j];
      if (b.t >= a.t && a.t >= 2.0 && b.log_norm > a.log_norm + bound)
        return false;
    }
  return true;
}

}  // namespace expbasis
