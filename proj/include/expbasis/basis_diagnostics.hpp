#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "expbasis/dual_norm.hpp"
#include "expbasis/generating_function.hpp"
#include "expbasis/log_complex.hpp"
#include "expbasis/spectrum.hpp"

// Direct Riesz-basis diagnostics: Gram matrices of the exponential family in
// L2(-pi, pi) and in the t-inner product (f', g') + t^2 (f, g), the basis
// weights v_n, h_n, q_n, and the ratio of ||psi||_t against its predicted
// envelope sqrt(t) e^{-pi t} |Phi(it)|. All pairings are closed-form; no
// quadrature happens anywhere in this header.

namespace expbasis {

enum class GramMode { L2, H1 };

struct GramMatrix {
  GramMode mode = GramMode::L2;
  double t = 0.0;  // only meaningful in H1 mode
  long N = 0;      // indices run over [-N, N]
  Eigen::MatrixXcd G;
};

namespace detail {

// (e_a, e_b) = 2 sin(pi (a - conj b)) / (a - conj b); this evaluates the
// kernel 2 sin(pi w)/w with its removable singularity at w = 0
inline cplx pair_kernel(cplx w) {
  double aw = std::abs(w);
  if (aw == 0.0) return {2.0 * kPi, 0.0};
  if (aw < 1e-8) {
    cplx pw = kPi * w;
    return 2.0 * kPi * (1.0 - pw * pw / 6.0);
  }
  return 2.0 * std::sin(kPi * w) / w;
}

// sinh(2 pi tau)/tau, the squared L2 norm of e_lambda, with its limit 2 pi
inline double v_of_tau(double tau) {
  double a = std::fabs(tau);
  if (a == 0.0) return 2.0 * kPi;
  if (a < 1e-4) {
    double x = 2.0 * kPi * tau;
    return 2.0 * kPi * (1.0 + x * x / 6.0 * (1.0 + x * x / 20.0));
  }
  return std::sinh(2.0 * kPi * tau) / tau;
}

}  // namespace detail

inline GramMatrix gram(const Spectrum& s, GramMode mode, double t, long N) {
  if (N < 1 || N > s.N)
    throw std::invalid_argument("gram: N outside the spectrum window");
  if (mode == GramMode::H1 && !(t >= 1.0))
    throw std::invalid_argument("gram: H1 mode needs t >= 1");
  GramMatrix out;
  out.mode = mode;
  out.t = (mode == GramMode::H1) ? t : 0.0;
  out.N = N;
  long size = 2 * N + 1;
  out.G.resize(size, size);
  for (long m = -N; m <= N; ++m) {
    cplx lm = s.lambda(m);
    for (long n = m; n <= N; ++n) {
      cplx ln = s.lambda(n);
      cplx e;
      if (n == m) {
        double v = detail::v_of_tau(s.tau(m));
        e = (mode == GramMode::H1) ? cplx(v * (std::norm(lm) + t * t), 0.0)
                                   : cplx(v, 0.0);
      } else {
        e = detail::pair_kernel(lm - std::conj(ln));
        if (mode == GramMode::H1) e *= lm * std::conj(ln) + t * t;
      }
      out.G(m + N, n + N) = e;
      out.G(n + N, m + N) = std::conj(e);
    }
  }
  return out;
}

struct CondBounds {
  double cond = 1.0;  // infinity flags singular-to-tolerance
  double riesz_lower = 0.0;
  double riesz_upper = 0.0;
  double lam_min = 0.0;
  double lam_max = 0.0;
};

inline CondBounds cond_and_bounds(const GramMatrix& gm, bool normalize) {
  const Eigen::MatrixXcd& A = gm.G;
  if (A.rows() != A.cols() || A.rows() < 1)
    throw std::invalid_argument("cond_and_bounds: matrix is not square");
  double scale = A.cwiseAbs().maxCoeff();
  double herm = (A - A.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12 * std::max(scale, 1.0))
    throw std::runtime_error("cond_and_bounds: matrix is not Hermitian");

  Eigen::MatrixXcd B = A;
  if (normalize) {
    long n = A.rows();
    Eigen::VectorXd d(n);
    for (long i = 0; i < n; ++i) {
      double di = A(i, i).real();
      if (!(di > 0.0))
        throw std::runtime_error("cond_and_bounds: nonpositive diagonal");
      d(i) = std::sqrt(di);
    }
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) B(i, j) = A(i, j) / (d(i) * d(j));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B,
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("cond_and_bounds: eigensolver failed");
  CondBounds cb;
  cb.lam_min = es.eigenvalues()(0);
  cb.lam_max = es.eigenvalues()(es.eigenvalues().size() - 1);
  if (cb.lam_min < -1e-9 * std::max(std::fabs(cb.lam_max), 1e-300))
    throw std::runtime_error("cond_and_bounds: matrix is not PSD");
  cb.riesz_lower = std::sqrt(std::max(cb.lam_min, 0.0));
  cb.riesz_upper = std::sqrt(std::max(cb.lam_max, 0.0));
  if (cb.lam_min <= 1e-12 * cb.lam_max)
    cb.cond = std::numeric_limits<double>::infinity();
  else
    cb.cond = cb.lam_max / cb.lam_min;
  return cb;
}

struct BasisWeights {
  long N = 0;
  double s_exp = 0.0;
  // layout: index n lives at slot n + N
  std::vector<double> v, h, q;
};

inline BasisWeights basis_weights(const Spectrum& s, double s_exp) {
  if (!(s_exp >= 0.0 && s_exp <= 1.0))
    throw std::invalid_argument("basis_weights: s_exp outside [0, 1]");
  BasisWeights bw;
  bw.N = s.N;
  bw.s_exp = s_exp;
  std::size_t size = static_cast<std::size_t>(2 * s.N + 1);
  bw.v.resize(size);
  bw.h.resize(size);
  bw.q.resize(size);
  for (long n = -s.N; n <= s.N; ++n) {
    double v = detail::v_of_tau(s.tau(n));
    double a2 = 1.0 + std::norm(s.lambda(n));
    std::size_t i = static_cast<std::size_t>(n + s.N);
    bw.v[i] = v;
    bw.h[i] = a2 * v;
    bw.q[i] = v * std::pow(a2, s_exp);
  }
  return bw;
}

struct PsitRow {
  double t = 0.0;
  double log_r = 0.0;
  double r = 0.0;
};

struct PsitTable {
  std::vector<PsitRow> rows;
  double r_min = 0.0;
  double r_max = 0.0;
  double band = 0.0;  // r_max / r_min
};

// r(t) = ||psi||_t / (sqrt(t) e^{-pi t} |Phi(it)|), evaluated in the log
// domain. The curve must come from the same generating function that is
// passed here; there is no way to verify that structurally, so it is part
// of the calling contract.
inline PsitTable psitnorm_ratio(const GeneratingFunction& g,
                                const DualNormCurve& curve) {
  if (curve.points.size() < 4)
    throw std::invalid_argument("psitnorm_ratio: need at least 4 grid points");
  // the 1e-9 slack forgives endpoint dust from geometric grid accumulation
  for (const CurvePoint& p : curve.points)
    if (!(p.t >= 4.0 * (1.0 - 1e-9) && p.t <= 64.0 * (1.0 + 1e-9)))
      throw std::invalid_argument("psitnorm_ratio: t grid must lie in [4, 64]");
  PsitTable tab;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const CurvePoint& p : curve.points) {
    double lphi = eval_Phi_it(g, p.t).log_mag;
    double lpred = 0.5 * std::log(p.t) - kPi * p.t + lphi;
    PsitRow row;
    row.t = p.t;
    row.log_r = p.log_norm - lpred;
    row.r = std::exp(row.log_r);
    lo = std::min(lo, row.log_r);
    hi = std::max(hi, row.log_r);
    tab.rows.push_back(row);
  }
  tab.r_min = std::exp(lo);
  tab.r_max = std::exp(hi);
  tab.band = std::exp(hi - lo);
  return tab;
}

}  // namespace expbasis
