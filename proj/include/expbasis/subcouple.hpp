#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "expbasis/dual_norm.hpp"

// Weighted-shift machinery: the operator T_theta = S - 2^theta I on l_2(w),
// the interpolation indices sigma_0 / sigma_1 of a weight sequence, and the
// trichotomy they decide. sigma_1 is the sup-slope of log2 w over length-k
// windows, sigma_0 the inf-slope over windows starting at n >= 0. T_theta is
// invertible above sigma_1, an isomorphism onto a codimension-one closed
// subspace below sigma_0, and has non-closed range in between. Finite
// sections only corroborate; the sigma comparison is the classifier.

namespace expbasis {

// finitely supported coefficient sequences, index -> value
using CoefSeq = std::map<long, std::complex<double>>;

inline CoefSeq zeta(long k) { return CoefSeq{{k, {1.0, 0.0}}}; }

struct ThetaOperator {
  double theta = 0.5;
  WeightSeq w;
  long N_w = 0;  // index window [-N_w, N_w]
};

inline ThetaOperator make_theta_operator(double theta, const WeightSeq& w,
                                         long N_w) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::invalid_argument(
        "make_theta_operator: theta must lie strictly in (0,1)");
  if (N_w < 2) throw std::invalid_argument("make_theta_operator: window too small");
  if (N_w > w.n_max)
    throw std::invalid_argument("make_theta_operator: window exceeds weight range");
  for (long n = -N_w; n < N_w; ++n) {
    double lo = w.at(n), hi = w.at(n + 1);
    if (!(hi >= lo * (1.0 - 1e-9)) || !(hi <= 2.0 * lo * (1.0 + 1e-9)))
      throw std::invalid_argument(
          "make_theta_operator: weights violate the doubling invariant");
  }
  return ThetaOperator{theta, w, N_w};
}

struct SigmaRow {
  long k = 0;
  double sigma0_k = 0.0;
  double sigma1_k = 0.0;
};

struct SigmaIndices {
  double sigma0 = 0.0;  // inf over n >= 0 of the length-k_max slope
  double sigma1 = 0.0;  // sup over all in-window n
  std::vector<SigmaRow> table;  // every k from 1 to k_max, for convergence inspection
};

// sigma_1(k) = sup_n (1/k) log2(w_{n+k}/w_n), sigma_0(k) = inf_{n>=0} of the
// same; both restricted so n and n+k stay inside [-N_w, N_w]. Below the
// window the weight extends as a constant, so negative starts contribute
// flat or crossing slopes to the sup.
inline SigmaIndices sigma_indices(const WeightSeq& w, long k_max, long N_w = -1) {
  if (N_w < 0) N_w = w.n_max;
  if (N_w > w.n_max)
    throw std::invalid_argument("sigma_indices: window exceeds weight range");
  if (k_max < 1) throw std::invalid_argument("sigma_indices: k_max < 1");
  if (k_max > N_w)
    throw std::invalid_argument("sigma_indices: window too short for k_max");
  std::vector<double> lw(static_cast<std::size_t>(2 * N_w + 1));
  for (long n = -N_w; n <= N_w; ++n)
    lw[static_cast<std::size_t>(n + N_w)] = std::log2(w.at(n));
  SigmaIndices out;
  out.table.reserve(static_cast<std::size_t>(k_max));
  for (long k = 1; k <= k_max; ++k) {
    double s1 = -std::numeric_limits<double>::infinity();
    double s0 = std::numeric_limits<double>::infinity();
    for (long n = -N_w; n + k <= N_w; ++n) {
      double slope = (lw[static_cast<std::size_t>(n + k + N_w)] -
                      lw[static_cast<std::size_t>(n + N_w)]) /
                     double(k);
      if (slope > s1) s1 = slope;
      if (n >= 0 && slope < s0) s0 = slope;
    }
    out.table.push_back({k, s0, s1});
  }
  out.sigma0 = out.table.back().sigma0_k;
  out.sigma1 = out.table.back().sigma1_k;
  return out;
}

struct ApplyResult {
  CoefSeq out;
  bool clipped = false;  // a shifted entry fell off the window edge
};

// (T_theta alpha)_n = alpha_{n-1} - 2^theta alpha_n. The raw recurrence is
// defined for any finite theta; the operator type gates (0,1) separately.
inline ApplyResult apply_T(double theta, const CoefSeq& alpha, long N_w) {
  if (!std::isfinite(theta)) throw std::invalid_argument("apply_T: theta not finite");
  if (N_w < 1) throw std::invalid_argument("apply_T: empty window");
  double a = std::exp2(theta);
  ApplyResult r;
  for (const auto& [n, v] : alpha) {
    if (n < -N_w || n > N_w)
      throw std::invalid_argument("apply_T: support outside window");
    if (v == std::complex<double>(0.0, 0.0)) continue;
    r.out[n] -= a * v;
    if (n + 1 > N_w)
      r.clipped = true;
    else
      r.out[n + 1] += v;
  }
  for (auto it = r.out.begin(); it != r.out.end();) {
    if (it->second == std::complex<double>(0.0, 0.0))
      it = r.out.erase(it);
    else
      ++it;
  }
  return r;
}

inline ApplyResult apply_T(const ThetaOperator& op, const CoefSeq& alpha) {
  return apply_T(op.theta, alpha, op.N_w);
}

// f_theta(alpha) = sum_n 2^{n theta} alpha_n, the functional annihilating
// ran T_theta. Kahan-compensated componentwise, ascending index order.
inline std::complex<double> f_theta(double theta, const CoefSeq& alpha) {
  if (!std::isfinite(theta)) throw std::invalid_argument("f_theta: theta not finite");
  double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
  for (const auto& [n, v] : alpha) {
    double wgt = std::exp2(double(n) * theta);
    double tr = wgt * v.real() - cr;
    double ur = sr + tr;
    cr = (ur - sr) - tr;
    sr = ur;
    double ti = wgt * v.imag() - ci;
    double ui = si + ti;
    ci = (ui - si) - ti;
    si = ui;
  }
  return {sr, si};
}

// l_2(w) norm of a finitely supported sequence
inline double weighted_norm(const WeightSeq& w, const CoefSeq& alpha) {
  double s = 0.0;
  for (const auto& [n, v] : alpha) {
    double wn = w.at(n);
    s += std::norm(v) * wn * wn;
  }
  return std::sqrt(s);
}

struct NeumannResult {
  CoefSeq alpha;
  long terms = 0;         // shift powers actually summed
  double residual = 0.0;  // ||T_theta alpha - beta||_{l2(w)}
};

// alpha = -sum_{j>=0} 2^{-(j+1) theta} S^j beta, truncated once the weighted
// increment falls below tol. Only valid when 2^theta clears the spectral
// radius 2^{sigma_1} with a margin; refuse otherwise instead of summing a
// possibly divergent series.
inline NeumannResult neumann_inverse(const ThetaOperator& op, const CoefSeq& beta,
                                     double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("neumann_inverse: tol must be positive");
  long k_max = std::min<long>(32, op.N_w);
  double sig1 = sigma_indices(op.w, k_max, op.N_w).sigma1;
  if (op.theta <= sig1 + 0.05)
    throw std::domain_error(
        "neumann_inverse: theta <= sigma_1 + margin, series may diverge");
  if (beta.empty()) return {};
  for (const auto& [n, v] : beta) {
    (void)v;
    if (n < -op.N_w || n > op.N_w)
      throw std::invalid_argument("neumann_inverse: beta outside window");
  }
  long b_hi = beta.rbegin()->first;

  NeumannResult r;
  for (long j = 0;; ++j) {
    // term j lives on support + j and its image touches support + j + 1
    if (b_hi + j + 1 > op.N_w)
      throw std::runtime_error(
          "neumann_inverse: window exhausted before the increment met tol");
    double coef = std::exp2(-double(j + 1) * op.theta);
    CoefSeq term;
    for (const auto& [n, v] : beta) term[n + j] = -coef * v;
    double inc = weighted_norm(op.w, term);
    if (inc < tol) break;
    for (const auto& [n, v] : term) r.alpha[n] += v;
    r.terms = j + 1;
  }
  CoefSeq res = apply_T(op, r.alpha).out;
  for (const auto& [n, v] : beta) res[n] -= v;
  r.residual = weighted_norm(op.w, res);
  if (!(r.residual < 10.0 * tol))
    throw std::runtime_error("neumann_inverse: residual exceeds 10*tol");
  return r;
}

struct LsvRow {
  long N = 0;
  double lsv = 0.0;
};

namespace detail {

// count of eigenvalues of the symmetric tridiagonal (d, e) strictly below x,
// via the LDL^T sign recurrence
inline long sturm_count_below(const std::vector<double>& d,
                              const std::vector<double>& e, double x) {
  long cnt = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double off = (i == 0) ? 0.0 : e[i - 1] * e[i - 1];
    q = (d[i] - x) - off / q;
    if (q < 0.0) ++cnt;
    if (std::fabs(q) < 1e-300) q = -1e-300;  // keep the recurrence alive on exact hits
  }
  return cnt;
}

}  // namespace detail

// Smallest singular value of the (2N+1)-section of T_theta in the orthonormal
// coordinates u_n = zeta_n / w_n, where the matrix is lower bidiagonal with
// -2^theta on the diagonal and w_{n+1}/w_n on the subdiagonal. Bisection on
// the tridiagonal normal matrix B^T B, resolved to ~1e-14 of its range.
inline std::vector<LsvRow> finite_section_lsv(const ThetaOperator& op,
                                              const std::vector<long>& sizes) {
  std::vector<LsvRow> out;
  out.reserve(sizes.size());
  double a = std::exp2(op.theta);
  for (long N : sizes) {
    if (N < 1 || N > op.N_w)
      throw std::invalid_argument("finite_section_lsv: size outside window");
    std::size_t m = static_cast<std::size_t>(2 * N + 1);
    std::vector<double> d(m), e(m - 1);
    // column n holds -a at row n and c = w_{n+1}/w_n at row n+1 (absent for n = N)
    for (long n = -N; n <= N; ++n) {
      std::size_t i = static_cast<std::size_t>(n + N);
      double c = (n < N) ? op.w.at(n + 1) / op.w.at(n) : 0.0;
      d[i] = a * a + c * c;
      if (n < N) e[i] = -a * c;
    }
    double hi = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double g = d[i];
      if (i > 0) g += std::fabs(e[i - 1]);
      if (i + 1 < m) g += std::fabs(e[i]);
      if (g > hi) hi = g;
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      if (detail::sturm_count_below(d, e, mid) >= 1)
        hi = mid;
      else
        lo = mid;
    }
    out.push_back({N, std::sqrt(0.5 * (lo + hi))});
  }
  return out;
}

enum class Verdict { Invertible, CodimOneClosed, NotClosed };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Invertible: return "Invertible";
    case Verdict::CodimOneClosed: return "CodimOneClosed";
    default: return "NotClosed";
  }
}

struct SubcoupleClassification {
  Verdict verdict = Verdict::NotClosed;
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  bool uncertain = false;       // theta within 1/k_max of a sigma index
  std::vector<LsvRow> lsv;      // corroborating finite sections
  bool annihilation_ok = true;  // f_theta kills ran T_theta (checked when codim-1)
};

// Exact trichotomy from the sigma comparison; finite sections and the
// f_theta range check ride along as evidence, never as the decision.
inline SubcoupleClassification classify(double theta, const WeightSeq& w,
                                        long k_max = 32, long N_w = -1,
                                        std::vector<long> lsv_sizes = {}) {
  if (N_w < 0) N_w = w.n_max;
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::invalid_argument("classify: theta must lie strictly in (0,1)");
  SigmaIndices si = sigma_indices(w, k_max, N_w);
  SubcoupleClassification c;
  c.sigma0 = si.sigma0;
  c.sigma1 = si.sigma1;
  if (theta > c.sigma1)
    c.verdict = Verdict::Invertible;
  else if (theta < c.sigma0)
    c.verdict = Verdict::CodimOneClosed;
  else
    c.verdict = Verdict::NotClosed;
  double res = 1.0 / double(k_max);
  c.uncertain =
      std::fabs(theta - c.sigma0) < res || std::fabs(theta - c.sigma1) < res;

  ThetaOperator op = make_theta_operator(theta, w, N_w);
  if (lsv_sizes.empty()) {
    lsv_sizes = {std::min<long>(64, N_w), std::min<long>(256, N_w)};
    if (lsv_sizes[1] == lsv_sizes[0]) lsv_sizes.pop_back();
  }
  c.lsv = finite_section_lsv(op, lsv_sizes);

  if (c.verdict == Verdict::CodimOneClosed) {
    // range membership: f_theta must annihilate T_theta x for random x
    std::mt19937 rng(20260822u);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    long half = std::max<long>(2, N_w / 2);
    for (int trial = 0; trial < 8; ++trial) {
      CoefSeq x;
      for (int j = 0; j < 12; ++j) {
        long n = long(rng() % static_cast<unsigned long>(2 * half + 1)) - half;
        x[n] = {U(rng), U(rng)};
      }
      CoefSeq Tx = apply_T(op, x).out;
      double scale = 0.0;
      for (const auto& [n, v] : Tx) scale += std::exp2(double(n) * theta) * std::abs(v);
      if (std::abs(f_theta(theta, Tx)) > 1e-12 * std::max(1.0, scale))
        c.annihilation_ok = false;
    }
  }
  return c;
}

}  // namespace expbasis
