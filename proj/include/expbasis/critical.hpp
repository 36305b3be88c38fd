#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "expbasis/spectrum.hpp"
#include "expbasis/subcouple.hpp"

// Critical Sobolev exponents s0 <= s1 by three independent routes: windowed
// shell sums of delta_n/n, block averages of a b-sequence, and the slope
// indices of the K-functional weight sequence (s0 = 1 - sigma_1,
// s1 = 1 - sigma_0). The limits in the defining formulas have no stated
// rates, so every route reports at its largest admissible resolution with a
// Cauchy-style gap as the uncertainty; reconcile() cross-checks the routes.

namespace expbasis {

enum class CriticalMethod { delta_sum, block_b, weight_slope };

inline const char* critical_method_name(CriticalMethod m) {
  switch (m) {
    case CriticalMethod::delta_sum: return "delta_sum";
    case CriticalMethod::block_b: return "block_b";
    default: return "weight_slope";
  }
}

struct CriticalIndices {
  double s0 = 0.5;
  double s1 = 0.5;
  CriticalMethod method = CriticalMethod::delta_sum;
  double tau_used = 0.0;  // 0 when the route has no tau parameter
  double t_lo = 0.0, t_hi = 0.0;
  double uncertainty = 0.0;
};

namespace detail {

inline void validate_critical(const CriticalIndices& ci, const char* who) {
  if (!(ci.s0 <= ci.s1 + 1e-12))
    throw std::runtime_error(std::string(who) + ": s0 > s1");
  if (ci.s0 < -1e-9 || ci.s1 > 1.0 + 1e-9)
    throw std::runtime_error(std::string(who) +
                             ": estimates left [0,1], hypothesis violated");
  if (!(ci.uncertainty >= 0.0))
    throw std::runtime_error(std::string(who) + ": negative uncertainty");
}

// (1/ln tau) sum_{t < |n| <= tau t} delta_n / n, paired by |n| ascending,
// Kahan-compensated
inline double delta_shell_avg(const Spectrum& s, double t, double tau) {
  long lo = static_cast<long>(std::floor(t)) + 1;
  long hi = static_cast<long>(std::floor(tau * t));
  double sum = 0.0, c = 0.0;
  for (long n = lo; n <= hi; ++n) {
    double term = (s.delta(n) - s.delta(-n)) / double(n);
    double y = term - c;
    double u = sum + y;
    c = (u - sum) - y;
    sum = u;
  }
  return sum / std::log(tau);
}

}  // namespace detail

// geometric grid with ratio 2^{1/4} by default; the shell sums vary slowly
// in log t, so a quarter-octave grid resolves the sup/inf
inline std::vector<double> geometric_t_grid(double t_lo, double t_hi,
                                            double ratio = 1.189207115002721) {
  if (!(t_lo >= 1.0) || !(t_hi >= t_lo))
    throw std::invalid_argument("geometric_t_grid: need 1 <= t_lo <= t_hi");
  if (!(ratio > 1.0)) throw std::invalid_argument("geometric_t_grid: ratio <= 1");
  std::vector<double> g;
  for (double t = t_lo; t <= t_hi * (1.0 + 1e-12); t *= ratio) g.push_back(t);
  return g;
}

// s1-hat = 1/2 - inf_t A(t), s0-hat = 1/2 - sup_t A(t) with
// A(t) = (1/ln tau) sum_{t<|n|<=tau t} delta_n/n; the uncertainty is the
// shift observed when tau is halved on the same grid.
inline CriticalIndices s_from_deltas(const Spectrum& s, double tau,
                                     const std::vector<double>& t_grid) {
  if (!(tau >= 4.0)) throw std::invalid_argument("s_from_deltas: tau < 4");
  if (t_grid.empty()) throw std::invalid_argument("s_from_deltas: empty t grid");
  double t_lo = t_grid.front(), t_hi = t_grid.front();
  for (double t : t_grid) {
    if (!(t >= 1.0)) throw std::invalid_argument("s_from_deltas: t < 1");
    // the 1e-9 slack forgives grid accumulation dust; floor(tau*t) still
    // lands at or below N, so every delta lookup stays in range
    if (tau * t > double(s.N) * (1.0 + 1e-9))
      throw std::invalid_argument("s_from_deltas: window exceeded");
    t_lo = std::min(t_lo, t);
    t_hi = std::max(t_hi, t);
  }
  // theorem hypothesis on the imaginary parts: sum tau_n^2/n^2 stays small
  double hyp = 0.0;
  for (long n = 1; n <= s.N; ++n)
    hyp += (s.tau(n) * s.tau(n) + s.tau(-n) * s.tau(-n)) / (double(n) * double(n));
  if (!(hyp < 1e6))
    throw std::domain_error("s_from_deltas: imaginary-part hypothesis violated");

  auto scan = [&](double tt) {
    double lo = detail::delta_shell_avg(s, t_grid.front(), tt), hi = lo;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      double A = detail::delta_shell_avg(s, t_grid[i], tt);
      lo = std::min(lo, A);
      hi = std::max(hi, A);
    }
    return std::pair<double, double>(0.5 - hi, 0.5 - lo);  // (s0, s1)
  };
  auto full = scan(tau);
  auto half = scan(0.5 * tau);

  CriticalIndices ci;
  ci.s0 = full.first;
  ci.s1 = full.second;
  ci.method = CriticalMethod::delta_sum;
  ci.tau_used = tau;
  ci.t_lo = t_lo;
  ci.t_hi = t_hi;
  ci.uncertainty = std::max(std::fabs(full.first - half.first),
                            std::fabs(full.second - half.second));
  detail::validate_critical(ci, "s_from_deltas");
  return ci;
}

// b_k = (1/log 2) sum_{2^k < |j| <= 2^{k+1}} delta_j / j for k = 0..count-1,
// the per-octave shell averages feeding the block route
inline std::vector<double> blocks_from_spectrum(const Spectrum& s, long count) {
  if (count < 1) throw std::invalid_argument("blocks_from_spectrum: count < 1");
  if ((1L << count) > s.N)
    throw std::invalid_argument("blocks_from_spectrum: window exceeded");
  std::vector<double> b;
  b.reserve(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    long lo = (1L << k) + 1, hi = 1L << (k + 1);
    double sum = 0.0, c = 0.0;
    for (long n = lo; n <= hi; ++n) {
      double term = (s.delta(n) - s.delta(-n)) / double(n);
      double y = term - c;
      double u = sum + y;
      c = (u - sum) - y;
      sum = u;
    }
    b.push_back(sum / std::log(2.0));
  }
  return b;
}

struct BlockTableRow {
  long N = 0;
  double s0 = 0.0, s1 = 0.0;
};

struct BlockCritical {
  CriticalIndices ci;
  std::vector<BlockTableRow> table;  // halving window sizes, ascending
};

// s0-hat = 1/2 - (1/N) sup_n of the length-N window sums of b (s1-hat with
// the inf); b may come from blocks_from_spectrum or be synthetic, which
// covers the doubly-exponential constructions at the b-level directly.
inline BlockCritical s_from_blocks(const std::vector<double>& b, long N_window) {
  if (N_window < 1) throw std::invalid_argument("s_from_blocks: N_window < 1");
  if (N_window > static_cast<long>(b.size()) / 2)
    throw std::invalid_argument("s_from_blocks: window too short");
  for (double v : b)
    if (!std::isfinite(v))
      throw std::invalid_argument("s_from_blocks: non-finite entry");
  std::size_t len = b.size();
  std::vector<double> P(len + 1, 0.0);
  for (std::size_t i = 0; i < len; ++i) P[i + 1] = P[i] + b[i];

  auto scan = [&](long N) {
    double lo = P[static_cast<std::size_t>(N)] - P[0], hi = lo;
    for (std::size_t n = 1; n + static_cast<std::size_t>(N) <= len; ++n) {
      double sum = P[n + static_cast<std::size_t>(N)] - P[n];
      lo = std::min(lo, sum);
      hi = std::max(hi, sum);
    }
    return std::pair<double, double>(0.5 - hi / double(N), 0.5 - lo / double(N));
  };

  BlockCritical out;
  std::vector<long> sizes;
  for (long N = N_window; N >= 1 && static_cast<long>(sizes.size()) < 6; N /= 2)
    sizes.push_back(N);
  std::reverse(sizes.begin(), sizes.end());
  for (long N : sizes) {
    auto r = scan(N);
    out.table.push_back({N, r.first, r.second});
  }
  auto full = out.table.back();
  out.ci.s0 = full.s0;
  out.ci.s1 = full.s1;
  out.ci.method = CriticalMethod::block_b;
  out.ci.uncertainty = 0.0;
  if (out.table.size() >= 2) {
    const BlockTableRow& half = out.table[out.table.size() - 2];
    out.ci.uncertainty = std::max(std::fabs(full.s0 - half.s0),
                                  std::fabs(full.s1 - half.s1));
  }
  detail::validate_critical(out.ci, "s_from_blocks");
  return out;
}

// s0 = 1 - sigma_1, s1 = 1 - sigma_0 from the weight slopes; uncertainty is
// the k-table Cauchy gap floored at the 1/k_max resolution
inline CriticalIndices s_from_weights(const WeightSeq& w, long k_max) {
  SigmaIndices si = sigma_indices(w, k_max);
  CriticalIndices ci;
  ci.s0 = 1.0 - si.sigma1;
  ci.s1 = 1.0 - si.sigma0;
  ci.method = CriticalMethod::weight_slope;
  ci.t_lo = 1.0;
  ci.t_hi = std::ldexp(1.0, static_cast<int>(w.n_max));
  double gap = 0.0;
  if (k_max >= 2) {
    const SigmaRow& half = si.table[static_cast<std::size_t>(k_max / 2 - 1)];
    gap = std::max(std::fabs(si.sigma1 - half.sigma1_k),
                   std::fabs(si.sigma0 - half.sigma0_k));
  }
  ci.uncertainty = std::max(gap, 1.0 / double(k_max));
  detail::validate_critical(ci, "s_from_weights");
  return ci;
}

struct ReconcilePair {
  CriticalMethod a = CriticalMethod::delta_sum;
  CriticalMethod b = CriticalMethod::delta_sum;
  double ds0 = 0.0, ds1 = 0.0;
  double allowed = 0.0;
  bool ok = true;
};

struct ReconcileReport {
  bool pass = true;
  std::vector<ReconcilePair> pairs;
};

// pairwise agreement within the summed uncertainties plus a fixed 0.05
// cross-route slack
inline ReconcileReport reconcile(const std::vector<CriticalIndices>& rs) {
  if (rs.size() < 2)
    throw std::invalid_argument("reconcile: need at least two results");
  ReconcileReport rep;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      ReconcilePair p;
      p.a = rs[i].method;
      p.b = rs[j].method;
      p.ds0 = std::fabs(rs[i].s0 - rs[j].s0);
      p.ds1 = std::fabs(rs[i].s1 - rs[j].s1);
      p.allowed = rs[i].uncertainty + rs[j].uncertainty + 0.05;
      p.ok = p.ds0 <= p.allowed && p.ds1 <= p.allowed;
      rep.pass = rep.pass && p.ok;
      rep.pairs.push_back(p);
    }
  }
  return rep;
}

}  // namespace expbasis
