#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "expbasis/log_complex.hpp"

// Frequency sequences Lambda = (lambda_n), |n| <= N, with delta_n = Re
// lambda_n - n and tau_n = Im lambda_n. The paper's index set is all of Z;
// every consumer here treats N as a convergence parameter and reports
// truncation sensitivity.

namespace expbasis {

struct PerturbationSpec {
  enum class Kind { constant_shift, dyadic_block, custom };
  Kind kind = Kind::custom;
  double q = 0.0;
  double p = 0.0;
  std::vector<long> boundaries;  // dyadic_block only
  std::string label;
};

// A run of indices n in [lo, hi] (positive side) sharing one real shift
// delta; the negative side mirrors with -delta. Lets far product factors be
// summed analytically (see generating_function.hpp).
struct ShiftBlock {
  long lo = 0, hi = 0;
  double delta = 0.0;
};

struct Spectrum {
  long N = 0;
  std::vector<cplx> lam;  // lam[n + N] holds lambda_n
  PerturbationSpec descriptor;
  std::vector<ShiftBlock> blocks;  // empty when no block structure (custom)
  bool kadets_safe = false;        // sup|delta_n| < 1/4 and tau == 0

  cplx lambda(long n) const { return lam[static_cast<std::size_t>(n + N)]; }
  double delta(long n) const { return lambda(n).real() - double(n); }
  double tau(long n) const { return lambda(n).imag(); }

  // cached at construction; evaluation hot loops query these per point
  double sup_delta() const { return sup_delta_; }
  double sup_tau() const { return sup_tau_; }
  bool is_integer() const { return integer_; }
  bool is_real() const { return real_; }

  double sup_delta_ = 0.0;
  double sup_tau_ = 0.0;
  bool integer_ = false;
  bool real_ = false;
};

namespace detail {
inline void finalize_flags(Spectrum& s) {
  s.sup_delta_ = 0.0;
  s.sup_tau_ = 0.0;
  s.real_ = true;
  for (long n = -s.N; n <= s.N; ++n) {
    if (n != 0) s.sup_delta_ = std::max(s.sup_delta_, std::abs(s.delta(n)));
    s.sup_tau_ = std::max(s.sup_tau_, std::abs(s.tau(n)));
    if (s.tau(n) != 0.0) s.real_ = false;
    if (n != 0 && s.lambda(n) == cplx(0.0, 0.0))
      throw std::invalid_argument("spectrum: lambda_n = 0 requires n = 0");
  }
  s.integer_ = s.real_ && s.sup_delta_ == 0.0 && s.lambda(0) == cplx(0.0, 0.0);
  s.kadets_safe = s.real_ && s.sup_delta_ < 0.25;
}
}  // namespace detail

// lambda_0 = 0, lambda_n = n - (q/2) sign n. |q| < 1 keeps |delta| < 1/2;
// the Kadets-safe flag additionally requires |q| < 1/2.
inline Spectrum make_constant_shift(double q, long N) {
  if (!std::isfinite(q)) throw std::invalid_argument("make_constant_shift: q not finite");
  if (std::abs(q) >= 1.0) throw std::invalid_argument("make_constant_shift: |q| >= 1");
  if (N < 1) throw std::invalid_argument("make_constant_shift: N < 1");
  Spectrum s;
  s.N = N;
  s.lam.resize(static_cast<std::size_t>(2 * N + 1));
  for (long n = -N; n <= N; ++n) {
    double sgn = (n > 0) - (n < 0);
    s.lam[static_cast<std::size_t>(n + N)] = cplx(double(n) - 0.5 * q * sgn, 0.0);
  }
  s.descriptor.kind = PerturbationSpec::Kind::constant_shift;
  s.descriptor.q = q;
  s.descriptor.label = "constant_shift(q=" + std::to_string(q) + ")";
  s.blocks = {{1, N, -0.5 * q}};
  detail::finalize_flags(s);
  return s;
}

// delta_n = (q/2) sign n on odd-indexed blocks, (p/2) sign n on even-indexed
// ones, block k covering boundaries[k-1] < |n| <= boundaries[k]. Past the
// last boundary the alternation continues (the paper's pattern is infinite;
// the boundaries list is its desk-scale truncation).
inline Spectrum make_block(double p, double q, const std::vector<long>& boundaries,
                           long N) {
  if (!std::isfinite(p) || !std::isfinite(q))
    throw std::invalid_argument("make_block: non-finite shift");
  if (std::abs(p) >= 1.0 || std::abs(q) >= 1.0)
    throw std::invalid_argument("make_block: |p| or |q| >= 1");
  if (N < 1) throw std::invalid_argument("make_block: N < 1");
  if (boundaries.empty()) throw std::invalid_argument("make_block: no boundaries");
  if (boundaries.front() < 1)
    throw std::invalid_argument("make_block: first boundary < 1");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (boundaries[i] <= boundaries[i - 1])
      throw std::invalid_argument("make_block: boundaries not strictly increasing");

  Spectrum s;
  s.N = N;
  s.lam.resize(static_cast<std::size_t>(2 * N + 1));
  auto shift_for = [&](long an) {
    std::size_t k = 0;
    while (k < boundaries.size() && an > boundaries[k]) ++k;
    // block index is k+1 (1-based); beyond the last boundary the alternation
    // continues in doubling steps of the final boundary
    if (k == boundaries.size()) {
      long edge = 2 * boundaries.back();
      while (an > edge && edge > 0) {
        edge *= 2;
        ++k;
      }
    }
    return ((k + 1) % 2 == 1) ? 0.5 * q : 0.5 * p;
  };
  for (long n = -N; n <= N; ++n) {
    if (n == 0) {
      s.lam[static_cast<std::size_t>(N)] = 0.0;
      continue;
    }
    double sgn = (n > 0) ? 1.0 : -1.0;
    s.lam[static_cast<std::size_t>(n + N)] =
        cplx(double(n) + shift_for(std::abs(n)) * sgn, 0.0);
  }
  s.descriptor.kind = PerturbationSpec::Kind::dyadic_block;
  s.descriptor.p = p;
  s.descriptor.q = q;
  s.descriptor.boundaries = boundaries;
  s.descriptor.label = "dyadic_block";
  // block runs for the analytic tail
  long lo = 1;
  std::size_t k = 0;
  long edge = boundaries[0];
  while (lo <= N) {
    long hi = std::min(edge, N);
    s.blocks.push_back({lo, hi, shift_for(lo)});
    lo = hi + 1;
    ++k;
    edge = (k < boundaries.size()) ? boundaries[k] : edge * 2;
  }
  detail::finalize_flags(s);
  return s;
}

// Arbitrary real perturbations delta_n (odd extension NOT assumed) and
// imaginary parts tau_n, both arrays indexed n = -N..N.
inline Spectrum make_custom(const std::vector<double>& delta,
                            const std::vector<double>& tau, long N) {
  if (N < 1) throw std::invalid_argument("make_custom: N < 1");
  std::size_t m = static_cast<std::size_t>(2 * N + 1);
  if (delta.size() != m || tau.size() != m)
    throw std::invalid_argument("make_custom: arrays must have 2N+1 entries");
  Spectrum s;
  s.N = N;
  s.lam.resize(m);
  for (long n = -N; n <= N; ++n) {
    std::size_t i = static_cast<std::size_t>(n + N);
    if (!std::isfinite(delta[i]) || !std::isfinite(tau[i]))
      throw std::invalid_argument("make_custom: non-finite entry");
    s.lam[i] = cplx(double(n) + delta[i], tau[i]);
  }
  s.descriptor.kind = PerturbationSpec::Kind::custom;
  s.descriptor.label = "custom";
  detail::finalize_flags(s);
  return s;
}

struct SeparationResult {
  double value = 0.0;
  bool repeated = false;  // a repeated frequency forces value 0
};

// inf over pairs m != n of |lambda_m - lambda_n| / (1 + |lambda_m - conj
// lambda_n|). Exact over the window: a sorted sweep with a provable cutoff
// (the ratio of any pair with real gap g is >= g/(1+g+2 sup|tau|), which is
// increasing in g) reproduces the exhaustive O(M^2) scan.
inline SeparationResult separation_constant(const Spectrum& s) {
  std::vector<cplx> v = s.lam;
  std::sort(v.begin(), v.end(),
            [](cplx a, cplx b) { return a.real() < b.real(); });
  double T = s.sup_tau();
  double best = std::numeric_limits<double>::infinity();
  bool repeated = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      double g = v[j].real() - v[i].real();
      if (g / (1.0 + g + 2.0 * T) >= best) break;
      double num = std::abs(v[j] - v[i]);
      if (num == 0.0) repeated = true;
      double den = 1.0 + std::abs(v[j] - std::conj(v[i]));
      best = std::min(best, num / den);
    }
  }
  return {repeated ? 0.0 : best, repeated};
}

struct BlaschkeRow {
  double t = 0.0;
  double S = 0.0;  // sum_{n != 0} t (1+|tau_n|) / (|lambda_n|^2 + t^2)
};

struct BlaschkeReport {
  std::vector<BlaschkeRow> rows;
  double strong_sum = 0.0;  // sum_{n != 0} (1+|tau_n|) / |lambda_n|^2
  double max_S = 0.0;
};

inline BlaschkeReport blaschke_report(const Spectrum& s,
                                      const std::vector<double>& t_grid) {
  for (double t : t_grid)
    if (!(t > 0.0)) throw std::invalid_argument("blaschke_report: t must be > 0");
  BlaschkeReport rep;
  for (long n = -s.N; n <= s.N; ++n) {
    if (n == 0) continue;
    cplx l = s.lambda(n);
    rep.strong_sum += (1.0 + std::abs(l.imag())) / std::norm(l);
  }
  for (double t : t_grid) {
    double S = 0.0;
    for (long n = -s.N; n <= s.N; ++n) {
      if (n == 0) continue;
      cplx l = s.lambda(n);
      S += t * (1.0 + std::abs(l.imag())) / (std::norm(l) + t * t);
    }
    rep.rows.push_back({t, S});
    rep.max_S = std::max(rep.max_S, S);
  }
  return rep;
}

}  // namespace expbasis
