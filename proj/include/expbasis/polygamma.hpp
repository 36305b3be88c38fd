#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "expbasis/log_complex.hpp"

// Complex digamma and the Hurwitz-type tails sum_{k>=0} (w+k)^{-r}, used to
// sum the far factors of relative products analytically instead of term by
// term. Only arguments with Re w > 0 are supported; callers arrange that by
// splitting index ranges at the point closest to the evaluation argument.

namespace expbasis {

namespace detail {
// B_2, B_4, ..., B_14
inline constexpr std::array<double, 7> kBernoulli = {
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};
}  // namespace detail

// psi(w) for Re w > 0: recurrence up to |w| >= 16, then the Stirling series.
inline cplx digamma(cplx w) {
  if (w.real() <= 0.0)
    throw std::invalid_argument("digamma: Re w must be positive");
  cplx acc = 0.0;
  while (std::abs(w) < 16.0) {
    acc -= 1.0 / w;
    w += 1.0;
  }
  cplx iw2 = 1.0 / (w * w);
  cplx sum = std::log(w) - 0.5 / w;
  cplx p = iw2;
  for (std::size_t j = 0; j < detail::kBernoulli.size(); ++j) {
    sum -= detail::kBernoulli[j] / (2.0 * (j + 1)) * p;
    p *= iw2;
  }
  return acc + sum;
}

// H_r(w) = sum_{k>=0} (w+k)^{-r}, r >= 2, Re w > 0.
// Euler-Maclaurin after shifting w up to |w| >= 24:
//   H_r(w) = w^{1-r}/(r-1) + w^{-r}/2 + sum_j B_{2j}/(2j)! (r)_{2j-1} w^{-r-2j+1}
inline cplx hurwitz_tail(int r, cplx w) {
  if (r < 2 || r > 8) throw std::invalid_argument("hurwitz_tail: r out of range");
  if (w.real() <= 0.0)
    throw std::invalid_argument("hurwitz_tail: Re w must be positive");
  cplx acc = 0.0;
  while (std::abs(w) < 24.0) {
    acc += std::pow(w, -r);
    w += 1.0;
  }
  cplx iw = 1.0 / w;
  cplx wr = std::pow(w, -r);
  cplx sum = wr * w / double(r - 1) + 0.5 * wr;
  // B_{2j}/(2j)! * (r)(r+1)...(r+2j-2) * w^{-r-2j+1}
  double fact = 1.0;   // (2j)!
  double rise = 1.0;   // (r)_{2j-1}
  cplx wp = wr * iw;   // w^{-r-1}
  for (std::size_t j = 1; j <= detail::kBernoulli.size(); ++j) {
    fact *= double(2 * j - 1) * double(2 * j);
    rise *= (j == 1) ? double(r) : double(r + 2 * j - 3) * double(r + 2 * j - 2);
    sum += detail::kBernoulli[j - 1] / fact * rise * wp;
    wp *= iw * iw;
  }
  return acc + sum;
}

// sum_{k=a}^{b} (k+w)^{-r} for integer 0 < a <= b, complex w, requiring that
// k+w stays away from the negative real axis' poles: either Re(a+w) > 0.5 or
// Re(b+w) < -0.5 (then the range is flipped through (-1)^r).
inline cplx range_inverse_power_sum(int r, long a, long b, cplx w) {
  if (a > b) return 0.0;
  if ((double(a) + w.real()) > 0.5) {
    if (r == 1) return digamma(double(b) + 1.0 + w) - digamma(double(a) + w);
    return hurwitz_tail(r, double(a) + w) - hurwitz_tail(r, double(b) + 1.0 + w);
  }
  if ((double(b) + w.real()) < -0.5) {
    // sum (k+w)^{-r} = (-1)^r sum (m - w)^{-r} over m = -b .. -a
    cplx v;
    if (r == 1)
      v = digamma(double(-a) + 1.0 - w) - digamma(double(-b) - w);
    else
      v = hurwitz_tail(r, double(-b) - w) - hurwitz_tail(r, double(-a) + 1.0 - w);
    return (r % 2 == 0) ? v : -v;
  }
  throw std::invalid_argument("range_inverse_power_sum: range straddles -w");
}

}  // namespace expbasis
