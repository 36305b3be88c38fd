#include "catch_amalgamated.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "expbasis/generating_function.hpp"
#include "expbasis/polygamma.hpp"
#include "expbasis/spectrum.hpp"

using namespace expbasis;

namespace {

// log of prod_{n > Np} (1 - z^2/n^2), the exact gap between the plain
// truncated product and the sine-relative one; converges brutally fast
// since |z|^2/Np^2 is tiny
cplx truncation_gap(cplx z, long Np) {
  cplx z2 = z * z;
  cplx total = 0.0;
  cplx p = 1.0;
  for (int r = 1; r <= 4; ++r) {
    p *= z2;
    total -= p / double(r) * hurwitz_tail(2 * r, cplx(double(Np) + 1.0, 0.0));
  }
  return total;
}

double phase_gap(double a, double b) { return std::abs(wrap_phase(a - b)); }

}  // namespace

TEST_CASE("closed form sine mode reproduces sin(pi z)/pi") {
  Spectrum s = make_constant_shift(0.0, 64);
  GeneratingFunction g = make_genfun(s, FMode::closed_form_sine, 64);

  LogComplex half = eval_F(g, cplx(0.5, 0.0));
  REQUIRE(std::abs(half.log_mag + std::log(kPi)) < 1e-14);
  REQUIRE(std::abs(half.phase) < 1e-14);

  // |sin(10 pi i)| = sinh(10 pi)
  LogComplex ten_i = eval_F(g, cplx(0.0, 10.0));
  double want = 10.0 * kPi - std::log(2.0) + std::log1p(-std::exp(-20.0 * kPi)) -
                std::log(kPi);
  REQUIRE(std::abs(ten_i.log_mag - want) < 1e-12);
  REQUIRE(std::abs(ten_i.phase - kPi / 2.0) < 1e-12);

  REQUIRE(eval_F(g, cplx(3.0, 0.0)).is_zero());
  REQUIRE(eval_F(g, cplx(0.0, 0.0)).is_zero());

  // sin(-2.5 pi) = -1
  LogComplex neg = eval_F(g, cplx(-2.5, 0.0));
  REQUIRE(std::abs(neg.log_mag + std::log(kPi)) < 1e-14);
  REQUIRE(std::abs(neg.phase - kPi) < 1e-14);
}

TEST_CASE("sine_relative on the integer spectrum equals the closed form") {
  Spectrum s = make_constant_shift(0.0, 4096);
  GeneratingFunction rel = make_genfun(s, FMode::sine_relative, 4096);
  GeneratingFunction cf = make_genfun(s, FMode::closed_form_sine, 4096);

  std::vector<cplx> grid = {{0.5, 0.0},  {2.25, 0.0}, {-7.7, 0.0}, {0.0, 3.0},
                            {5.5, 2.5},  {-3.3, -8.0}, {600.25, 0.0}, {0.0, -40.0}};
  for (cplx z : grid) {
    LogComplex a = eval_F(rel, z);
    LogComplex b = eval_F(cf, z);
    REQUIRE(std::abs(a.log_mag - b.log_mag) < 1e-11);
    REQUIRE(phase_gap(a.phase, b.phase) < 1e-11);
  }
  // integer z: both are exact zeros
  REQUIRE(eval_F(rel, cplx(17.0, 0.0)).is_zero());
  REQUIRE(eval_F(rel, cplx(-2048.0, 0.0)).is_zero());
}

TEST_CASE("raw product and sine_relative agree after the known tail factor") {
  // the plain product truncated at Np differs from the sine-relative value
  // by exactly prod_{n>Np}(1 - z^2/n^2); with that factor put back the two
  // modes must agree to 1e-8, for shifts across the Kadets range
  long Np = 100000;
  std::vector<double> qs = {0.4, 0.2, -0.4};
  std::vector<cplx> grid = {{0.3, 0.0},   {2.5, 1.5},  {10.0, 0.5},
                            {17.0, -3.0}, {31.5, 0.0}, {0.0, 32.0},
                            {0.5, -32.0}, {-24.5, 6.0}};
  for (double q : qs) {
    Spectrum s = make_constant_shift(q, 200000);
    GeneratingFunction raw = make_genfun(s, FMode::raw_symmetric_product, Np);
    GeneratingFunction rel = make_genfun(s, FMode::sine_relative, Np);
    for (cplx z : grid) {
      LogComplex a = eval_F(raw, z);
      LogComplex b = eval_F(rel, z);
      cplx gap = truncation_gap(z, Np);
      double scale = std::max(1.0, std::abs(b.log_mag));
      REQUIRE(std::abs(a.log_mag + gap.real() - b.log_mag) < 1e-8 * scale);
      REQUIRE(phase_gap(a.phase + gap.imag(), b.phase) < 1e-8);
    }
  }
  // and the factor genuinely matters at |z| ~ 32: without it the modes
  // disagree at the 1e-2 scale predicted by the |z|^2/N_prod error term
  Spectrum s = make_constant_shift(0.2, 200000);
  GeneratingFunction raw = make_genfun(s, FMode::raw_symmetric_product, Np);
  GeneratingFunction rel = make_genfun(s, FMode::sine_relative, Np);
  cplx z(31.5, 0.0);
  double diff = std::abs(eval_F(raw, z).log_mag - eval_F(rel, z).log_mag);
  REQUIRE(diff > 1e-3);
}

TEST_CASE("constant shift against the gamma-function closed form") {
  // for lambda_n = n - 0.1 sign n the infinite product is
  // z Gamma(0.9)^2 / (Gamma(0.9+z) Gamma(0.9-z)); reference values from
  // 50-digit arithmetic
  Spectrum s = make_constant_shift(0.2, 200000);
  GeneratingFunction g = make_genfun(s, FMode::sine_relative, 100000);

  struct Probe { double x; double want; };
  std::vector<Probe> probes = {
      {0.5, -1.2374596046198718},
      {3.4, -0.76824941877789344},
      {10.4, -0.54372706220277068},
      {25.6, -0.5754125985843121},
  };
  for (const Probe& p : probes) {
    LogComplex v = eval_F(g, cplx(p.x, 0.0));
    REQUIRE(std::abs(v.log_mag - p.want) < 1e-8);
  }

  LogComplex ti = eval_F(g, cplx(0.0, 10.0));
  REQUIRE(std::abs(ti.log_mag - 30.171439120704417) < 1e-8);
  REQUIRE(std::abs(ti.phase - 1.5707963267948966) < 1e-8);

  // evenness of the magnitude, up to the order of chunked rounding
  for (double x : {0.7, 10.4, 31.2}) {
    LogComplex a = eval_F(g, cplx(x, 0.0));
    LogComplex b = eval_F(g, cplx(-x, 0.0));
    REQUIRE(std::abs(a.log_mag - b.log_mag) < 1e-13);
  }

  // very large imaginary argument stays finite in log form
  LogComplex big = eval_F(g, cplx(0.0, 100.0));
  REQUIRE(std::isfinite(big.log_mag));
  REQUIRE(std::abs(big.log_mag - 100.0 * kPi) < 3.0);
}

TEST_CASE("conjugation symmetry for real spectra") {
  Spectrum shift = make_constant_shift(0.2, 200000);
  Spectrum block = make_block(0.1, 0.3, {16, 256, 4096}, 100000);
  std::vector<GeneratingFunction> gs = {
      make_genfun(shift, FMode::sine_relative, 100000),
      make_genfun(block, FMode::sine_relative, 100000)};
  std::vector<cplx> grid = {{0.3, 0.7}, {2.7, 3.0}, {15.5, 9.0}, {400.2, 1.0}};
  for (const GeneratingFunction& g : gs)
    for (cplx z : grid) {
      LogComplex a = eval_F(g, z);
      LogComplex b = eval_F(g, std::conj(z));
      double scale = std::max(1.0, std::abs(a.log_mag));
      REQUIRE(std::abs(a.log_mag - b.log_mag) < 1e-12 * scale);
      REQUIRE(std::abs(wrap_phase(a.phase + b.phase)) < 1e-12);
    }
}

TEST_CASE("integer z with a shifted spectrum uses the limit form") {
  // z = 7 is legal: lambda_7 = 6.8 != 7, the sine zero cancels against the
  // relative factor's pole; cross-check against the raw product which has
  // no singularity there at all
  Spectrum s = make_constant_shift(0.2, 200000);
  long Np = 100000;
  GeneratingFunction rel = make_genfun(s, FMode::sine_relative, Np);
  GeneratingFunction raw = make_genfun(s, FMode::raw_symmetric_product, Np);
  for (double m : {7.0, -12.0, 1.0, 80.0}) {
    cplx z(m, 0.0);
    LogComplex a = eval_F(raw, z);
    LogComplex b = eval_F(rel, z);
    cplx gap = truncation_gap(z, Np);
    REQUIRE(std::abs(a.log_mag + gap.real() - b.log_mag) < 1e-8);
    REQUIRE(phase_gap(a.phase + gap.imag(), b.phase) < 1e-8);
  }
  // a zero of the product is an exact zero
  REQUIRE(eval_F(rel, s.lambda(3)).is_zero());
  REQUIRE(eval_F(raw, s.lambda(3)).is_zero());
  // beyond N_prod the sine zero has no partner factor left to cancel it
  REQUIRE_THROWS_AS(eval_F(rel, cplx(100001.0, 0.0)), std::domain_error);
}

TEST_CASE("carrier function on the integer spectrum") {
  Spectrum s = make_constant_shift(0.0, 4096);
  GeneratingFunction g = make_genfun(s, FMode::sine_relative, 4096);

  // d(10i, Z) = 10, so log Phi = log(sinh(10 pi)/pi) - log 10
  LogComplex p10 = eval_Phi_it(g, 10.0);
  double want = 10.0 * kPi - std::log(2.0) + std::log1p(-std::exp(-20.0 * kPi)) -
                std::log(kPi) - std::log(10.0);
  REQUIRE(std::abs(p10.log_mag - want) < 1e-10);

  // t -> 0+: Phi -> |F'(0)| = 1
  LogComplex tiny = eval_Phi_it(g, 1e-4);
  REQUIRE(std::abs(tiny.log_mag) < 1e-6);

  REQUIRE_THROWS_AS(eval_Phi_it(g, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(eval_Phi_it(g, 3000.0), std::invalid_argument);
}

TEST_CASE("carrier plus-minus ratio stays bounded") {
  // real symmetric spectra give the ratio exactly 1
  Spectrum s = make_constant_shift(0.2, 2048);
  GeneratingFunction g = make_genfun(s, FMode::sine_relative, 2048);
  for (double t : {4.0, 10.0, 64.0}) {
    double up = eval_Phi_it(g, t).log_mag;
    double dn = eval_Phi_it(g, -t).log_mag;
    REQUIRE(std::abs(up - dn) < 1e-9);
  }

  // a complex perturbation breaks the symmetry but the ratio must stay
  // inside [1/B, B] with B well under 10
  long N = 256;
  std::vector<double> delta(2 * N + 1, 0.0), tau(2 * N + 1, 0.0);
  for (long n = -N; n <= N; ++n) {
    if (n == 0) continue;
    delta[n + N] = 0.1 * ((n % 3 == 0) ? -1.0 : 1.0);
    tau[n + N] = 0.2 * ((n % 2 == 0) ? 1.0 : -1.0);
  }
  Spectrum c = make_custom(delta, tau, N);
  GeneratingFunction gc = make_genfun(c, FMode::sine_relative, N);
  for (double t : {4.0, 8.0, 16.0, 32.0, 64.0}) {
    double r = std::exp(eval_Phi_it(gc, -t).log_mag - eval_Phi_it(gc, t).log_mag);
    REQUIRE(r > 0.1);
    REQUIRE(r < 10.0);
  }
}

TEST_CASE("carrier at an exact spectral point differentiates the product") {
  // put lambda_0 = 2i so that it lands exactly on the spectrum at t = 2
  long N = 128;
  std::vector<double> delta(2 * N + 1, 0.0), tau(2 * N + 1, 0.0);
  tau[N] = 2.0;
  Spectrum s = make_custom(delta, tau, N);
  GeneratingFunction g = make_genfun(s, FMode::sine_relative, N);
  LogComplex phi = eval_Phi_it(g, 2.0);
  // independent coarse derivative from plain central differences
  cplx w(0.0, 2.0);
  double h = 1e-5;
  LogComplex fp = eval_F(g, w + cplx(h, 0.0));
  LogComplex fm = eval_F(g, w - cplx(h, 0.0));
  cplx d = (std::polar(std::exp(fp.log_mag), fp.phase) -
            std::polar(std::exp(fm.log_mag), fm.phase)) /
           (2.0 * h);
  REQUIRE(std::abs(phi.log_mag - std::log(std::abs(d))) < 1e-6);
}

TEST_CASE("doubling N_prod moves log|F(it)| less than the tail bound") {
  Spectrum s = make_constant_shift(0.3, 4096);
  GeneratingFunction raw1 = make_genfun(s, FMode::raw_symmetric_product, 1000);
  GeneratingFunction raw2 = make_genfun(s, FMode::raw_symmetric_product, 2000);
  GeneratingFunction rel1 = make_genfun(s, FMode::sine_relative, 1000);
  GeneratingFunction rel2 = make_genfun(s, FMode::sine_relative, 2000);
  double sum_inv_sq =
      2.0 * hurwitz_tail(2, cplx(1001.0, 0.0)).real();
  for (double t : {4.0, 16.0}) {
    double bound = t * s.sup_delta() * sum_inv_sq + 4.0 * t * t / 1000.0;
    cplx it(0.0, t);
    REQUIRE(std::abs(eval_F(raw2, it).log_mag - eval_F(raw1, it).log_mag) < bound);
    REQUIRE(std::abs(eval_F(rel2, it).log_mag - eval_F(rel1, it).log_mag) < bound);
  }
}

TEST_CASE("tail exponent fits") {
  Spectrum ints = make_constant_shift(0.0, 8192);
  GeneratingFunction gi = make_genfun(ints, FMode::closed_form_sine, 8192);
  TailFit fi = tail_exponent(gi, 1.0, 8.0, 8000.0);
  REQUIRE(std::abs(fi.a) < 0.01);
  REQUIRE(std::abs(fi.s_est - 0.5) < 0.01);
  REQUIRE_FALSE(fi.flagged);

  Spectrum shift = make_constant_shift(0.2, 200000);
  GeneratingFunction gs = make_genfun(shift, FMode::sine_relative, 100000);
  TailFit fs = tail_exponent(gs, 1.0, 10.0, 10000.0);
  REQUIRE(std::abs(fs.a - 0.2) < 0.02);
  REQUIRE(std::abs(fs.s_est - 0.7) < 0.02);
  REQUIRE_FALSE(fs.flagged);

  // two long runs with different shifts: no single power law fits
  Spectrum block = make_block(0.1, 0.3, {64, 16384}, 100000);
  GeneratingFunction gb = make_genfun(block, FMode::sine_relative, 100000);
  TailFit fb = tail_exponent(gb, 1.0, 4.0, 4096.0);
  REQUIRE(fb.flagged);

  REQUIRE_THROWS_AS(tail_exponent(gi, 0.0, 8.0, 8000.0), std::invalid_argument);
  REQUIRE_THROWS_AS(tail_exponent(gi, 1.0, 8.0, 800.0), std::invalid_argument);
}

TEST_CASE("inequality report on the integer spectrum") {
  Spectrum s = make_constant_shift(0.0, 8192);
  GeneratingFunction g = make_genfun(s, FMode::closed_form_sine, 8192);
  std::vector<PhiRow> rows = phi_inequality_report(g, {4.0, 8.0});
  REQUIRE(rows.size() == 2);
  for (const PhiRow& r : rows) {
    // lambda_0 = 0 and d = t make the first bound an equality
    REQUIRE(std::abs(r.ratio_ii - 1.0) < 1e-9);
    REQUIRE(std::abs(r.ratio_iii_max - r.ratio_ii) < 1e-9);
    REQUIRE(r.ratio_itest < 1.0);
    // closed-form prediction sqrt((1 - e^{-2 pi t})/2) for both integral bounds
    double want = std::sqrt(0.5 * (1.0 - std::exp(-2.0 * kPi * r.t)));
    REQUIRE(std::abs(r.ratio_itest - want) < 2e-3);
    REQUIRE(std::abs(r.ratio_iv - want) < 2e-3);
    REQUIRE(r.integral_ok);
  }
}

TEST_CASE("inequality report on the shifted spectrum") {
  Spectrum s = make_constant_shift(0.2, 200000);
  GeneratingFunction g = make_genfun(s, FMode::sine_relative, 100000);
  // X = 64t keeps the quadrature tail under the 10% reliability gate for
  // a spectrum whose integrand only decays like x^{-1.6}
  std::vector<PhiRow> rows = phi_inequality_report(g, {4.0, 8.0, 16.0}, 64.0);
  for (const PhiRow& r : rows) {
    REQUIRE(r.ratio_ii <= 1.0 + 1e-3);
    REQUIRE(r.ratio_iii_max <= 1.0 + 1e-3);
    REQUIRE(r.ratio_iv <= 1.0 + 1e-3);
    REQUIRE(r.ratio_itest <= 1.0 + 1e-3);
    REQUIRE(r.integral_ok);
  }
}
