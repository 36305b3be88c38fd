#include "catch_amalgamated.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "expbasis/subcouple.hpp"

using namespace expbasis;

namespace {

// w_n = 2^{sigma n} for n >= 0; the constant extension below the window is
// w_0 = 1, which matches the piecewise definition used throughout.
WeightSeq slope_weight(double sigma, long n_max) {
  WeightSeq w;
  w.n_max = n_max;
  w.w.resize(static_cast<std::size_t>(n_max + 1));
  for (long n = 0; n <= n_max; ++n)
    w.w[static_cast<std::size_t>(n)] = std::exp2(sigma * double(n));
  return w;
}

WeightSeq const_weight(double value, long n_max) {
  WeightSeq w;
  w.n_max = n_max;
  w.w.assign(static_cast<std::size_t>(n_max + 1), value);
  return w;
}

// log2 w climbs with slope s_even on blocks [2^j, 2^{j+1}) with even j and
// s_odd on odd ones; the step leaving n uses the block containing n.
WeightSeq two_slope_weight(double s_even, double s_odd, long n_max) {
  WeightSeq w;
  w.n_max = n_max;
  w.w.resize(static_cast<std::size_t>(n_max + 1));
  double lw = 0.0;
  w.w[0] = 1.0;
  for (long n = 0; n < n_max; ++n) {
    long m = std::max<long>(n, 1);
    int j = 0;
    while ((m >> (j + 1)) > 0) ++j;  // 2^j <= m < 2^{j+1}
    lw += (j % 2 == 0) ? s_even : s_odd;
    w.w[static_cast<std::size_t>(n + 1)] = std::exp2(lw);
  }
  return w;
}

}  // namespace

TEST_CASE("sigma indices on exact geometric and flat weights") {
  // slope 0.5: every admissible window with n >= 0 has slope exactly 1/2,
  // crossing windows are flatter, so both indices land on 1/2
  SigmaIndices si = sigma_indices(slope_weight(0.5, 128), 32);
  REQUIRE(std::fabs(si.sigma0 - 0.5) < 1e-12);
  REQUIRE(std::fabs(si.sigma1 - 0.5) < 1e-12);
  REQUIRE(si.table.size() == 32);
  REQUIRE(si.table.back().k == 32);
  for (const SigmaRow& row : si.table) {
    REQUIRE(std::fabs(row.sigma0_k - 0.5) < 1e-12);
    REQUIRE(std::fabs(row.sigma1_k - 0.5) < 1e-12);
  }

  SigmaIndices flat = sigma_indices(const_weight(3.25, 64), 16);
  REQUIRE(flat.sigma0 == 0.0);
  REQUIRE(flat.sigma1 == 0.0);

  // resolution property: exact geometric slopes are recovered within 1/k_max
  for (double sigma : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    SigmaIndices g = sigma_indices(slope_weight(sigma, 96), 24);
    REQUIRE(std::fabs(g.sigma0 - sigma) < 1.0 / 24.0);
    REQUIRE(std::fabs(g.sigma1 - sigma) < 1.0 / 24.0);
  }

  REQUIRE_THROWS_AS(sigma_indices(const_weight(1.0, 8), 16), std::invalid_argument);
  REQUIRE_THROWS_AS(sigma_indices(const_weight(1.0, 8), 0), std::invalid_argument);
}

TEST_CASE("sigma indices on the two-slope weight") {
  // n_max stays below ~2500 so the raw weights stay inside double range
  // (log2 w climbs at 0.4 per step on average)
  WeightSeq w = two_slope_weight(0.2, 0.6, 2048);
  SigmaIndices si = sigma_indices(w, 32);
  // long blocks of both slopes exist, so the indices sit essentially on the
  // two slopes; every window average is trapped between them
  REQUIRE(si.sigma0 >= 0.2 - 1e-9);
  REQUIRE(si.sigma0 < 0.22);
  REQUIRE(si.sigma1 <= 0.6 + 1e-9);
  REQUIRE(si.sigma1 > 0.58);
  for (const SigmaRow& row : si.table) {
    REQUIRE(row.sigma0_k >= 0.2 - 1e-9);
    REQUIRE(row.sigma1_k <= 0.6 + 1e-9);
    REQUIRE(row.sigma0_k <= row.sigma1_k);
  }
}

TEST_CASE("apply_T matches the defining recurrence") {
  // zeta_0 at theta = 1 (raw recurrence, theta outside the operator gate)
  ApplyResult r = apply_T(1.0, zeta(0), 32);
  REQUIRE(r.out.size() == 2);
  REQUIRE(r.out.at(0) == std::complex<double>(-2.0, 0.0));
  REQUIRE(r.out.at(1) == std::complex<double>(1.0, 0.0));
  REQUIRE(!r.clipped);

  for (double theta : {0.3, 0.8}) {
    for (long k : {-5L, 0L, 7L}) {
      ApplyResult t = apply_T(theta, zeta(k), 32);
      REQUIRE(t.out.at(k) == std::complex<double>(-std::exp2(theta), 0.0));
      REQUIRE(t.out.at(k + 1) == std::complex<double>(1.0, 0.0));
    }
  }

  // linearity on a random pair
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  CoefSeq a, b;
  for (int i = 0; i < 14; ++i) {
    a[long(rng() % 21) - 10] = {U(rng), U(rng)};
    b[long(rng() % 21) - 10] = {U(rng), U(rng)};
  }
  std::complex<double> c1(0.3, -1.2), c2(-2.5, 0.7);
  CoefSeq combo;
  for (const auto& [n, v] : a) combo[n] += c1 * v;
  for (const auto& [n, v] : b) combo[n] += c2 * v;
  CoefSeq lhs = apply_T(0.6, combo, 16).out;
  CoefSeq rhs;
  for (const auto& [n, v] : apply_T(0.6, a, 16).out) rhs[n] += c1 * v;
  for (const auto& [n, v] : apply_T(0.6, b, 16).out) rhs[n] += c2 * v;
  for (const auto& [n, v] : lhs) REQUIRE(std::abs(v - rhs[n]) < 1e-14);
  for (const auto& [n, v] : rhs) REQUIRE(std::abs(v - lhs[n]) < 1e-14);

  // clipping at the window edge is reported and the spilled entry dropped
  ApplyResult clip = apply_T(0.5, zeta(8), 8);
  REQUIRE(clip.clipped);
  REQUIRE(clip.out.size() == 1);
  REQUIRE(clip.out.count(8) == 1);

  REQUIRE_THROWS_AS(apply_T(0.5, zeta(9), 8), std::invalid_argument);
}

TEST_CASE("f_theta annihilates the range of T_theta") {
  REQUIRE(f_theta(0.37, zeta(0)) == std::complex<double>(1.0, 0.0));

  CoefSeq pm;
  pm[2] = 1.0;
  pm[-2] = 1.0;
  REQUIRE(std::abs(f_theta(0.5, pm) - std::complex<double>(2.5, 0.0)) < 1e-15);

  for (double theta : {0.3, 0.5, 0.9}) {
    for (long k : {-8L, 0L, 5L, 20L}) {
      CoefSeq Tz = apply_T(theta, zeta(k), 64).out;
      double scale = std::exp2(double(k + 1) * theta);
      REQUIRE(std::abs(f_theta(theta, Tz)) <= 1e-12 * std::max(1.0, scale));
    }
  }

  // random finitely supported vectors, compensated telescoping
  std::mt19937 rng(11u);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    CoefSeq x;
    for (int i = 0; i < 40; ++i) x[long(rng() % 61) - 30] = {U(rng), U(rng)};
    double theta = 0.2 + 0.15 * trial;
    CoefSeq Tx = apply_T(theta, x, 64).out;
    double scale = 0.0;
    for (const auto& [n, v] : Tx) scale += std::exp2(double(n) * theta) * std::abs(v);
    REQUIRE(std::abs(f_theta(theta, Tx)) <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("Neumann inverse: closed form, residual, and refusal gate") {
  // flat weight at theta = 1/2: alpha_n = -2^{-(n+1)/2}, a pure geometric tail
  ThetaOperator flat = make_theta_operator(0.5, const_weight(1.0, 128), 128);
  NeumannResult nr = neumann_inverse(flat, zeta(0), 1e-9);
  REQUIRE(nr.residual < 1e-8);
  REQUIRE(nr.terms >= 50);
  REQUIRE(nr.terms <= 70);
  for (long n = 0; n < nr.terms; ++n) {
    double want = -std::exp2(-0.5 * double(n + 1));
    REQUIRE(std::fabs(nr.alpha.at(n).real() - want) <= 1e-15 * std::fabs(want));
    REQUIRE(nr.alpha.at(n).imag() == 0.0);
  }

  // slope-0.5 weight at theta = 0.75: admissible, small residual
  ThetaOperator op = make_theta_operator(0.75, slope_weight(0.5, 256), 256);
  NeumannResult sr = neumann_inverse(op, zeta(0), 1e-9);
  REQUIRE(sr.residual < 1e-8);

  // theta at or below sigma_1 + margin is refused
  REQUIRE_THROWS_AS(neumann_inverse(
                        make_theta_operator(0.4, slope_weight(0.5, 64), 64),
                        zeta(0), 1e-9),
                    std::domain_error);
  REQUIRE_THROWS_AS(neumann_inverse(
                        make_theta_operator(0.54, slope_weight(0.5, 64), 64),
                        zeta(0), 1e-9),
                    std::domain_error);

  // window too small to reach the tolerance
  REQUIRE_THROWS_AS(neumann_inverse(
                        make_theta_operator(0.5, const_weight(1.0, 16), 16),
                        zeta(0), 1e-9),
                    std::runtime_error);
}

TEST_CASE("finite sections of the flat-weight operator approach the symbol distance") {
  ThetaOperator op = make_theta_operator(0.5, const_weight(1.0, 64), 64);
  std::vector<LsvRow> rows = finite_section_lsv(op, {8, 16, 32, 64});
  double limit = std::sqrt(2.0) - 1.0;
  for (const LsvRow& r : rows) {
    REQUIRE(r.lsv >= limit - 1e-10);
    REQUIRE(r.lsv < 0.46);
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    REQUIRE(rows[i].lsv < rows[i - 1].lsv);
  REQUIRE(rows.back().lsv < limit + 1e-3);

  // brute-force SVD cross-check of the bisection at N = 64
  long N = 64;
  long m = 2 * N + 1;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  double a = std::exp2(op.theta);
  for (long i = 0; i < m; ++i) {
    B(i, i) = -a;
    if (i + 1 < m) B(i + 1, i) = op.w.at(i + 1 - N) / op.w.at(i - N);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  double brute = svd.singularValues().minCoeff();
  REQUIRE(std::fabs(brute - rows.back().lsv) < 1e-9);

  REQUIRE_THROWS_AS(finite_section_lsv(op, {65}), std::invalid_argument);
}

TEST_CASE("finite sections decay at the critical theta and stabilize off it") {
  WeightSeq w = slope_weight(0.5, 1024);

  // theta equal to the common slope: range not closed, sections collapse
  ThetaOperator crit = make_theta_operator(0.5, w, 1024);
  std::vector<LsvRow> c = finite_section_lsv(crit, {64, 1024});
  REQUIRE(c[1].lsv < 0.5 * c[0].lsv);

  // theta above sigma_1: invertible, sections settle
  ThetaOperator inv = make_theta_operator(0.75, w, 1024);
  std::vector<LsvRow> s = finite_section_lsv(inv, {256, 1024});
  REQUIRE(std::fabs(s[1].lsv / s[0].lsv - 1.0) < 0.1);
}

TEST_CASE("classify decides the trichotomy from the sigma comparison") {
  WeightSeq w = slope_weight(0.5, 512);

  SubcoupleClassification lo = classify(0.25, w);
  REQUIRE(lo.verdict == Verdict::CodimOneClosed);
  REQUIRE(!lo.uncertain);
  REQUIRE(lo.annihilation_ok);
  REQUIRE(lo.lsv.size() == 2);

  SubcoupleClassification hi = classify(0.75, w);
  REQUIRE(hi.verdict == Verdict::Invertible);
  REQUIRE(!hi.uncertain);

  // geometric weight at sigma = 0.45: the {sigma-0.2, sigma, sigma+0.2}
  // triple walks through the whole trichotomy, the middle one flagged
  WeightSeq g = slope_weight(0.45, 512);
  REQUIRE(classify(0.25, g).verdict == Verdict::CodimOneClosed);
  SubcoupleClassification mid = classify(0.45, g);
  REQUIRE(mid.verdict == Verdict::NotClosed);
  REQUIRE(mid.uncertain);
  REQUIRE(classify(0.65, g).verdict == Verdict::Invertible);

  WeightSeq two = two_slope_weight(0.2, 0.6, 2048);
  SubcoupleClassification ts = classify(0.4, two);
  REQUIRE(ts.verdict == Verdict::NotClosed);
  REQUIRE(!ts.uncertain);
  REQUIRE(classify(0.7, two).verdict == Verdict::Invertible);
  SubcoupleClassification cc = classify(0.1, two);
  REQUIRE(cc.verdict == Verdict::CodimOneClosed);
  REQUIRE(cc.annihilation_ok);

  REQUIRE(std::string(verdict_name(ts.verdict)) == "NotClosed");
  REQUIRE_THROWS_AS(classify(1.0, w), std::invalid_argument);
  REQUIRE_THROWS_AS(classify(0.0, w), std::invalid_argument);
}
