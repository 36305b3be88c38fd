#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "expbasis/generating_function.hpp"
#include "expbasis/parallel.hpp"
#include "expbasis/quadrature.hpp"

// A2 diagnostics for the line weights |F(x+iy)|^2 / (1 + |x|^{2s}). The
// interval family is dyadic lengths crossed with a geometric center grid; it
// resolves boundedness versus growth of avg(u) avg(1/u), not sharp constants.
// All sampling runs in the log domain so enormous dynamic range cannot
// overflow, and panels whose probed spread of log u exceeds 60 nats are
// bisected down to a 1/64 refinement floor.

namespace expbasis {

using LogWeight = std::function<double(double)>;

struct A2Report {
  double s = std::numeric_limits<double>::quiet_NaN();
  double y = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> lengths;            // ascending dyadic lengths
  std::vector<double> centers;            // center grid offered to every scale
  std::vector<double> constant_by_scale;  // sup over centers, one per length
  double overall = 1.0;
};

namespace detail {

// streaming log-sum-exp; contributions arrive as log(weight) + log(sample)
struct LogSum {
  double m = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  void add(double lg) {
    if (std::isinf(lg) && lg < 0.0) return;  // vanishing contribution
    if (lg <= m) {
      acc += std::exp(lg - m);
      return;
    }
    acc = acc * std::exp(m - lg) + 1.0;
    m = lg;
  }
  double value() const {
    if (std::isinf(m)) return m;
    return m + std::log(acc);
  }
};

inline void panel_accumulate(const LogWeight& lu, double a, double b, int nodes,
                             int depth, LogSum& up, LogSum& dn) {
  double p[5] = {lu(a), lu(0.75 * a + 0.25 * b), lu(0.5 * (a + b)),
                 lu(0.25 * a + 0.75 * b), lu(b)};
  double lo = p[0], hi = p[0];
  for (double v : p) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi - lo <= 60.0) && (b - a) > 1.0 / 64.0 && depth < 40) {
    double mid = 0.5 * (a + b);
    panel_accumulate(lu, a, mid, nodes, depth + 1, up, dn);
    panel_accumulate(lu, mid, b, nodes, depth + 1, up, dn);
    return;
  }
  const GLRule& r = gauss_legendre(nodes);
  double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < nodes; ++i) {
    double g = lu(mid + half * r.x[i]);
    double lw = std::log(half * r.w[i]);
    up.add(lw + g);
    dn.add(lw - g);
  }
}

// returns {log avg(u), log avg(1/u)} over [A, B]
inline std::pair<double, double> interval_avgs(const LogWeight& lu, double A,
                                               double B, int nodes) {
  double L = B - A;
  long K0 = static_cast<long>(std::min(64.0, std::max(1.0, std::ceil(L))));
  LogSum up, dn;
  for (long k = 0; k < K0; ++k) {
    double a = A + L * static_cast<double>(k) / static_cast<double>(K0);
    double b = A + L * static_cast<double>(k + 1) / static_cast<double>(K0);
    panel_accumulate(lu, a, b, nodes, 0, up, dn);
  }
  double lL = std::log(L);
  return {up.value() - lL, dn.value() - lL};
}

// centers thinned per scale: accepted in order of increasing |c|, skipping
// anything closer than L/4 to an already accepted center
inline std::vector<double> thin_centers(std::vector<double> c, double L) {
  std::sort(c.begin(), c.end(), [](double a, double b) {
    double aa = std::fabs(a), ab = std::fabs(b);
    if (aa != ab) return aa < ab;
    return a < b;
  });
  std::vector<double> out;
  for (double v : c) {
    bool close = false;
    for (double u : out)
      if (std::fabs(v - u) < 0.25 * L) {
        close = true;
        break;
      }
    if (!close) out.push_back(v);
  }
  return out;
}

}  // namespace detail

inline A2Report a2_constant(const LogWeight& log_u,
                            const std::vector<double>& lengths,
                            const std::vector<double>& centers, int quad_nodes,
                            int threads = 1) {
  if (quad_nodes < 16)
    throw std::invalid_argument("a2_constant: quad_nodes must be at least 16");
  if (quad_nodes > 4096)
    throw std::invalid_argument("a2_constant: quad_nodes too large");
  if (lengths.empty()) throw std::invalid_argument("a2_constant: no lengths");
  if (centers.empty()) throw std::invalid_argument("a2_constant: no centers");
  for (double L : lengths)
    if (!(L > 0.0) || !std::isfinite(L))
      throw std::invalid_argument("a2_constant: lengths must be positive");
  for (double c : centers)
    if (!std::isfinite(c))
      throw std::invalid_argument("a2_constant: centers must be finite");

  A2Report rep;
  rep.lengths = lengths;
  std::sort(rep.lengths.begin(), rep.lengths.end());
  rep.centers = centers;

  struct Item {
    std::size_t scale;
    double a, b;
  };
  std::vector<Item> items;
  for (std::size_t s = 0; s < rep.lengths.size(); ++s) {
    double L = rep.lengths[s];
    for (double c : detail::thin_centers(centers, L))
      items.push_back({s, c - 0.5 * L, c + 0.5 * L});
  }

  std::vector<double> plog(items.size());
  parallel_for_n(static_cast<long>(items.size()), threads, [&](long i) {
    const Item& it = items[static_cast<std::size_t>(i)];
    auto [au, ai] = detail::interval_avgs(log_u, it.a, it.b, quad_nodes);
    plog[static_cast<std::size_t>(i)] = au + ai;
  });

  rep.constant_by_scale.assign(rep.lengths.size(),
                               -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (plog[i] < -1e-9)
      throw std::runtime_error(
          "a2_constant: interval average product fell below 1");
    rep.constant_by_scale[items[i].scale] =
        std::max(rep.constant_by_scale[items[i].scale], plog[i]);
  }
  rep.overall = 1.0;
  for (double& v : rep.constant_by_scale) {
    v = std::exp(v);
    rep.overall = std::max(rep.overall, v);
  }
  return rep;
}

struct DyadicFamily {
  int j_min = -3;
  int j_max = 14;
  double X_max = 16384.0;
  int quad_nodes = 16;
};

inline std::vector<double> family_lengths(const DyadicFamily& f) {
  if (f.j_min > f.j_max)
    throw std::invalid_argument("family_lengths: j_min > j_max");
  std::vector<double> out;
  for (int j = f.j_min; j <= f.j_max; ++j) out.push_back(std::ldexp(1.0, j));
  return out;
}

inline std::vector<double> family_centers(const DyadicFamily& f) {
  if (!(f.X_max >= 1.0))
    throw std::invalid_argument("family_centers: X_max must be at least 1");
  std::vector<double> out{0.0};
  for (double x = 1.0; x <= f.X_max * (1.0 + 1e-12); x *= 2.0) {
    out.push_back(x);
    out.push_back(-x);
  }
  return out;
}

struct SweepRow {
  double s = 0.0;
  A2Report report;
  double growth = 1.0;  // largest-scale constant over smallest-scale constant
  bool fails = false;
  bool indeterminate = false;
};

struct SweepTable {
  double y = 0.0;
  std::vector<SweepRow> rows;
  // extent of the flagged s-values; NaN when nothing was flagged
  double s_fail_lo = std::numeric_limits<double>::quiet_NaN();
  double s_fail_hi = std::numeric_limits<double>::quiet_NaN();
};

// Flags s as an A2-failure candidate when the per-scale constant grows by at
// least 10x from the smallest to the largest dyadic length. Growth landing
// between 10/3 and 10 is reported as indeterminate; boundary exponents decay
// only logarithmically, so they end up in that band on any finite family.
inline SweepTable sweep_s(const GeneratingFunction& g, double y,
                          const std::vector<double>& s_grid,
                          const DyadicFamily& fam, int threads = 1) {
  double ty = g.s().sup_tau();
  if (!(y > ty + 0.5))
    throw std::invalid_argument("sweep_s: y must exceed sup|tau| + 1/2");
  if (s_grid.empty()) throw std::invalid_argument("sweep_s: empty s grid");
  for (double s : s_grid)
    if (!(s >= 0.0 && s <= 1.0))
      throw std::invalid_argument("sweep_s: s outside [0, 1]");

  std::vector<double> lengths = family_lengths(fam);
  std::vector<double> centers = family_centers(fam);

  SweepTable tab;
  tab.y = y;
  for (double s : s_grid) {
    LogWeight lu = [&g, y, s](double x) {
      double lf = eval_F(g, cplx(x, y)).log_mag;
      double ax = std::fabs(x);
      double den = 0.0;
      if (ax > 0.0) {
        double m = 2.0 * s * std::log(ax);
        den = (m > 0.0) ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
      }
      return 2.0 * lf - den;
    };
    SweepRow row;
    row.s = s;
    row.report = a2_constant(lu, lengths, centers, fam.quad_nodes, threads);
    row.report.s = s;
    row.report.y = y;
    row.growth = row.report.constant_by_scale.back() /
                 row.report.constant_by_scale.front();
    row.fails = row.growth >= 10.0;
    row.indeterminate = !row.fails && row.growth > 10.0 / 3.0;
    if (row.fails) {
      if (std::isnan(tab.s_fail_lo) || s < tab.s_fail_lo) tab.s_fail_lo = s;
      if (std::isnan(tab.s_fail_hi) || s > tab.s_fail_hi) tab.s_fail_hi = s;
    }
    tab.rows.push_back(std::move(row));
  }
  return tab;
}

}  // namespace expbasis
