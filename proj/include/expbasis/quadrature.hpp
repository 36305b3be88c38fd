#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

// Gauss-Legendre rules (Newton on the Legendre recurrence) plus small
// composite-panel helpers shared by the dual-norm integral and the A2
// averages. Rules are cached; the cache is guarded for concurrent sweeps.

namespace expbasis {

struct GLRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

inline const GLRule& gauss_legendre(int n) {
  if (n < 1 || n > 4096) throw std::invalid_argument("gauss_legendre: bad order");
  static std::map<int, GLRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GLRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n / 2 + n % 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double th = M_PI * (4.0 * i + 3.0) / (4.0 * n + 2.0);
    double x = std::cos(th) * (1.0 - (n - 1.0) / (8.0 * n * n * n));
    double pp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = w;
    r.x[i] = -x;
    r.w[i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;  // exact center node
  return cache.emplace(n, std::move(r)).first->second;
}

inline double integrate_panel(const std::function<double(double)>& f, double a,
                              double b, const GLRule& r) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    s += r.w[i] * f(mid + half * r.x[i]);
  return half * s;
}

// Composite integral over consecutive edges.
inline double integrate_edges(const std::function<double(double)>& f,
                              const std::vector<double>& edges, const GLRule& r) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    s += integrate_panel(f, edges[i], edges[i + 1], r);
  return s;
}

// Recursive panel halving until the estimate is stable to rel_tol (with an
// absolute floor to terminate on zero panels). Depth-capped defensively.
inline double integrate_adaptive(const std::function<double(double)>& f,
                                 double a, double b, const GLRule& r,
                                 double rel_tol, double abs_floor = 1e-300,
                                 int depth = 0) {
  double whole = integrate_panel(f, a, b, r);
  double mid = 0.5 * (a + b);
  double halves = integrate_panel(f, a, mid, r) + integrate_panel(f, mid, b, r);
  if (std::abs(halves - whole) <=
          rel_tol * std::max(std::abs(halves), std::abs(whole)) ||
      std::abs(halves - whole) < abs_floor || depth >= 24)
    return halves;
  return integrate_adaptive(f, a, mid, r, rel_tol, abs_floor, depth + 1) +
         integrate_adaptive(f, mid, b, r, rel_tol, abs_floor, depth + 1);
}

}  // namespace expbasis
