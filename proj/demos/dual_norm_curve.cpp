// trace ||psi||_t for the integer spectrum and a shifted one, comparing the
// three evaluation methods and the carrier-function ratio r(t). The integer
// rows double as a live oracle check: series and closed form must agree to
// machine precision.

#include <cstdio>

#include "expbasis/basis_diagnostics.hpp"
#include "expbasis/critical.hpp"
#include "expbasis/dual_norm.hpp"

using namespace expbasis;

static void trace(const char* label, const Spectrum& s, FMode mode) {
  GeneratingFunction g = make_genfun(s, mode, s.N);
  std::vector<double> grid = geometric_t_grid(4.0, 64.0, 1.4142135623730951);
  DualNormCurve series = dual_norm_curve(g, grid, NormMethod::series,
                                         CurveParams{});
  PsitTable ratio = psitnorm_ratio(g, series);

  std::printf("# %s\n", label);
  // the series and integral routes give equivalent norms, not equal ones:
  // their log ratio should sit at a t-uniform constant, so a flat column
  // here is the good outcome (4/sqrt(pi) on the integer spectrum)
  std::printf("%8s %14s %14s %12s\n", "t", "log_norm", "log_ratio_si",
              "r(t)");
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const CurvePoint& p = series.points[i];
    double li = psi_norm_integral(g, p.t, 16.0 * p.t, 1e-8).log_norm;
    std::printf("%8.2f %14.6f %14.2e %12.6f\n", p.t, p.log_norm,
                p.log_norm - li, ratio.rows[i].r);
  }
  std::printf("# ratio band max/min = %.6f\n\n", ratio.band);
}

int main() {
  Spectrum ints = make_constant_shift(0.0, 16384);
  trace("integer spectrum", ints, FMode::closed_form_sine);
  Spectrum shifted = make_constant_shift(0.2, 16384);
  trace("constant shift q = 0.2", shifted, FMode::sine_relative);
  return 0;
}
