// sweep the constant shift q and watch the critical pair track 1/2 + q.
// Two independent routes run side by side; the last columns show how far
// each lands from the prediction.

#include <cstdio>

#include "expbasis/critical.hpp"

using namespace expbasis;

int main() {
  const long N = 65536;
  const double tau = 256.0;
  std::printf("# constant-shift sweep, window N = %ld, tau = %.0f\n", N, tau);
  std::printf("%6s %10s %10s %10s %10s %10s %10s\n", "q", "s0_delta",
              "s1_delta", "s0_block", "s1_block", "pred", "worst_err");
  for (double q = 0.05; q < 0.46; q += 0.05) {
    Spectrum s = make_constant_shift(q, N);
    CriticalIndices d = s_from_deltas(s, tau, geometric_t_grid(1.0, 256.0));
    CriticalIndices b = s_from_blocks(blocks_from_spectrum(s, 14), 7).ci;
    double pred = 0.5 + q;
    double err = 0.0;
    for (double v : {d.s0, d.s1, b.s0, b.s1})
      err = std::max(err, std::fabs(v - pred));
    std::printf("%6.2f %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f\n", q, d.s0,
                d.s1, b.s0, b.s1, pred, err);
  }

  std::printf("\n# block spectrum: inner shift p on [0, 16], outer shift q\n");
  std::printf("%6s %6s %10s %10s\n", "p", "q", "s0", "s1");
  for (double p : {0.1, 0.3}) {
    for (double q : {-0.2, 0.2}) {
      Spectrum s = make_block(p, q, {16, 256, 4096}, N);
      CriticalIndices d = s_from_deltas(s, tau, geometric_t_grid(1.0, 256.0));
      std::printf("%6.2f %6.2f %10.4f %10.4f\n", p, q, d.s0, d.s1);
    }
  }
  return 0;
}
