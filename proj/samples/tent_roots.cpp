// Solve the mean field equation for the tent density and print each root.

#include <cstdio>

#include "mfstop/mfstop.hpp"

int main() {
  const auto spec = mfstop::preset("tent");
  for (const auto& s : mfstop::find_solutions(spec.model, spec.params, 0.0)) {
    std::printf("u = %.6f  %-24s", s.u, mfstop::to_string(s.clazz).c_str());
    if (s.alpha) std::printf("  alpha = %.4f", *s.alpha);
    std::printf("\n");
  }
  const auto q = mfstop::quartet(spec.model, spec.params, 0.0);
  std::printf("quartet: %g %g %g %g\n", q.u_m, q.u_mrt, q.u_Mlt, q.u_M);
}
