// Chance that an n-player equilibrium sits near the tent's middle root,
// next to the limits it should approach.

#include <cstdio>

#include "mfstop/mfstop.hpp"

int main() {
  mfstop::ExperimentConfig cfg(mfstop::preset("tent"));
  cfg.params.n = 2000;
  cfg.samples = 1000;
  cfg.x = 0.5;
  cfg.eps = 0.02;
  const auto rep = mfstop::estimate_near(cfg);
  const auto& p = rep.estimates.at("prob_nonempty");
  const auto& m = rep.estimates.at("mean_count");
  std::printf("P(window nonempty) = %.4f  [%.4f, %.4f]\n", p.value, p.ci_low, p.ci_high);
  std::printf("mean count         = %.4f +- %.4f (exact %.4f)\n", m.value, m.std_error,
              rep.references.at("exact_expected_count"));
  std::printf("limits: lower bound %.4f, expected count %.4f\n", rep.references.at("lower_bound_L"),
              rep.references.at("expected_count_limit"));
}
