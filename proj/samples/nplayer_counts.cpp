// Draw one sample of the two-atom model and list its equilibrium counts.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "mfstop/mfstop.hpp"

int main(int argc, char** argv) {
  const auto spec = mfstop::preset("example-5.1");
  const mfstop::Count n = argc > 1 ? std::atoll(argv[1]) : 20;
  const std::uint64_t sample = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 0;

  const auto s = mfstop::draw_sample(spec.model, spec.params, 0.0, *spec.seed, sample, n);
  const auto eq = mfstop::enumerate(s);
  std::printf("n = %lld, G(0) = %lld\nK:", static_cast<long long>(n), static_cast<long long>(mfstop::count_G(s, 0)));
  for (auto k : eq.K) std::printf(" %lld", static_cast<long long>(k));
  std::printf("\nK*:");
  for (auto k : eq.K_star) std::printf(" %lld", static_cast<long long>(k));
  std::printf("\nminimal %lld, maximal %lld\n", static_cast<long long>(mfstop::minimal_from(s, 0)),
              static_cast<long long>(mfstop::maximal_from(s, 0)));
}
