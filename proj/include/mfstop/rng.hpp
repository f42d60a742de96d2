#pragma once

// Philox4x32-10 counter-based generator. The uniform for agent i in sample s
// depends only on (seed, s, i), so samples can be drawn in any order.

#include <array>
#include <cstdint>

namespace mfstop {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static Counter single_round(const Counter& x, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * x[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
  }
};

inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t sample) : seed_(seed), sample_(sample) {}

  // Uniform in [0, 1) for agent i of this sample.
  double uniform(std::uint64_t i) const {
    const auto out = block(i >> 1);
    const std::uint64_t word = (i & 1u) == 0
                                   ? (static_cast<std::uint64_t>(out[0]) << 32) | out[1]
                                   : (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    return to_unit(word);
  }

  template <class Out>
  void fill(Out& out, std::uint64_t count) const {
    out.resize(count);
    for (std::uint64_t b = 0; 2 * b < count; ++b) {
      const auto r = block(b);
      out[2 * b] = to_unit((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
      if (2 * b + 1 < count) out[2 * b + 1] = to_unit((static_cast<std::uint64_t>(r[2]) << 32) | r[3]);
    }
  }

 private:
  Philox4x32::Counter block(std::uint64_t b) const {
    Philox4x32::Counter ctr{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                            static_cast<std::uint32_t>(sample_), static_cast<std::uint32_t>(sample_ >> 32)};
    Philox4x32::Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    return Philox4x32::generate(ctr, key);
  }

  std::uint64_t seed_;
  std::uint64_t sample_;
};

}  // namespace mfstop
