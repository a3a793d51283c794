#pragma once

#include <array>
#include <cstdint>

namespace arfima {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., Random123).
 *
 * Known-answer vectors (counter, key -> output) checked in the tests:
 *   0,0,0,0 / 0,0                              -> 6627e8d5 e169c58d bc57ac4c 9b00dbd8
 *   ffffffff x4 / ffffffff ffffffff            -> 408f276d 41c83b0e a20bc7c6 6d5451fd
 *   243f6a88 85a308d3 13198a2e 03707344 /
 *   a4093822 299f31d0                          -> d16cfe09 94fdcceb 5001e420 24126ea1
 */
using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key);

/// Standard normal stream for one (seed, stream) pair. The key is the seed and the
/// upper counter words hold the stream index, so stream r is reached without skipping.
class NormalStream {
public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on the open interval (0,1) with 53 random bits.
  double uniform();

  /// Inverse-CDF normal: -sqrt(2) * erfc_inv(2u).
  double normal();

private:
  Philox4x32Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32Counter buf_{};
  int used_ = 4;

  std::uint32_t next_word();
};

/// SplitMix64 finalizer, used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace arfima
