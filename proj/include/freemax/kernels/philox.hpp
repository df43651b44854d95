#pragma once

#include <array>
#include <bit>
#include <cstdint>

// Philox4x32-10 counter-based generator. A block is keyed by the 64-bit seed
// and indexed by a 128-bit counter laid out as (block_lo, block_hi,
// stream_lo, stream_hi); every block yields four 32-bit words, i.e. two
// 64-bit outputs. Pure functions of (seed, stream, block), so draws are
// reproducible regardless of batching or thread count.

namespace freemax::kern {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

// Two 64-bit outputs of one block, in fixed word order.
inline std::array<std::uint64_t, 2> philox_block_u64(std::uint64_t seed, std::uint64_t stream,
                                                     std::uint64_t block) {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  const auto out = philox4x32(ctr, key);
  return {out[0] | (static_cast<std::uint64_t>(out[1]) << 32),
          out[2] | (static_cast<std::uint64_t>(out[3]) << 32)};
}

// Maps a 64-bit word onto (0,1), strictly excluding both endpoints. The
// transform is expressible with the same integer/FP ops in the SIMD lane, so
// scalar and vector fills agree bitwise.
inline double uniform_from_bits(std::uint64_t x) {
  const double mant = std::bit_cast<double>(0x3FF0000000000000ull | (x >> 12));
  return mant - (1.0 - 0x1p-53);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace freemax::kern
