#pragma once

#include <array>
#include <cstdint>

namespace mdp {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// Stateless: the output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < kRounds; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// SplitMix64 finalizer; used to derive keys and stream indices.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Identifies one reproducible random stream.
///
/// The Philox key comes from the master seed; the stream index occupies the
/// upper half of the 128-bit counter and the block index the lower half, so
/// any (seed, stream, block) triple is addressable without sequential state.
struct StreamId {
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;

  Philox4x32::Key key() const noexcept {
    const std::uint64_t k = splitmix64(master_seed);
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }

  Philox4x32::Counter counter(std::uint64_t block) const noexcept {
    return {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
            static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  }

  Philox4x32::Counter block(std::uint64_t block_index) const noexcept {
    return Philox4x32::apply(counter(block_index), key());
  }
};

/// Stream index for replicate `replicate` of experiment `experiment` within a
/// named domain (simulation, oracle checks, ...). Collisions need a 64-bit
/// hash collision.
constexpr std::uint64_t derive_stream(std::uint64_t domain, std::uint64_t experiment,
                                      std::uint64_t replicate) noexcept {
  return splitmix64(splitmix64(splitmix64(domain) ^ experiment) ^ replicate);
}

/// Uniform on (0,1) from 32 random bits: (w + 1/2) / 2^32, exact in double.
constexpr double uniform_open01(std::uint32_t w) noexcept {
  return (static_cast<double>(w) + 0.5) * 0x1p-32;
}

/// Uniform on [0,1) with 53 random bits.
constexpr double uniform53(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1p-53;
}

}  // namespace mdp
