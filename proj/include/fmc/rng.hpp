#pragma once

#include <array>
#include <cstdint>

namespace fmc {

/// Counter-based random number generator (Philox4x32-10, Salmon et al.,
/// SC 2011). Chosen over stateful engines because outputs are a pure
/// function of (key, counter): any block can be generated independently of
/// the others, which is what makes Monte-Carlo runs bit-reproducible across
/// thread counts.
///
/// Stream layout. The 128-bit counter is split as
///
///   counter = (position_lo, position_hi, stream_lo, stream_hi)
///
/// so one 64-bit key (the user seed) carries 2^64 independent streams of
/// 2^64 blocks each. Every generator in this library is constructed either
/// directly from a user seed (stream 0) or from a seed derived with
/// `derive_seed(master, domain, index)`, which reads block `index` of the
/// master key's stream `domain`. The `domain` constants below keep derived
/// seeds from ever colliding with each other or with stream-0 draws.
class Philox4x32 {
 public:
  explicit Philox4x32(std::uint64_t key, std::uint64_t stream = 0,
                      std::uint64_t position = 0) noexcept
      : key_{static_cast<std::uint32_t>(key),
             static_cast<std::uint32_t>(key >> 32)},
        counter_{static_cast<std::uint32_t>(position),
                 static_cast<std::uint32_t>(position >> 32),
                 static_cast<std::uint32_t>(stream),
                 static_cast<std::uint32_t>(stream >> 32)},
        index_(4) {}

  /// One 128-bit block for an explicit counter/key pair. Exposed so tests
  /// can check the keyed bijection against an independent transcription.
  static std::array<std::uint32_t, 4> block(
      std::array<std::uint32_t, 4> counter,
      std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * counter[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * counter[2];
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      counter = {hi1 ^ counter[1] ^ key[0], lo1,
                 hi0 ^ counter[3] ^ key[1], lo0};
    }
    return counter;
  }

  std::uint32_t next_u32() noexcept {
    if (index_ == 4) {
      buffer_ = block(counter_, key_);
      advance();
      index_ = 0;
    }
    return buffer_[index_++];
  }

  /// Low word first.
  std::uint64_t next_u64() noexcept {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform on [0,1) with 53 random bits.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Uses the multiply-shift map, whose bias
  /// (< bound/2^64) is negligible for the pool sizes seen here.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    const auto wide =
        static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

  void advance() noexcept {
    if (++counter_[0] == 0 && ++counter_[1] == 0 && ++counter_[2] == 0) {
      ++counter_[3];
    }
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int index_;
};

/// Seed-derivation domains. Each consumer of derived seeds gets its own
/// stream of the master key.
inline constexpr std::uint64_t kSeedDomainReplicate = 0x7265706C69636174;  // montecarlo replicates
inline constexpr std::uint64_t kSeedDomainSplit = 0x73706C6974736864;      // dataset shuffle/split
inline constexpr std::uint64_t kSeedDomainSubsample = 0x73756273616D706C;  // harness subsamples

/// Derived seed = first 64 bits of block `index` in stream `domain` of the
/// master key. Independent of how many other indices are ever used, so a
/// replicate count can grow without perturbing earlier replicates.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain,
                                 std::uint64_t index) noexcept {
  const auto out = Philox4x32::block(
      {static_cast<std::uint32_t>(index),
       static_cast<std::uint32_t>(index >> 32),
       static_cast<std::uint32_t>(domain),
       static_cast<std::uint32_t>(domain >> 32)},
      {static_cast<std::uint32_t>(master),
       static_cast<std::uint32_t>(master >> 32)});
  return static_cast<std::uint64_t>(out[0]) |
         (static_cast<std::uint64_t>(out[1]) << 32);
}

}  // namespace fmc
