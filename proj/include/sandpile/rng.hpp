#pragma once

#include <array>
#include <cstdint>

namespace sandpile {

/// Philox4x32-10 block: 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream. The 64-bit seed is the Philox key and the
/// stream id occupies the upper half of the counter, so (seed, stream_id)
/// names an independent, platform-independent sequence. Trials use their
/// index as stream_id.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Exactly uniform on {0, ..., bound-1}; bound must be nonzero. Bounds
  /// below 2^32 consume 32-bit words, larger ones 64-bit words.
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
};

}  // namespace sandpile
