#pragma once

#include <array>
#include <cstdint>

namespace postsel {

/// Counter-based random stream (Philox4x32-10).
///
/// The state is a (seed, stream, position) triple, so a stream is a plain
/// value: copying it forks the sequence, and `split(i)` derives an
/// independent child deterministically. Parallel simulations give each
/// replication its own child, which makes results independent of how the
/// replications are scheduled over threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  /// Child stream number `index`; children of distinct indices never overlap.
  [[nodiscard]] RandomStream split(std::uint64_t index) const;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Standard normal by inverse transform of `uniform()`.
  double normal();

  std::uint32_t next_u32();

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
};

/// One Philox4x32-10 block; exposed for the known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

}  // namespace postsel
