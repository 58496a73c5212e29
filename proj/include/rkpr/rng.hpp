#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

#include "rkpr/cvector.hpp"

namespace rkpr {

/// Seedable, splittable random stream.
///
/// Engine: std::mt19937_64 seeded through std::seed_seq with the 32-bit
/// words {seed lo, seed hi, stream lo, stream hi}. Both are fully specified
/// by the C++ standard, so (seed, stream_id) maps to the same sequence on
/// every conforming platform.
///
/// Derived variates:
///  - uniform():        (u64 >> 11) * 2^-53, in [0, 1)
///  - uniform_pos():    ((u64 >> 11) + 1) * 2^-53, in (0, 1]
///  - complex_normal(): sqrt(-ln u1) * exp(2 pi i u2) with u1 = uniform_pos(),
///                      u2 = uniform(); real and imaginary parts are iid
///                      N(0, 1/2), so E|xi|^2 = 1.
///
/// Each variate consumes a fixed number of 64-bit words, tracked by
/// position(), so any stream state can be recreated with discard().
class RngStream {
 public:
  static constexpr std::string_view kGeneratorId = "mt19937_64/seed_seq/v1";

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 64-bit words drawn so far.
  std::uint64_t position() const noexcept { return position_; }

  std::uint64_t next_u64();
  double uniform();
  double uniform_pos();
  /// Uniform integer in [0, count).
  std::size_t uniform_index(std::size_t count);
  Complex complex_normal();

  void discard(std::uint64_t words);

  /// Independent child stream: same seed, stream id mixed with `index`
  /// through splitmix64. Does not advance this stream.
  RngStream split(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
};

/// splitmix64 finaliser; used for substream ids and config hashing.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace rkpr
