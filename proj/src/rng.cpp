#include "rkpr/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rkpr {

namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id & 0xffffffffu),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

std::uint64_t RngStream::next_u64() {
  ++position_;
  return engine_();
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv; }

double RngStream::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
}

std::size_t RngStream::uniform_index(std::size_t count) {
  if (count == 0) throw std::invalid_argument("uniform_index: empty range");
  auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(count));
  return idx < count ? idx : count - 1;
}

Complex RngStream::complex_normal() {
  const double r = std::sqrt(-std::log(uniform_pos()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

void RngStream::discard(std::uint64_t words) {
  engine_.discard(words);
  position_ += words;
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(seed_, mix64(stream_id_ ^ mix64(index + 1)));
}

}  // namespace rkpr
