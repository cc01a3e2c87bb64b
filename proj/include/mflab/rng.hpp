#pragma once

// Counter-based random numbers (Philox4x32-10).
//
// Every draw is a pure function of (seed, stream, major, minor), so the noise
// seen by particle i at step s does not depend on evaluation order or on the
// number of threads. Two systems driven with the same seed see the same
// Brownian increments.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace mflab::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr void round(Counter& ctr, const Key& key) noexcept {
  const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
  const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

constexpr Counter philox4x32(Counter ctr, Key key) noexcept {
  for (int r = 0; r < 10; ++r) {
    detail::round(ctr, key);
    key[0] += detail::kWeyl0;
    key[1] += detail::kWeyl1;
  }
  return ctr;
}

/// Uniform double in [0, 1) built from 53 bits of two 32-bit words.
constexpr double unit_interval(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

/// Disjoint counter spaces for the different consumers of randomness.
enum class Stream : std::uint32_t {
  noise = 1,
  initial_phase = 2,
  initial_disorder = 3,
  graph_edges = 4,
  regular_pairing = 5,
  linearized = 6,
};

class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  constexpr Counter block(Stream stream, std::uint64_t major, std::uint32_t minor) const noexcept {
    return philox4x32({static_cast<std::uint32_t>(major), static_cast<std::uint32_t>(major >> 32),
                       minor, static_cast<std::uint32_t>(stream)},
                      key_);
  }

  double uniform(Stream stream, std::uint64_t major, std::uint32_t minor) const noexcept {
    const Counter c = block(stream, major, minor);
    return unit_interval(c[0], c[1]);
  }

  /// Pair of independent standard normals (Box-Muller on one block).
  std::pair<double, double> normal_pair(Stream stream, std::uint64_t major,
                                        std::uint32_t minor) const noexcept {
    const Counter c = block(stream, major, minor);
    const double u1 = 1.0 - unit_interval(c[0], c[1]);  // (0, 1]
    const double u2 = unit_interval(c[2], c[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  double normal(Stream stream, std::uint64_t major, std::uint32_t minor) const noexcept {
    return normal_pair(stream, major, minor).first;
  }

  constexpr const Key& key() const noexcept { return key_; }

 private:
  Key key_;
};

/// Sequential view of one (stream, major) lane, for inherently serial
/// algorithms such as shuffles. Draws are consumed four words per block.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, Stream stream, std::uint64_t major) noexcept
      : rng_(seed), stream_(stream), major_(major) {}

  std::uint32_t next_u32() noexcept {
    if (lane_ == 4) {
      buffer_ = rng_.block(stream_, major_, position_++);
      lane_ = 0;
    }
    return buffer_[lane_++];
  }

  double next_unit() noexcept {
    const std::uint32_t hi = next_u32();
    return unit_interval(hi, next_u32());
  }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint32_t next_below(std::uint32_t bound) noexcept {
    std::uint64_t m = std::uint64_t{next_u32()} * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
      const std::uint32_t threshold = (0u - bound) % bound;
      while (low < threshold) {
        m = std::uint64_t{next_u32()} * bound;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

 private:
  CounterRng rng_;
  Stream stream_;
  std::uint64_t major_;
  std::uint32_t position_ = 0;
  Counter buffer_{};
  int lane_ = 4;
};

}  // namespace mflab::rng
