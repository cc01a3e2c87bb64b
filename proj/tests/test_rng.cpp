#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "mflab/rng.hpp"

using namespace mflab::rng;

// Known-answer vectors of the Random123 distribution for philox4x32-10.
TEST_CASE("philox known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("draws are pure functions of seed, stream and counter") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.uniform(Stream::noise, 7, 3) == b.uniform(Stream::noise, 7, 3));
  CHECK(a.uniform(Stream::noise, 7, 3) != c.uniform(Stream::noise, 7, 3));
  CHECK(a.uniform(Stream::noise, 7, 3) != a.uniform(Stream::initial_phase, 7, 3));
  CHECK(a.uniform(Stream::noise, 7, 3) != a.uniform(Stream::noise, 8, 3));
  CHECK(a.block(Stream::noise, std::uint64_t{1} << 32, 0) != a.block(Stream::noise, 0, 0));
  // Evaluation order does not matter.
  const double late = a.normal(Stream::noise, 1000, 5);
  for (int i = 0; i < 100; ++i) (void)a.normal(Stream::noise, static_cast<std::uint64_t>(i), 0);
  CHECK(a.normal(Stream::noise, 1000, 5) == late);
}

TEST_CASE("unit interval range") {
  CHECK(unit_interval(0, 0) == 0.0);
  CHECK(unit_interval(0xffffffffu, 0xffffffffu) < 1.0);
  CHECK(unit_interval(0xffffffffu, 0xffffffffu) == 1.0 - 0x1.0p-53);
}

TEST_CASE("normal moments") {
  const CounterRng rng(9);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n / 2; ++i) {
    const auto [x, y] = rng.normal_pair(Stream::noise, static_cast<std::uint64_t>(i), 0);
    for (double z : {x, y}) {
      s1 += z;
      s2 += z * z;
      s4 += z * z * z * z;
    }
  }
  // 5 sigma windows: sd of the mean 1/sqrt(n), of the second moment sqrt(2/n),
  // of the fourth moment sqrt(96/n).
  CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("sequential stream") {
  CounterStream s(5, Stream::regular_pairing, 0);
  CounterStream t(5, Stream::regular_pairing, 0);
  std::vector<std::uint32_t> seq;
  for (int i = 0; i < 10; ++i) seq.push_back(s.next_u32());
  for (int i = 0; i < 10; ++i) CHECK(t.next_u32() == seq[static_cast<std::size_t>(i)]);
  CounterStream u(5, Stream::regular_pairing, 1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = u.next_below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK(u.next_below(1) == 0);
}
