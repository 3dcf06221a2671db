#include <gtest/gtest.h>

#include <set>

#include "icegsa/rng.hpp"

using icegsa::Philox4x32;
using icegsa::StreamRng;

namespace {

Philox4x32::Block run(std::uint32_t k0, std::uint32_t k1, Philox4x32::Block ctr) {
  return Philox4x32(static_cast<std::uint64_t>(k0) | (static_cast<std::uint64_t>(k1) << 32))(ctr);
}

}  // namespace

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
  const Philox4x32::Block expect{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
  EXPECT_EQ(run(0, 0, {0, 0, 0, 0}), expect);
}

TEST(Philox, KnownAnswerAllOnes) {
  const Philox4x32::Block expect{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};
  EXPECT_EQ(run(0xffffffffu, 0xffffffffu, {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}), expect);
}

TEST(Philox, KnownAnswerPi) {
  const Philox4x32::Block expect{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u};
  EXPECT_EQ(run(0xa4093822u, 0x299f31d0u, {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}), expect);
}

TEST(StreamRng, UniformsInOpenUnitInterval) {
  StreamRng rng(42, 1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(static_cast<std::uint64_t>(i));
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(StreamRng, StreamsAndSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
    for (std::uint64_t stream : {1ull, 10ull, 11ull}) {
      StreamRng rng(seed, stream);
      for (std::uint64_t i = 0; i < 100; ++i) seen.insert(rng.bits(i));
    }
  }
  EXPECT_EQ(seen.size(), 900u);
}

TEST(StreamRng, RandomAccessIsPure) {
  StreamRng a(9, 3), b(9, 3);
  EXPECT_EQ(a.uniform(123456789), b.uniform(123456789));
  EXPECT_EQ(a.bits(5), a.bits(5));
}
