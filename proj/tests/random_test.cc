// Copyright 2026 The dpattn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpattn/random.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "gtest/gtest.h"

namespace dpattn {
namespace {

TEST(PhiloxTest, KnownAnswerVectors) {
  EXPECT_EQ(Philox4x32({0, 0, 0, 0}, {0, 0}),
            (PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                       {0xffffffffu, 0xffffffffu}),
            (PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                       {0xa4093822u, 0x299f31d0u}),
            (PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

struct FrozenBlock {
  std::uint64_t seed;
  std::uint64_t stream;
  std::uint64_t block;
  std::uint64_t word0;
  std::uint64_t word1;
  double normal0;
  double normal1;
};

// Values from tests/oracles/philox_oracle.py.
constexpr FrozenBlock kFrozen[] = {
    {0, 0, 0, 0xe169c58d6627e8d5ull, 0x9b00dbd8bc57ac4cull,
     -0.39766753844418223, -0.310395478801738},
    {42, 7, 3, 0x7e42d578945bcadaull, 0xfcd7d3ce8747d589ull, 1.1854034925272372,
     -0.09203236890601121},
    {(1ull << 40) + 5, 1ull << 33, 1ull << 35, 0xd45ebbae5af69a08ull,
     0xf8cbfb8f52999b97ull, 0.6017768869581427, -0.10751237783177543},
};

TEST(RandomStreamTest, MatchesReferenceWordsAndNormals) {
  for (const FrozenBlock& f : kFrozen) {
    const RandomStream rng(f.seed, f.stream);
    const auto words = rng.Words(f.block);
    EXPECT_EQ(words[0], f.word0);
    EXPECT_EQ(words[1], f.word1);
    const auto pair = rng.NormalPair(f.block);
    EXPECT_NEAR(pair[0], f.normal0, 1e-14);
    EXPECT_NEAR(pair[1], f.normal1, 1e-14);
  }
}

TEST(RandomStreamTest, FillNormalsAgreesWithPointAccessAtAnyOffset) {
  const RandomStream rng(123, 4);
  for (std::uint64_t first : {0ull, 1ull, 2ull, 7ull, 1000001ull}) {
    for (std::size_t len : {0u, 1u, 2u, 3u, 10u, 11u}) {
      std::vector<double> out(len);
      rng.FillNormals(first, out);
      for (std::size_t i = 0; i < len; ++i) {
        EXPECT_EQ(out[i], rng.Normal(first + i))
            << "first=" << first << " i=" << i;
      }
    }
  }
}

TEST(RandomStreamTest, StreamsAndSeedsAreDistinct) {
  const RandomStream a(1, 0);
  const RandomStream b(1, 1);
  const RandomStream c(2, 0);
  EXPECT_NE(a.Words(0), b.Words(0));
  EXPECT_NE(a.Words(0), c.Words(0));
  EXPECT_EQ(a.Words(5), RandomStream(1, 0).Words(5));
}

TEST(RandomStreamTest, UniformsStayInUnitInterval) {
  const RandomStream rng(9, 9);
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const double u = rng.Uniform(i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStreamTest, NormalMomentsAreStandard) {
  const RandomStream rng(2026, 0);
  constexpr int kCount = 400000;
  std::vector<double> x(kCount);
  rng.FillNormals(0, x);
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (double v : x) {
    s1 += v;
    s2 += v * v;
    s3 += v * v * v;
    s4 += v * v * v * v;
  }
  const double n = kCount;
  // Standard errors: mean 1/sqrt(n), E[x^2] sqrt(2/n), E[x^3] sqrt(15/n),
  // E[x^4] sqrt(96/n). Five standard errors each.
  EXPECT_NEAR(s1 / n, 0.0, 5 * std::sqrt(1 / n));
  EXPECT_NEAR(s2 / n, 1.0, 5 * std::sqrt(2 / n));
  EXPECT_NEAR(s3 / n, 0.0, 5 * std::sqrt(15 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5 * std::sqrt(96 / n));
  for (double v : x) ASSERT_TRUE(std::isfinite(v));
}

}  // namespace
}  // namespace dpattn
