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

#ifndef DPATTN_RANDOM_H_
#define DPATTN_RANDOM_H_

// Deterministic, random-access random streams.
//
// All randomness in the library comes from Philox4x32-10 (Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3") used in counter mode:
//
//   key     = the 64-bit user seed (low word, high word)
//   counter = (block low, block high, stream low, stream high)
//
// so that every (seed, stream) pair is an independent sequence of 128-bit
// blocks that can be addressed at any offset. Each block is split into two
// 53-bit uniforms; a pair of uniforms becomes a pair of standard normals via
// the Box-Muller transform. Normal number j of a stream therefore lives in
// block j / 2, which lets work be split into fixed chunks whose results do not
// depend on how many threads evaluate them.
//
// The stream layout is part of the output contract; bump kRandomStreamVersion
// whenever it changes.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>

namespace dpattn {

inline constexpr int kRandomStreamVersion = 1;
inline constexpr const char* kRandomStreamName = "philox4x32-10+box-muller";

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace internal {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline PhiloxBlock PhiloxRound(const PhiloxBlock& ctr, const PhiloxKey& key) {
  const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
  const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace internal

// Philox4x32 with 10 rounds.
inline PhiloxBlock Philox4x32(PhiloxBlock ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += internal::kPhiloxW0;
      key[1] += internal::kPhiloxW1;
    }
    ctr = internal::PhiloxRound(ctr, key);
  }
  return ctr;
}

// An addressable stream of 64-bit words, uniforms and standard normals.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  // The two 64-bit words of block `block`.
  std::array<std::uint64_t, 2> Words(std::uint64_t block) const {
    const PhiloxBlock out =
        Philox4x32({static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32),
                    static_cast<std::uint32_t>(stream_),
                    static_cast<std::uint32_t>(stream_ >> 32)},
                   key_);
    return {(std::uint64_t{out[1]} << 32) | out[0],
            (std::uint64_t{out[3]} << 32) | out[2]};
  }

  // Uniform number `index` of the stream, in [0, 1).
  double Uniform(std::uint64_t index) const {
    const auto words = Words(index / 2);
    return ToUnitInterval(words[index % 2]);
  }

  // Writes normals [first, first + out.size()) of the stream into `out`.
  void FillNormals(std::uint64_t first, std::span<double> out) const {
    std::size_t pos = 0;
    std::uint64_t index = first;
    if (index % 2 == 1 && pos < out.size()) {
      out[pos++] = NormalPair(index / 2)[1];
      ++index;
    }
    for (; pos + 1 < out.size(); pos += 2, index += 2) {
      const auto pair = NormalPair(index / 2);
      out[pos] = pair[0];
      out[pos + 1] = pair[1];
    }
    if (pos < out.size()) {
      out[pos] = NormalPair(index / 2)[0];
    }
  }

  double Normal(std::uint64_t index) const {
    return NormalPair(index / 2)[index % 2];
  }

  // Box-Muller on the two uniforms of `block`.
  std::array<double, 2> NormalPair(std::uint64_t block) const {
    const auto words = Words(block);
    // u1 in (0, 1] keeps the logarithm finite.
    const double u1 = static_cast<double>((words[0] >> 11) + 1) * 0x1.0p-53;
    const double u2 = ToUnitInterval(words[1]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  static double ToUnitInterval(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
  }

  PhiloxKey key_;
  std::uint64_t stream_;
};

}  // namespace dpattn

#endif  // DPATTN_RANDOM_H_
