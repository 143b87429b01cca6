// Copyright 2026 The mcomplete Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCOMPLETE_RNG_H_
#define MCOMPLETE_RNG_H_

#include <array>
#include <cstdint>
#include <limits>

namespace mcomplete {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
//
// The key is the 64-bit seed; the 128-bit counter is split into a 64-bit
// block index and a 64-bit stream id, so independent streams can be derived
// from one seed without any state sharing. All distribution code lives here
// (instead of <random> distributions) so that a seed produces the same
// numbers on every platform and standard library.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();
  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  // Uniform double in (0, 1]; safe as a log() argument.
  double uniform_open_zero();
  // Standard normal deviate (Box-Muller, second value cached).
  double normal();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  // The raw bijection: ten Philox rounds applied to `counter` under `key`.
  static Block block(Block counter, Key key);

 private:
  void refill();

  Key key_;
  std::uint64_t block_index_ = 0;
  std::uint64_t stream_;
  Block buffer_{};
  int buffer_pos_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace mcomplete

#endif  // MCOMPLETE_RNG_H_
