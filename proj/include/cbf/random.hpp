// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cbf
{

using rng_t = std::mt19937_64;

// Independent stream keyed by a root seed and a partition path, e.g.
// make_stream(seed, {angle_index, snr_index, chunk}). Two different keys
// never share a seed sequence, so streams can be handed to workers freely.
inline rng_t make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> key = {})
{
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * key.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto k : key)
    push(k);
  std::seed_seq seq(words.begin(), words.end());
  return rng_t(seq);
}

} // namespace cbf
