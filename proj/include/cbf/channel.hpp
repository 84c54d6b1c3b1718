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

#include "cbf/array_model.hpp"
#include "cbf/random.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace cbf
{

// Gray-mapped QPSK, unit average energy:
//
//   bits (b0 b1)   symbol
//   0 0            (+1 + j) / sqrt(2)
//   0 1            (+1 - j) / sqrt(2)
//   1 0            (-1 + j) / sqrt(2)
//   1 1            (-1 - j) / sqrt(2)
//
// b0 selects the sign of the in-phase part, b1 the sign of the quadrature part.
inline constexpr std::size_t qpsk_bits_per_symbol = 2;

struct symbol_frame
{
  std::vector<cd> symbols;
  std::vector<std::uint8_t> bits;
};

symbol_frame qpsk_modulate(std::span<const std::uint8_t> bits);

// Quadrant decision; a zero component decides for bit 0.
std::array<std::uint8_t, 2> qpsk_demodulate(cd soft);

void qpsk_demodulate(std::span<const cd> soft, std::vector<std::uint8_t>& bits);

// Adds circular complex Gaussian noise of total variance sigma2 (sigma2/2 per
// real dimension), in place.
void awgn(std::span<cd> samples, double sigma2, rng_t& rng);

enum class channel_kind
{
  awgn,
  rayleigh,
};

std::string_view to_string(channel_kind k);
channel_kind channel_kind_from_string(std::string_view s);

struct channel_realization
{
  cd h1{1.0, 0.0};
  cd h2{1.0, 0.0};
  std::size_t block_length = 2; // symbols sharing these coefficients
};

// One Alamouti codeword (two symbol periods) per fading block by default.
inline constexpr std::size_t default_fading_block = 2;

// Fresh CN(0, 1) coefficients per block; equal_subarrays forces h2 = h1.
std::vector<channel_realization> rayleigh_block(std::size_t num_blocks,
                                                bool equal_subarrays,
                                                rng_t& rng,
                                                std::size_t block_length = default_fading_block);

channel_realization draw_realization(channel_kind kind, bool equal_subarrays, rng_t& rng,
                                     std::size_t block_length = default_fading_block);

// Eb/N0 operating point. With unit symbol energy at the receiver,
// Es/N0 = Eb/N0 * bits_per_symbol and the noise variance is N0 = 1 / (Es/N0).
struct snr_point
{
  double ebn0_db = 0.0;

  double esn0_db(std::size_t bits_per_symbol = qpsk_bits_per_symbol) const;
  double noise_variance(std::size_t bits_per_symbol = qpsk_bits_per_symbol, double symbol_energy = 1.0) const;
};

} // namespace cbf
