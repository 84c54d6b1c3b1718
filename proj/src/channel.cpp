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

#include "cbf/channel.hpp"
#include "cbf/errors.hpp"

#include <cmath>
#include <string>

namespace cbf
{

namespace
{
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
}

symbol_frame qpsk_modulate(std::span<const std::uint8_t> bits)
{
  if (bits.size() % qpsk_bits_per_symbol != 0)
    throw domain_error("QPSK needs an even number of bits, got " + std::to_string(bits.size()));
  symbol_frame f;
  f.bits.assign(bits.begin(), bits.end());
  f.symbols.resize(bits.size() / 2);
  for (std::size_t k = 0; k < f.symbols.size(); ++k)
  {
    const double i = bits[2 * k] ? -inv_sqrt2 : inv_sqrt2;
    const double q = bits[2 * k + 1] ? -inv_sqrt2 : inv_sqrt2;
    f.symbols[k] = {i, q};
  }
  return f;
}

std::array<std::uint8_t, 2> qpsk_demodulate(cd soft)
{
  return {static_cast<std::uint8_t>(soft.real() < 0.0), static_cast<std::uint8_t>(soft.imag() < 0.0)};
}

void qpsk_demodulate(std::span<const cd> soft, std::vector<std::uint8_t>& bits)
{
  bits.resize(2 * soft.size());
  for (std::size_t k = 0; k < soft.size(); ++k)
  {
    bits[2 * k] = soft[k].real() < 0.0;
    bits[2 * k + 1] = soft[k].imag() < 0.0;
  }
}

void awgn(std::span<cd> samples, double sigma2, rng_t& rng)
{
  if (sigma2 < 0.0)
    throw domain_error("noise variance must be non-negative");
  if (sigma2 == 0.0)
    return;
  std::normal_distribution<double> n(0.0, std::sqrt(sigma2 / 2.0));
  for (auto& s : samples)
  {
    const double re = n(rng);
    const double im = n(rng);
    s += cd{re, im};
  }
}

std::string_view to_string(channel_kind k) { return k == channel_kind::awgn ? "awgn" : "rayleigh"; }

channel_kind channel_kind_from_string(std::string_view s)
{
  if (s == "awgn")
    return channel_kind::awgn;
  if (s == "rayleigh")
    return channel_kind::rayleigh;
  throw parse_error("unknown channel '" + std::string(s) + "'");
}

channel_realization draw_realization(channel_kind kind, bool equal_subarrays, rng_t& rng, std::size_t block_length)
{
  if (kind == channel_kind::awgn)
    return {{1.0, 0.0}, {1.0, 0.0}, block_length};
  std::normal_distribution<double> n(0.0, inv_sqrt2);
  channel_realization r;
  r.block_length = block_length;
  const double a = n(rng);
  const double b = n(rng);
  r.h1 = {a, b};
  if (equal_subarrays)
    r.h2 = r.h1;
  else
  {
    const double c = n(rng);
    const double d = n(rng);
    r.h2 = {c, d};
  }
  return r;
}

std::vector<channel_realization> rayleigh_block(std::size_t num_blocks, bool equal_subarrays, rng_t& rng, std::size_t block_length)
{
  if (num_blocks == 0)
    throw domain_error("need at least one fading block");
  if (block_length == 0)
    throw domain_error("fading block length must be positive");
  std::vector<channel_realization> out;
  out.reserve(num_blocks);
  for (std::size_t b = 0; b < num_blocks; ++b)
    out.push_back(draw_realization(channel_kind::rayleigh, equal_subarrays, rng, block_length));
  return out;
}

double snr_point::esn0_db(std::size_t bits_per_symbol) const
{
  return ebn0_db + 10.0 * std::log10(static_cast<double>(bits_per_symbol));
}

double snr_point::noise_variance(std::size_t bits_per_symbol, double symbol_energy) const
{
  return symbol_energy / std::pow(10.0, esn0_db(bits_per_symbol) / 10.0);
}

} // namespace cbf
