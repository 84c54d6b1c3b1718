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

// Broadcast schemes and the Monte Carlo BER campaign.
//
// All three schemes radiate unit energy per symbol period:
//  - single: one isotropic element at full power;
//  - cbf:    two sub-arrays, Alamouti streams at 1/sqrt(2) amplitude each,
//            complementary weights with the 1/sqrt(N_s) element normalization;
//  - rbf:    one stream over the whole N-element array with a fresh random
//            unit-modulus weight vector per pattern block, 1/sqrt(N) per element.

#pragma once

#include "cbf/beam_search.hpp"
#include "cbf/channel.hpp"
#include "cbf/stbc.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

namespace cbf
{

enum class scheme_kind
{
  cbf,
  rbf,
  single,
};

std::string_view to_string(scheme_kind k);
scheme_kind scheme_kind_from_string(std::string_view s);

struct scheme_config
{
  scheme_kind kind = scheme_kind::cbf;
  array_geometry geometry{8, 2, 0.5};
  std::optional<complementary_beam_set> beams; // cbf only
  std::size_t rbf_block_length = 2;            // symbols per random pattern

  void validate() const;
};

struct sim_config
{
  scheme_config scheme;
  channel_kind channel = channel_kind::awgn;
  bool equal_subarrays = true; // h1 = h2 in Rayleigh fading
  std::size_t fading_block = default_fading_block;
  std::vector<double> angles;  // radians
  std::vector<snr_point> snr_grid;
  std::uint64_t min_bits = 1'000'000;
  std::uint64_t max_errors = 200;
  std::uint64_t max_bits = 0; // 0 means 10 * min_bits
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  void validate() const;
  std::uint64_t bit_cap() const { return max_bits == 0 ? 10 * min_bits : max_bits; }
};

struct ber_point
{
  double angle = 0.0; // radians
  double ebn0_db = 0.0;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;

  double ber() const { return bits == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(bits); }
  // 95% normal-approximation half-width
  double ci95() const;
};

struct ber_curve
{
  scheme_kind scheme = scheme_kind::cbf;
  channel_kind channel = channel_kind::awgn;
  std::vector<ber_point> points; // angle-major, then SNR

  const ber_point& at(std::size_t angle_index, std::size_t snr_index, std::size_t num_snr) const
  {
    return points.at(angle_index * num_snr + snr_index);
  }
};

// Accumulates radiated energy (sum over elements of |drive|^2) per symbol period.
struct energy_meter
{
  double energy = 0.0;
  std::uint64_t periods = 0;

  double mean() const { return periods == 0 ? 0.0 : energy / static_cast<double>(periods); }
};

// Output of a transmit step: one received sample per symbol period plus the
// effective gains the receiver is assumed to know.
struct received_frame
{
  std::vector<cd> samples;
  std::vector<stream_gains> codeword_gains; // cbf, one per codeword
  std::vector<cd> scalar_gains;             // rbf / single, one per symbol
};

// Beam gains g1, g2 of a complementary pair toward `angle`.
std::pair<cd, cd> cbf_beam_gains(const complementary_beam_set& beams, double angle);

// `fading` holds consecutive blocks, each covering block_length symbols, and
// must cover the whole frame.
received_frame transmit_cbf(const symbol_frame& frame,
                            const complementary_beam_set& beams,
                            double angle,
                            std::span<const channel_realization> fading,
                            double noise_variance,
                            rng_t& rng,
                            energy_meter* meter = nullptr);

received_frame transmit_rbf(const symbol_frame& frame,
                            const array_geometry& geometry,
                            double angle,
                            std::span<const channel_realization> fading,
                            double noise_variance,
                            std::size_t block_length,
                            rng_t& rng,
                            energy_meter* meter = nullptr);

received_frame transmit_single(const symbol_frame& frame,
                               std::span<const channel_realization> fading,
                               double noise_variance,
                               rng_t& rng,
                               energy_meter* meter = nullptr);

// Soft symbol estimates: Alamouti MMSE for cbf frames, scalar MMSE otherwise.
std::vector<cd> detect(const received_frame& rx, double noise_variance);

ber_curve run_ber(const sim_config& config);

// Default observation angles in radians: 0, +-asin(1/4), +-30, +-60, +-85 degrees.
std::vector<double> default_angles();

// Header: scheme,channel,angle_deg,ebn0_db,bits,errors,ber,ci95
void write_ber_csv(const ber_curve& curve, std::ostream& out);

} // namespace cbf
