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

#include "cbf/simulation.hpp"
#include "cbf/errors.hpp"
#include "cbf/text.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace cbf
{

std::string_view to_string(scheme_kind k)
{
  switch (k)
  {
  case scheme_kind::cbf:
    return "cbf";
  case scheme_kind::rbf:
    return "rbf";
  case scheme_kind::single:
    return "single";
  }
  return "cbf";
}

scheme_kind scheme_kind_from_string(std::string_view s)
{
  if (s == "cbf")
    return scheme_kind::cbf;
  if (s == "rbf")
    return scheme_kind::rbf;
  if (s == "single")
    return scheme_kind::single;
  throw parse_error("unknown scheme '" + std::string(s) + "'");
}

void scheme_config::validate() const
{
  switch (kind)
  {
  case scheme_kind::cbf:
    if (geometry.num_subarrays() != 2)
      throw domain_error("cbf needs exactly two sub-arrays");
    if (!beams)
      throw domain_error("cbf needs a complementary beam set");
    if (beams->weights.size() != 2 || beams->subarrays != std::vector<std::size_t>{0, 1})
      throw domain_error("cbf beam set must be a pair driving sub-arrays 0 and 1");
    if (beams->geometry != geometry)
      throw domain_error("beam set was designed for a different array geometry");
    break;
  case scheme_kind::rbf:
    if (rbf_block_length < 2 || rbf_block_length % 2 != 0)
      throw domain_error("rbf block length must be even and at least 2");
    break;
  case scheme_kind::single:
    break;
  }
}

void sim_config::validate() const
{
  scheme.validate();
  if (angles.empty() || snr_grid.empty())
    throw domain_error("BER campaign needs at least one angle and one SNR point");
  for (double a : angles)
    if (!(std::abs(a) <= pi / 2))
      throw domain_error("observation angle outside the ULA visible region");
  if (min_bits < 10'000)
    throw domain_error("min_bits must be at least 10^4");
  if (max_bits != 0 && max_bits < min_bits)
    throw domain_error("max_bits must not be below min_bits");
  if (fading_block == 0 || fading_block % 2 != 0)
    throw domain_error("fading block must hold whole Alamouti codewords");
}

double ber_point::ci95() const
{
  if (bits == 0)
    return 0.0;
  const double p = ber();
  return 1.959963984540054 * std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
}

namespace
{

const channel_realization& block_at(std::span<const channel_realization> fading, std::size_t symbol)
{
  if (fading.empty())
    throw domain_error("no channel realizations supplied");
  const std::size_t len = fading.front().block_length;
  const std::size_t b = symbol / len;
  if (b >= fading.size())
    throw domain_error("channel realizations do not cover the frame");
  return fading[b];
}

double weight_energy(const weight_vector& w)
{
  double e = 0.0;
  for (const auto& v : w.entries())
    e += std::norm(v);
  return e / static_cast<double>(w.size());
}

} // namespace

std::pair<cd, cd> cbf_beam_gains(const complementary_beam_set& beams, double angle)
{
  if (beams.weights.size() != 2)
    throw domain_error("cbf needs a pair of beams");
  return {pattern_gain(beams.weights[0], beams.geometry, beams.subarrays[0], angle),
          pattern_gain(beams.weights[1], beams.geometry, beams.subarrays[1], angle)};
}

received_frame transmit_cbf(const symbol_frame& frame,
                            const complementary_beam_set& beams,
                            double angle,
                            std::span<const channel_realization> fading,
                            double noise_variance,
                            rng_t& rng,
                            energy_meter* meter)
{
  if (frame.symbols.size() % 2 != 0)
    throw domain_error("cbf frames carry whole Alamouti codewords (even symbol count)");
  const auto [g1, g2] = cbf_beam_gains(beams, angle);
  const double e1 = weight_energy(beams.weights[0]);
  const double e2 = weight_energy(beams.weights[1]);

  received_frame rx;
  rx.samples.resize(frame.symbols.size());
  rx.codeword_gains.reserve(frame.symbols.size() / 2);
  for (std::size_t k = 0; k + 1 < frame.symbols.size(); k += 2)
  {
    const auto& h = block_at(fading, k);
    if (&block_at(fading, k + 1) != &h)
      throw domain_error("fading block boundary splits an Alamouti codeword");
    const stream_gains gains{stream_amplitude * g1, stream_amplitude * g2, h.h1, h.h2};
    const auto code = alamouti_encode(frame.symbols[k], frame.symbols[k + 1]);
    const auto [y1, y2] = receive(code, gains, {}, {});
    rx.samples[k] = y1;
    rx.samples[k + 1] = y2;
    rx.codeword_gains.push_back(gains);
    if (meter)
    {
      const double a2 = stream_amplitude * stream_amplitude;
      for (int t = 0; t < 2; ++t)
        meter->energy += a2 * (std::norm(code.matrix(0, t)) * e1 + std::norm(code.matrix(1, t)) * e2);
      meter->periods += 2;
    }
  }
  awgn(rx.samples, noise_variance, rng);
  return rx;
}

received_frame transmit_rbf(const symbol_frame& frame,
                            const array_geometry& geometry,
                            double angle,
                            std::span<const channel_realization> fading,
                            double noise_variance,
                            std::size_t block_length,
                            rng_t& rng,
                            energy_meter* meter)
{
  if (block_length == 0)
    throw domain_error("rbf block length must be positive");
  const array_geometry whole(geometry.total_elements(), 1, geometry.spacing());

  received_frame rx;
  rx.samples.resize(frame.symbols.size());
  rx.scalar_gains.resize(frame.symbols.size());
  cd g{0.0, 0.0};
  double e = 0.0;
  for (std::size_t k = 0; k < frame.symbols.size(); ++k)
  {
    if (k % block_length == 0)
    {
      const auto w = random_beam(whole.total_elements(), rng);
      g = pattern_gain(w, whole, 0, angle);
      e = weight_energy(w);
    }
    const cd c = g * block_at(fading, k).h1;
    rx.scalar_gains[k] = c;
    rx.samples[k] = c * frame.symbols[k];
    if (meter)
    {
      meter->energy += e * std::norm(frame.symbols[k]);
      meter->periods += 1;
    }
  }
  awgn(rx.samples, noise_variance, rng);
  return rx;
}

received_frame transmit_single(const symbol_frame& frame,
                               std::span<const channel_realization> fading,
                               double noise_variance,
                               rng_t& rng,
                               energy_meter* meter)
{
  received_frame rx;
  rx.samples.resize(frame.symbols.size());
  rx.scalar_gains.resize(frame.symbols.size());
  for (std::size_t k = 0; k < frame.symbols.size(); ++k)
  {
    const cd c = block_at(fading, k).h1;
    rx.scalar_gains[k] = c;
    rx.samples[k] = c * frame.symbols[k];
    if (meter)
    {
      meter->energy += std::norm(frame.symbols[k]);
      meter->periods += 1;
    }
  }
  awgn(rx.samples, noise_variance, rng);
  return rx;
}

std::vector<cd> detect(const received_frame& rx, double noise_variance)
{
  std::vector<cd> soft(rx.samples.size());
  if (!rx.codeword_gains.empty())
  {
    if (rx.codeword_gains.size() * 2 != rx.samples.size())
      throw dimension_error("codeword gains do not match the received samples");
    const noise_model noise{noise_variance};
    for (std::size_t c = 0; c < rx.codeword_gains.size(); ++c)
    {
      const auto h = make_composite_channel(rx.codeword_gains[c]);
      const auto [s1, s2] = mmse_decode({rx.samples[2 * c], rx.samples[2 * c + 1]}, h, noise);
      soft[2 * c] = s1;
      soft[2 * c + 1] = s2;
    }
    return soft;
  }
  if (rx.scalar_gains.size() != rx.samples.size())
    throw dimension_error("scalar gains do not match the received samples");
  for (std::size_t k = 0; k < soft.size(); ++k)
  {
    const cd c = rx.scalar_gains[k];
    const double denom = std::norm(c) + noise_variance;
    soft[k] = denom > 0.0 ? std::conj(c) * rx.samples[k] / denom : cd{0.0, 0.0};
  }
  return soft;
}

namespace
{

constexpr std::size_t chunk_symbols = 16384;

struct chunk_counts
{
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
};

chunk_counts run_chunk(const sim_config& cfg, double angle, double sigma2, rng_t rng)
{
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<std::uint8_t> bits(chunk_symbols * qpsk_bits_per_symbol);
  for (auto& b : bits)
    b = static_cast<std::uint8_t>(coin(rng));
  const auto frame = qpsk_modulate(bits);

  const std::size_t blocks = (chunk_symbols + cfg.fading_block - 1) / cfg.fading_block;
  std::vector<channel_realization> fading;
  fading.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b)
    fading.push_back(draw_realization(cfg.channel, cfg.equal_subarrays, rng, cfg.fading_block));

  received_frame rx;
  switch (cfg.scheme.kind)
  {
  case scheme_kind::cbf:
    rx = transmit_cbf(frame, *cfg.scheme.beams, angle, fading, sigma2, rng);
    break;
  case scheme_kind::rbf:
    rx = transmit_rbf(frame, cfg.scheme.geometry, angle, fading, sigma2, cfg.scheme.rbf_block_length, rng);
    break;
  case scheme_kind::single:
    rx = transmit_single(frame, fading, sigma2, rng);
    break;
  }

  std::vector<std::uint8_t> decided;
  qpsk_demodulate(detect(rx, sigma2), decided);
  chunk_counts out;
  out.bits = bits.size();
  for (std::size_t i = 0; i < bits.size(); ++i)
    out.errors += bits[i] != decided[i];
  return out;
}

} // namespace

ber_curve run_ber(const sim_config& config)
{
  config.validate();
  ber_curve curve;
  curve.scheme = config.scheme.kind;
  curve.channel = config.channel;

  const std::size_t workers = std::max<std::size_t>(1, config.workers);
  const std::uint64_t cap = config.bit_cap();

  for (std::size_t a = 0; a < config.angles.size(); ++a)
  {
    for (std::size_t s = 0; s < config.snr_grid.size(); ++s)
    {
      const double angle = config.angles[a];
      const double sigma2 = config.snr_grid[s].noise_variance();
      ber_point point{angle, config.snr_grid[s].ebn0_db, 0, 0};

      // Chunks are computed in rounds of `workers` but folded strictly in
      // chunk order, and the stopping rule is checked after every chunk, so
      // the counts do not depend on the worker count.
      std::uint64_t next_chunk = 0;
      bool done = false;
      while (!done)
      {
        std::vector<chunk_counts> round(workers);
        auto job = [&](std::size_t w) {
          round[w] = run_chunk(config, angle, sigma2, make_stream(config.seed, {a, s, next_chunk + w}));
        };
        if (workers == 1)
          job(0);
        else
        {
          std::vector<std::thread> pool;
          for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(job, w);
          for (auto& t : pool)
            t.join();
        }
        for (const auto& c : round)
        {
          point.bits += c.bits;
          point.errors += c.errors;
          if (point.bits >= config.min_bits && (point.errors >= config.max_errors || point.bits >= cap))
          {
            done = true;
            break;
          }
        }
        next_chunk += workers;
      }
      curve.points.push_back(point);
    }
  }
  return curve;
}

std::vector<double> default_angles()
{
  const double null_deg = rad_to_deg(std::asin(0.25));
  std::vector<double> deg{-85.0, -60.0, -30.0, -null_deg, 0.0, null_deg, 30.0, 60.0, 85.0};
  std::vector<double> out;
  for (double d : deg)
    out.push_back(deg_to_rad(d));
  return out;
}

void write_ber_csv(const ber_curve& curve, std::ostream& out)
{
  out << "scheme,channel,angle_deg,ebn0_db,bits,errors,ber,ci95\n";
  for (const auto& p : curve.points)
  {
    out << to_string(curve.scheme) << ',' << to_string(curve.channel) << ',' << format_number(rad_to_deg(p.angle)) << ','
        << format_number(p.ebn0_db) << ',' << p.bits << ',' << p.errors << ',' << format_number(p.ber()) << ','
        << format_number(p.ci95()) << '\n';
  }
}

} // namespace cbf
