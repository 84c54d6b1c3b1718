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

// Alamouti coding across two sub-array streams.
//
// Sub-array m reaches the receiver through beam gain g_m(theta) and channel
// h_m. Over two symbol periods the receiver sees
//
//   y1 =  g1 h1 s1  + g2 h2 s2  + n1
//   y2 = -g1 h1 s2* + g2 h2 s1* + n2
//
// which, stacked as [y1, y2*], is y = H s + n with orthogonal H.

#pragma once

#include "cbf/array_model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace cbf
{

using matrix2c = Eigen::Matrix2cd;
using vector2c = Eigen::Vector2cd;

// Amplitude applied to each of the two streams so both together radiate the
// power of a single full-power antenna.
inline const double stream_amplitude = 1.0 / std::sqrt(2.0);

// Rows are sub-arrays, columns are consecutive symbol periods.
struct stbc_codeword
{
  matrix2c matrix;

  cd s1() const { return matrix(0, 0); }
  cd s2() const { return matrix(1, 0); }
};

// g_m and h_m of both streams; g already includes any power split.
struct stream_gains
{
  cd g1{1.0, 0.0};
  cd g2{1.0, 0.0};
  cd h1{1.0, 0.0};
  cd h2{1.0, 0.0};
};

struct composite_channel
{
  matrix2c matrix;

  // |g1 h1|^2 + |g2 h2|^2, the common diagonal of H^H H
  double gain() const { return matrix.col(0).squaredNorm(); }
};

struct noise_model
{
  double variance = 0.0; // sigma^2 per complex sample
};

stbc_codeword alamouti_encode(cd s1, cd s2);

composite_channel make_composite_channel(cd g1, cd g2, cd h1, cd h2);
inline composite_channel make_composite_channel(const stream_gains& s)
{
  return make_composite_channel(s.g1, s.g2, s.h1, s.h2);
}

// (y1, y2) for the two symbol periods of one codeword.
std::pair<cd, cd> receive(const stbc_codeword& codeword, const stream_gains& gains, cd n1, cd n2);

// Linear MMSE estimate (H^H H + sigma^2 I)^-1 H^H [y1, y2*]. With zero noise
// variance this is zero forcing. Throws singularity_error if H = 0 and sigma^2 = 0.
std::pair<cd, cd> mmse_decode(std::pair<cd, cd> y, const composite_channel& channel, const noise_model& noise);

// Same estimate through the orthogonal-design shortcut H^H y / (rho + sigma^2).
std::pair<cd, cd> mmse_decode_orthogonal(std::pair<cd, cd> y, const composite_channel& channel, const noise_model& noise);

// Pattern radiated when both sub-arrays carry the same symbol: the full-array
// pattern of [w1; w2], using the sub-array 1/sqrt(N_s) normalization so it
// equals g1(theta) + g2(theta) pointwise.
beam_pattern fallback_pattern(const weight_vector& w1,
                              const weight_vector& w2,
                              const array_geometry& geometry,
                              const angle_grid& grid);

// Energy radiated per symbol period by the codeword when each stream is
// scaled by `amplitude`: amplitude^2 (|s1|^2 + |s2|^2).
double codeword_energy_per_period(const stbc_codeword& codeword, double amplitude = stream_amplitude);

} // namespace cbf
