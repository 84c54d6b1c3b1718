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

#include "cbf/stbc.hpp"
#include "cbf/errors.hpp"

namespace cbf
{

stbc_codeword alamouti_encode(cd s1, cd s2)
{
  stbc_codeword c;
  c.matrix << s1, -std::conj(s2), s2, std::conj(s1);
  return c;
}

composite_channel make_composite_channel(cd g1, cd g2, cd h1, cd h2)
{
  const cd a = g1 * h1;
  const cd b = g2 * h2;
  composite_channel h;
  h.matrix << a, b, std::conj(b), -std::conj(a);
  return h;
}

std::pair<cd, cd> receive(const stbc_codeword& codeword, const stream_gains& gains, cd n1, cd n2)
{
  const cd a = gains.g1 * gains.h1;
  const cd b = gains.g2 * gains.h2;
  const auto& x = codeword.matrix;
  return {a * x(0, 0) + b * x(1, 0) + n1, a * x(0, 1) + b * x(1, 1) + n2};
}

std::pair<cd, cd> mmse_decode(std::pair<cd, cd> y, const composite_channel& channel, const noise_model& noise)
{
  if (noise.variance < 0.0)
    throw domain_error("noise variance must be non-negative");
  const matrix2c& h = channel.matrix;
  if (noise.variance == 0.0 && h.isZero(0.0))
    throw singularity_error("zero composite channel with zero noise variance");

  const vector2c stacked(y.first, std::conj(y.second));
  const matrix2c gram = h.adjoint() * h + noise.variance * matrix2c::Identity();
  const vector2c s = gram.partialPivLu().solve(h.adjoint() * stacked);
  return {s(0), s(1)};
}

std::pair<cd, cd> mmse_decode_orthogonal(std::pair<cd, cd> y, const composite_channel& channel, const noise_model& noise)
{
  if (noise.variance < 0.0)
    throw domain_error("noise variance must be non-negative");
  const double denom = channel.gain() + noise.variance;
  if (denom == 0.0)
    throw singularity_error("zero composite channel with zero noise variance");
  const vector2c stacked(y.first, std::conj(y.second));
  const vector2c s = channel.matrix.adjoint() * stacked / denom;
  return {s(0), s(1)};
}

beam_pattern fallback_pattern(const weight_vector& w1,
                              const weight_vector& w2,
                              const array_geometry& geometry,
                              const angle_grid& grid)
{
  if (geometry.num_subarrays() != 2 || !geometry.contiguous())
    throw domain_error("fallback pattern needs two contiguous sub-arrays");
  const std::size_t ns = geometry.elements_per_subarray();
  if (w1.size() != ns || w2.size() != ns)
    throw dimension_error("weight length does not match N_s");

  // Whole array as one sub-array; rescale its 1/sqrt(2 N_s) to 1/sqrt(N_s).
  const array_geometry whole(geometry.total_elements(), 1, geometry.spacing());
  const auto joined = w1.concat(w2);
  auto gains = array_gains(joined.entries(), whole, 0, grid);
  const double rescale = std::sqrt(2.0);
  for (auto& g : gains)
    g *= rescale;
  return beam_pattern{grid, std::move(gains), 1.0 / std::sqrt(static_cast<double>(ns))};
}

double codeword_energy_per_period(const stbc_codeword& codeword, double amplitude)
{
  return amplitude * amplitude * codeword.matrix.squaredNorm() / 2.0;
}

} // namespace cbf
