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

// Search for sets of sub-array weight vectors whose power patterns add up to
// an isotropic composite (minimum angular variance of the mean power pattern).

#pragma once

#include "cbf/array_model.hpp"
#include "cbf/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbf
{

// Uniform K-level phase quantizer {exp(j 2 pi k / K)}, k = 0..K-1.
class phase_codebook
{
public:
  explicit phase_codebook(std::size_t accuracy);

  std::size_t accuracy() const noexcept { return coefficients_.size(); }
  double step() const noexcept { return 2.0 * pi / static_cast<double>(coefficients_.size()); }
  std::span<const cd> coefficients() const noexcept { return coefficients_; }
  const cd& operator[](std::size_t k) const { return coefficients_.at(k); }

  weight_vector weights(std::span<const std::size_t> indices) const;

private:
  std::vector<cd> coefficients_;
};

enum class search_method
{
  exhaustive,
  golay,
  stochastic,
};

std::string_view to_string(search_method m);
search_method search_method_from_string(std::string_view s);

struct search_options
{
  // Exhaustive search refuses instances with more candidate sets than this.
  std::uint64_t candidate_ceiling = 10'000'000;
  // Candidate evaluations for the stochastic method (split over workers).
  std::uint64_t budget = 100'000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct search_meta
{
  search_method method = search_method::exhaustive;
  std::uint64_t candidates_evaluated = 0;
  std::uint64_t seed = 0;
};

struct complementary_beam_set
{
  array_geometry geometry{1, 1};
  std::vector<std::size_t> subarrays; // which sub-array each weight drives
  std::size_t accuracy = 1;           // codebook size the phase indices refer to
  std::vector<std::vector<std::size_t>> phase_indices;
  std::vector<weight_vector> weights;
  double variance = 0.0;
  angle_grid grid = angle_grid::uniform_theta(512);
  search_meta meta;

  std::vector<beam_pattern> patterns(const angle_grid& on) const;
  composite_pattern composite(const angle_grid& on) const;
  composite_pattern composite() const { return composite(grid); }
};

// Variances below this are treated as exact zeros when ranking candidates, so
// zero-variance optima tie and the lexicographically first one is returned.
inline constexpr double zero_variance_tol = 1e-13;

complementary_beam_set find_complementary_pair(const array_geometry& geometry,
                                               const phase_codebook& codebook,
                                               const angle_grid& grid,
                                               search_method method,
                                               const search_options& options = {});

complementary_beam_set find_complementary_triple(const array_geometry& geometry,
                                                 const phase_codebook& codebook,
                                                 const angle_grid& grid,
                                                 search_method method,
                                                 const search_options& options = {});

// Search over an arbitrary group of sub-arrays (two or three members); used for
// the grouped configurations produced by group_rf_chains.
complementary_beam_set find_complementary_set(const array_geometry& geometry,
                                              std::span<const std::size_t> subarrays,
                                              const phase_codebook& codebook,
                                              const angle_grid& grid,
                                              search_method method,
                                              const search_options& options = {});

// Binary Golay complementary pair of a power-of-two length.
std::pair<weight_vector, weight_vector> golay_construct(std::size_t length);

// Partition of RF chains 0..M-1 into consecutive pairs, the last three forming
// a triple when M is odd.
std::vector<std::vector<std::size_t>> group_rf_chains(std::size_t num_chains);

// Unit-modulus vector with i.i.d. phases uniform on [0, 2 pi).
weight_vector random_beam(std::size_t n, rng_t& rng);

std::string beam_set_to_json(const complementary_beam_set& set);
complementary_beam_set beam_set_from_json(std::string_view text);

} // namespace cbf
