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

// Uniform linear array split into sub-arrays, each driven by one RF chain.
//
// Conventions used throughout the library:
//  - angles are radians, measured from broadside, visible region [-pi/2, pi/2];
//  - element n (0-based, global over the whole array) radiates with phase
//    exp(-j 2 pi d n sin(theta)), d = spacing in wavelengths, so element 0 of
//    the array is the phase reference;
//  - sub-array gains carry a 1/sqrt(N_s) factor, so one sub-array with
//    unit-modulus weights radiates unit mean power over the psi domain.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cbf
{

using cd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

class array_geometry
{
public:
  // Contiguous partition: sub-array m holds elements [m*N_s, (m+1)*N_s).
  array_geometry(std::size_t total_elements, std::size_t num_subarrays, double spacing = 0.5);

  // Arbitrary partition; partition[n] is the sub-array of element n and every
  // sub-array must receive exactly N/M elements.
  array_geometry(std::vector<std::size_t> partition, std::size_t num_subarrays, double spacing = 0.5);

  std::size_t total_elements() const noexcept { return partition_.size(); }
  std::size_t num_subarrays() const noexcept { return num_subarrays_; }
  std::size_t elements_per_subarray() const noexcept { return partition_.size() / num_subarrays_; }
  double spacing() const noexcept { return spacing_; }
  bool contiguous() const noexcept;

  std::size_t subarray_of(std::size_t element) const;

  // Global element indices of sub-array m, ascending.
  std::vector<std::size_t> elements_of(std::size_t subarray) const;

  bool operator==(const array_geometry&) const = default;

private:
  std::vector<std::size_t> partition_;
  std::size_t num_subarrays_;
  double spacing_;
};

class steering_vector
{
public:
  steering_vector(double angle, std::vector<cd> entries) : angle_(angle), entries_(std::move(entries)) {}

  double angle() const noexcept { return angle_; }
  std::span<const cd> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const cd& operator[](std::size_t n) const { return entries_[n]; }

private:
  double angle_;
  std::vector<cd> entries_;
};

// Analog phase-shifter weights; every entry has modulus one.
class weight_vector
{
public:
  weight_vector() = default;

  static weight_vector from_phases(std::span<const double> phases);

  // Entries must already be unit modulus (|w| - 1 within 1e-12).
  static weight_vector from_values(std::vector<cd> values);

  static weight_vector uniform(std::size_t n);

  std::span<const cd> entries() const noexcept { return entries_; }
  std::vector<double> phases() const;
  std::size_t size() const noexcept { return entries_.size(); }
  const cd& operator[](std::size_t n) const { return entries_[n]; }

  // [this; other]
  weight_vector concat(const weight_vector& other) const;

  bool operator==(const weight_vector&) const = default;

private:
  explicit weight_vector(std::vector<cd> entries) : entries_(std::move(entries)) {}
  std::vector<cd> entries_;
};

enum class grid_measure
{
  uniform_theta, // equal steps in theta over [-pi/2, pi/2)
  uniform_psi,   // equal steps in sin(theta) over [-1, 1)
  custom,
};

std::string_view to_string(grid_measure m);
grid_measure grid_measure_from_string(std::string_view s);

class angle_grid
{
public:
  static angle_grid uniform_theta(std::size_t points);
  static angle_grid uniform_psi(std::size_t points);

  // Strictly increasing angles inside [-pi/2, pi/2].
  static angle_grid from_points(std::vector<double> points);

  static angle_grid make(grid_measure measure, std::size_t points);

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  grid_measure measure() const noexcept { return measure_; }
  double operator[](std::size_t i) const { return points_[i]; }

  bool operator==(const angle_grid&) const = default;

private:
  angle_grid(std::vector<double> points, grid_measure measure);
  std::vector<double> points_;
  grid_measure measure_ = grid_measure::custom;
};

struct beam_pattern
{
  angle_grid grid;
  std::vector<cd> gains;
  double normalization = 1.0;

  std::vector<double> power() const;
};

struct composite_pattern
{
  std::vector<beam_pattern> members;
  std::vector<double> amplitude;
  double variance = 0.0;

  const angle_grid& grid() const { return members.front().grid; }
  std::vector<double> power() const;
};

steering_vector make_steering_vector(const array_geometry& geometry, std::size_t subarray, double angle);

beam_pattern make_beam_pattern(const weight_vector& w,
                               const array_geometry& geometry,
                               std::size_t subarray,
                               const angle_grid& grid);

// Gain of sub-array `subarray` toward one angle, same normalization as make_beam_pattern.
cd pattern_gain(const weight_vector& w, const array_geometry& geometry, std::size_t subarray, double angle);

// make_beam_pattern without the unit-modulus requirement on the coefficients.
// Linear in `coefficients`; used by tests and by callers that taper.
std::vector<cd> array_gains(std::span<const cd> coefficients,
                            const array_geometry& geometry,
                            std::size_t subarray,
                            const angle_grid& grid);

composite_pattern make_composite_pattern(std::vector<beam_pattern> patterns);

// Mean over grid points of (p - mean(p))^2 for the power samples p = |g|^2.
double pattern_variance(std::span<const double> power);
double pattern_variance(const beam_pattern& pattern, const angle_grid& grid);
double pattern_variance(const composite_pattern& pattern, const angle_grid& grid);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

} // namespace cbf
