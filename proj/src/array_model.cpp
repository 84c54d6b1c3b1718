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

#include "cbf/array_model.hpp"
#include "cbf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cbf
{

namespace
{

constexpr double unit_modulus_tol = 1e-12;

void check_angle(double angle)
{
  if (!(std::abs(angle) <= pi / 2))
    throw domain_error("angle " + std::to_string(angle) + " rad lies outside the ULA visible region [-pi/2, pi/2]");
}

void check_subarray(const array_geometry& geometry, std::size_t subarray)
{
  if (subarray >= geometry.num_subarrays())
    throw domain_error("sub-array index " + std::to_string(subarray) + " out of range (M = " +
                       std::to_string(geometry.num_subarrays()) + ")");
}

// exp(-j 2 pi d n sin(theta)) for each listed element
void fill_steering(std::span<const std::size_t> elements, double spacing, double angle, std::span<cd> out)
{
  const double step = 2.0 * pi * spacing * std::sin(angle);
  for (std::size_t k = 0; k < elements.size(); ++k)
    out[k] = std::polar(1.0, -step * static_cast<double>(elements[k]));
}

} // namespace

// ---------------------------------------------------------------- geometry

array_geometry::array_geometry(std::size_t total_elements, std::size_t num_subarrays, double spacing)
    : num_subarrays_(num_subarrays), spacing_(spacing)
{
  if (total_elements == 0 || num_subarrays == 0)
    throw domain_error("array needs at least one element and one sub-array");
  if (total_elements % num_subarrays != 0)
    throw domain_error("N = " + std::to_string(total_elements) + " is not divisible by M = " + std::to_string(num_subarrays));
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw domain_error("element spacing must be positive");

  const std::size_t ns = total_elements / num_subarrays;
  partition_.resize(total_elements);
  for (std::size_t n = 0; n < total_elements; ++n)
    partition_[n] = n / ns;
}

array_geometry::array_geometry(std::vector<std::size_t> partition, std::size_t num_subarrays, double spacing)
    : partition_(std::move(partition)), num_subarrays_(num_subarrays), spacing_(spacing)
{
  if (partition_.empty() || num_subarrays == 0)
    throw domain_error("array needs at least one element and one sub-array");
  if (partition_.size() % num_subarrays != 0)
    throw domain_error("N is not divisible by M");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw domain_error("element spacing must be positive");

  std::vector<std::size_t> count(num_subarrays, 0);
  for (auto m : partition_)
  {
    if (m >= num_subarrays)
      throw domain_error("partition references sub-array " + std::to_string(m));
    ++count[m];
  }
  const std::size_t ns = partition_.size() / num_subarrays;
  if (std::any_of(count.begin(), count.end(), [ns](std::size_t c) { return c != ns; }))
    throw domain_error("every sub-array must hold exactly N/M elements");
}

bool array_geometry::contiguous() const noexcept
{
  const std::size_t ns = elements_per_subarray();
  for (std::size_t n = 0; n < partition_.size(); ++n)
    if (partition_[n] != n / ns)
      return false;
  return true;
}

std::size_t array_geometry::subarray_of(std::size_t element) const
{
  if (element >= partition_.size())
    throw domain_error("element index out of range");
  return partition_[element];
}

std::vector<std::size_t> array_geometry::elements_of(std::size_t subarray) const
{
  check_subarray(*this, subarray);
  std::vector<std::size_t> out;
  out.reserve(elements_per_subarray());
  for (std::size_t n = 0; n < partition_.size(); ++n)
    if (partition_[n] == subarray)
      out.push_back(n);
  return out;
}

// ---------------------------------------------------------------- weights

weight_vector weight_vector::from_phases(std::span<const double> phases)
{
  std::vector<cd> v(phases.size());
  std::transform(phases.begin(), phases.end(), v.begin(), [](double p) { return std::polar(1.0, p); });
  return weight_vector(std::move(v));
}

weight_vector weight_vector::from_values(std::vector<cd> values)
{
  for (const auto& v : values)
    if (!(std::abs(std::abs(v) - 1.0) <= unit_modulus_tol))
      throw domain_error("weight entries must have unit modulus");
  return weight_vector(std::move(values));
}

weight_vector weight_vector::uniform(std::size_t n) { return weight_vector(std::vector<cd>(n, cd{1.0, 0.0})); }

std::vector<double> weight_vector::phases() const
{
  std::vector<double> p(entries_.size());
  std::transform(entries_.begin(), entries_.end(), p.begin(), [](const cd& v) { return std::arg(v); });
  return p;
}

weight_vector weight_vector::concat(const weight_vector& other) const
{
  std::vector<cd> v(entries_);
  v.insert(v.end(), other.entries_.begin(), other.entries_.end());
  return weight_vector(std::move(v));
}

// ---------------------------------------------------------------- grids

std::string_view to_string(grid_measure m)
{
  switch (m)
  {
  case grid_measure::uniform_theta:
    return "uniform-theta";
  case grid_measure::uniform_psi:
    return "uniform-psi";
  case grid_measure::custom:
    return "custom";
  }
  return "custom";
}

grid_measure grid_measure_from_string(std::string_view s)
{
  if (s == "uniform-theta" || s == "theta")
    return grid_measure::uniform_theta;
  if (s == "uniform-psi" || s == "psi")
    return grid_measure::uniform_psi;
  if (s == "custom")
    return grid_measure::custom;
  throw parse_error("unknown grid measure '" + std::string(s) + "'");
}

angle_grid::angle_grid(std::vector<double> points, grid_measure measure)
    : points_(std::move(points)), measure_(measure)
{
  if (points_.size() < 2)
    throw domain_error("angle grid needs at least two points");
  for (std::size_t i = 0; i < points_.size(); ++i)
  {
    check_angle(points_[i]);
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw domain_error("angle grid points must be strictly increasing");
  }
}

angle_grid angle_grid::uniform_theta(std::size_t points)
{
  std::vector<double> p(points);
  for (std::size_t i = 0; i < points; ++i)
    p[i] = -pi / 2 + pi * static_cast<double>(i) / static_cast<double>(points);
  return angle_grid(std::move(p), grid_measure::uniform_theta);
}

angle_grid angle_grid::uniform_psi(std::size_t points)
{
  std::vector<double> p(points);
  for (std::size_t i = 0; i < points; ++i)
    p[i] = std::asin(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points));
  return angle_grid(std::move(p), grid_measure::uniform_psi);
}

angle_grid angle_grid::from_points(std::vector<double> points) { return angle_grid(std::move(points), grid_measure::custom); }

angle_grid angle_grid::make(grid_measure measure, std::size_t points)
{
  switch (measure)
  {
  case grid_measure::uniform_theta:
    return uniform_theta(points);
  case grid_measure::uniform_psi:
    return uniform_psi(points);
  case grid_measure::custom:
    break;
  }
  throw domain_error("custom grids must be built from explicit points");
}

// ---------------------------------------------------------------- patterns

std::vector<double> beam_pattern::power() const
{
  std::vector<double> p(gains.size());
  std::transform(gains.begin(), gains.end(), p.begin(), [](const cd& g) { return std::norm(g); });
  return p;
}

std::vector<double> composite_pattern::power() const
{
  std::vector<double> p(amplitude.size());
  std::transform(amplitude.begin(), amplitude.end(), p.begin(), [](double a) { return a * a; });
  return p;
}

steering_vector make_steering_vector(const array_geometry& geometry, std::size_t subarray, double angle)
{
  check_subarray(geometry, subarray);
  check_angle(angle);
  const auto elements = geometry.elements_of(subarray);
  std::vector<cd> entries(elements.size());
  fill_steering(elements, geometry.spacing(), angle, entries);
  return steering_vector(angle, std::move(entries));
}

std::vector<cd> array_gains(std::span<const cd> coefficients,
                            const array_geometry& geometry,
                            std::size_t subarray,
                            const angle_grid& grid)
{
  check_subarray(geometry, subarray);
  const std::size_t ns = geometry.elements_per_subarray();
  if (coefficients.size() != ns)
    throw dimension_error("weight length " + std::to_string(coefficients.size()) + " does not match N_s = " + std::to_string(ns));

  const auto elements = geometry.elements_of(subarray);
  const double scale = 1.0 / std::sqrt(static_cast<double>(ns));
  std::vector<cd> a(ns);
  std::vector<cd> gains(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
  {
    fill_steering(elements, geometry.spacing(), grid[i], a);
    cd acc{0.0, 0.0};
    for (std::size_t n = 0; n < ns; ++n)
      acc += coefficients[n] * a[n];
    gains[i] = scale * acc;
  }
  return gains;
}

beam_pattern make_beam_pattern(const weight_vector& w,
                               const array_geometry& geometry,
                               std::size_t subarray,
                               const angle_grid& grid)
{
  beam_pattern out{grid, array_gains(w.entries(), geometry, subarray, grid), 0.0};
  out.normalization = 1.0 / std::sqrt(static_cast<double>(w.size()));
  return out;
}

cd pattern_gain(const weight_vector& w, const array_geometry& geometry, std::size_t subarray, double angle)
{
  const auto a = make_steering_vector(geometry, subarray, angle);
  if (a.size() != w.size())
    throw dimension_error("weight length does not match N_s");
  cd acc{0.0, 0.0};
  for (std::size_t n = 0; n < w.size(); ++n)
    acc += w[n] * a[n];
  return acc / std::sqrt(static_cast<double>(w.size()));
}

composite_pattern make_composite_pattern(std::vector<beam_pattern> patterns)
{
  if (patterns.empty())
    throw domain_error("composite pattern needs at least one member");
  const auto& grid = patterns.front().grid;
  for (const auto& p : patterns)
    if (p.grid != grid || p.gains.size() != grid.size())
      throw dimension_error("composite members must share one angle grid");

  composite_pattern out;
  out.amplitude.assign(grid.size(), 0.0);
  const double inv_m = 1.0 / static_cast<double>(patterns.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
  {
    double acc = 0.0;
    for (const auto& p : patterns)
      acc += std::norm(p.gains[i]);
    out.amplitude[i] = std::sqrt(acc * inv_m);
  }
  out.members = std::move(patterns);
  out.variance = pattern_variance(out, out.grid());
  return out;
}

double pattern_variance(std::span<const double> power)
{
  if (power.empty())
    throw dimension_error("empty pattern");
  const double n = static_cast<double>(power.size());
  double mean = 0.0;
  for (double p : power)
    mean += p;
  mean /= n;
  double acc = 0.0;
  for (double p : power)
    acc += (p - mean) * (p - mean);
  return acc / n;
}

double pattern_variance(const beam_pattern& pattern, const angle_grid& grid)
{
  if (pattern.grid != grid)
    throw dimension_error("pattern was sampled on a different grid");
  return pattern_variance(pattern.power());
}

double pattern_variance(const composite_pattern& pattern, const angle_grid& grid)
{
  if (pattern.members.empty() || pattern.grid() != grid || pattern.amplitude.size() != grid.size())
    throw dimension_error("pattern was sampled on a different grid");
  return pattern_variance(pattern.power());
}

double deg_to_rad(double deg) { return deg * pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / pi; }

} // namespace cbf
