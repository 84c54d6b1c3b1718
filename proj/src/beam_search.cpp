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

#include "cbf/beam_search.hpp"
#include "cbf/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace cbf
{

// ---------------------------------------------------------------- codebook

phase_codebook::phase_codebook(std::size_t accuracy)
{
  if (accuracy == 0)
    throw domain_error("phase codebook accuracy K must be at least 1");
  coefficients_.resize(accuracy);
  for (std::size_t k = 0; k < accuracy; ++k)
  {
    // quarter turns are written exactly so binary/quaternary codebooks hold {+-1, +-j}
    if ((4 * k) % accuracy == 0)
    {
      static constexpr cd quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      coefficients_[k] = quarter[(4 * k) / accuracy];
    }
    else
      coefficients_[k] = std::polar(1.0, 2.0 * pi * static_cast<double>(k) / static_cast<double>(accuracy));
  }
}

weight_vector phase_codebook::weights(std::span<const std::size_t> indices) const
{
  std::vector<cd> v(indices.size());
  for (std::size_t n = 0; n < indices.size(); ++n)
    v[n] = coefficients_.at(indices[n]);
  return weight_vector::from_values(std::move(v));
}

std::string_view to_string(search_method m)
{
  switch (m)
  {
  case search_method::exhaustive:
    return "exhaustive";
  case search_method::golay:
    return "golay";
  case search_method::stochastic:
    return "stochastic";
  }
  return "exhaustive";
}

search_method search_method_from_string(std::string_view s)
{
  if (s == "exhaustive")
    return search_method::exhaustive;
  if (s == "golay")
    return search_method::golay;
  if (s == "stochastic")
    return search_method::stochastic;
  throw parse_error("unknown search method '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- beam set

std::vector<beam_pattern> complementary_beam_set::patterns(const angle_grid& on) const
{
  std::vector<beam_pattern> out;
  out.reserve(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k)
    out.push_back(make_beam_pattern(weights[k], geometry, subarrays[k], on));
  return out;
}

composite_pattern complementary_beam_set::composite(const angle_grid& on) const
{
  return make_composite_pattern(patterns(on));
}

namespace
{

double ranking_key(double variance) { return variance < zero_variance_tol ? 0.0 : variance; }

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp)
{
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i)
  {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

// Phase indices of candidate c: position 0 fixed to coefficient 0, positions
// 1..N_s-1 are the base-K digits of c, most significant first.
void decode_candidate(std::uint64_t c, std::size_t k, std::span<std::size_t> out)
{
  out[0] = 0;
  for (std::size_t n = out.size(); n-- > 1;)
  {
    out[n] = static_cast<std::size_t>(c % k);
    c /= k;
  }
}

// steer[n * G + i] = a_n(theta_i) / sqrt(N_s) for one sub-array
std::vector<cd> steering_table(const array_geometry& geometry, std::size_t subarray, const angle_grid& grid)
{
  const std::size_t ns = geometry.elements_per_subarray();
  const std::size_t g = grid.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(ns));
  const auto elements = geometry.elements_of(subarray);
  std::vector<cd> table(ns * g);
  for (std::size_t i = 0; i < g; ++i)
  {
    const double step = 2.0 * pi * geometry.spacing() * std::sin(grid[i]);
    for (std::size_t n = 0; n < ns; ++n)
      table[n * g + i] = scale * std::polar(1.0, -step * static_cast<double>(elements[n]));
  }
  return table;
}

void gains_from_indices(std::span<const cd> table,
                        const phase_codebook& codebook,
                        std::span<const std::size_t> indices,
                        std::span<cd> gains)
{
  const std::size_t g = gains.size();
  std::fill(gains.begin(), gains.end(), cd{0.0, 0.0});
  for (std::size_t n = 0; n < indices.size(); ++n)
  {
    const cd c = codebook[indices[n]];
    const cd* row = table.data() + n * g;
    for (std::size_t i = 0; i < g; ++i)
      gains[i] += c * row[i];
  }
}

complementary_beam_set finish(const array_geometry& geometry,
                              std::span<const std::size_t> subarrays,
                              std::size_t accuracy,
                              std::vector<std::vector<std::size_t>> indices,
                              std::vector<weight_vector> weights,
                              const angle_grid& grid,
                              search_meta meta)
{
  complementary_beam_set out;
  out.geometry = geometry;
  out.subarrays.assign(subarrays.begin(), subarrays.end());
  out.accuracy = accuracy;
  out.phase_indices = std::move(indices);
  out.weights = std::move(weights);
  out.grid = grid;
  out.meta = meta;
  out.variance = out.composite().variance;
  return out;
}

// ---------------------------------------------------------------- exhaustive

struct ranked
{
  double key = std::numeric_limits<double>::infinity();
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();

  bool better_than(const ranked& o) const { return key < o.key || (key == o.key && index < o.index); }
};

complementary_beam_set search_exhaustive(const array_geometry& geometry,
                                         std::span<const std::size_t> subarrays,
                                         const phase_codebook& codebook,
                                         const angle_grid& grid,
                                         const search_options& options)
{
  const std::size_t m = subarrays.size();
  const std::size_t ns = geometry.elements_per_subarray();
  const std::size_t k = codebook.accuracy();
  const std::size_t g = grid.size();

  const std::uint64_t per_member = saturating_pow(k, ns - 1);
  const std::uint64_t total = saturating_pow(per_member, m);
  if (total > options.candidate_ceiling)
    throw capacity_error("exhaustive search needs " + (total == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64") : std::to_string(total)) +
                             " candidate sets, above the ceiling of " + std::to_string(options.candidate_ceiling),
                         options.candidate_ceiling);

  // Power pattern and its mean for every candidate vector of every member.
  std::vector<std::vector<double>> power(m, std::vector<double>(per_member * g));
  std::vector<std::vector<double>> mean(m, std::vector<double>(per_member));
  {
    std::vector<std::size_t> idx(ns);
    std::vector<cd> gains(g);
    for (std::size_t mm = 0; mm < m; ++mm)
    {
      const auto table = steering_table(geometry, subarrays[mm], grid);
      for (std::uint64_t c = 0; c < per_member; ++c)
      {
        decode_candidate(c, k, idx);
        gains_from_indices(table, codebook, idx, gains);
        double acc = 0.0;
        double* p = power[mm].data() + c * g;
        for (std::size_t i = 0; i < g; ++i)
        {
          p[i] = std::norm(gains[i]);
          acc += p[i];
        }
        mean[mm][c] = acc / static_cast<double>(g);
      }
    }
  }

  const double inv_m = 1.0 / static_cast<double>(m);
  const double inv_g = 1.0 / static_cast<double>(g);
  const std::uint64_t inner = total / per_member;

  auto scan = [&](std::uint64_t first, std::uint64_t last) {
    ranked best;
    std::vector<std::uint64_t> digit(m, 0);
    for (std::uint64_t c0 = first; c0 < last; ++c0)
    {
      for (std::uint64_t t = 0; t < inner; ++t)
      {
        // odometer over members 1..m-1, member m-1 least significant
        std::uint64_t rest = t;
        digit[0] = c0;
        for (std::size_t mm = m; mm-- > 1;)
        {
          digit[mm] = rest % per_member;
          rest /= per_member;
        }
        double mu = 0.0;
        for (std::size_t mm = 0; mm < m; ++mm)
          mu += mean[mm][digit[mm]];
        mu *= inv_m;
        double acc = 0.0;
        for (std::size_t i = 0; i < g; ++i)
        {
          double s = 0.0;
          for (std::size_t mm = 0; mm < m; ++mm)
            s += power[mm][digit[mm] * g + i];
          const double d = s * inv_m - mu;
          acc += d * d;
        }
        const ranked cand{ranking_key(acc * inv_g), c0 * inner + t};
        if (cand.better_than(best))
          best = cand;
      }
    }
    return best;
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::uint64_t>(options.workers, per_member));
  std::vector<ranked> partial(workers);
  if (workers == 1)
    partial[0] = scan(0, per_member);
  else
  {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
    {
      const std::uint64_t first = per_member * w / workers;
      const std::uint64_t last = per_member * (w + 1) / workers;
      pool.emplace_back([&, w, first, last] { partial[w] = scan(first, last); });
    }
    for (auto& t : pool)
      t.join();
  }
  ranked best;
  for (const auto& p : partial)
    if (p.better_than(best))
      best = p;

  std::vector<std::vector<std::size_t>> indices(m, std::vector<std::size_t>(ns));
  std::vector<weight_vector> weights;
  std::uint64_t rest = best.index;
  for (std::size_t mm = m; mm-- > 0;)
  {
    decode_candidate(rest % per_member, k, indices[mm]);
    rest /= per_member;
  }
  for (const auto& idx : indices)
    weights.push_back(codebook.weights(idx));

  return finish(geometry, subarrays, k, std::move(indices), std::move(weights), grid,
                {search_method::exhaustive, total, options.seed});
}

// ---------------------------------------------------------------- stochastic

struct stochastic_result
{
  double key = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> flat; // member-major phase indices
  std::uint64_t evaluated = 0;

  bool better_than(const stochastic_result& o) const
  {
    return key < o.key || (key == o.key && (o.flat.empty() || flat < o.flat));
  }
};

// Random restarts followed by first-improvement single-coefficient moves.
// The trajectory does not depend on the budget, so a larger budget only
// extends the run and the best variance cannot get worse.
stochastic_result stochastic_worker(const std::vector<std::vector<cd>>& tables,
                                    const phase_codebook& codebook,
                                    std::size_t ns,
                                    std::size_t g,
                                    std::uint64_t budget,
                                    rng_t rng)
{
  const std::size_t m = tables.size();
  const std::size_t k = codebook.accuracy();
  const double inv_m = 1.0 / static_cast<double>(m);
  const double inv_g = 1.0 / static_cast<double>(g);

  std::vector<std::size_t> idx(m * ns, 0);
  std::vector<std::vector<cd>> gains(m, std::vector<cd>(g));
  std::vector<double> power_sum(g);
  std::vector<cd> trial(g);

  // variance of the composite when member `which` uses `alt` instead of its gains
  auto evaluate = [&](std::size_t which, const std::vector<cd>* alt) {
    double mu = 0.0;
    for (std::size_t i = 0; i < g; ++i)
    {
      double s = 0.0;
      for (std::size_t mm = 0; mm < m; ++mm)
        s += std::norm((alt && mm == which) ? (*alt)[i] : gains[mm][i]);
      power_sum[i] = s * inv_m;
      mu += power_sum[i];
    }
    mu *= inv_g;
    double acc = 0.0;
    for (std::size_t i = 0; i < g; ++i)
      acc += (power_sum[i] - mu) * (power_sum[i] - mu);
    return acc * inv_g;
  };

  stochastic_result best;
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::uint64_t used = 0;

  while (used < budget && best.key > 0.0)
  {
    for (std::size_t mm = 0; mm < m; ++mm)
    {
      idx[mm * ns] = 0;
      for (std::size_t n = 1; n < ns; ++n)
        idx[mm * ns + n] = pick(rng);
      gains_from_indices(tables[mm], codebook, std::span(idx).subspan(mm * ns, ns), gains[mm]);
    }
    double current = ranking_key(evaluate(0, nullptr));
    ++used;
    if (stochastic_result{current, idx}.better_than(best))
      best = {current, idx, 0};

    bool improved = true;
    while (improved && used < budget && current > 0.0)
    {
      improved = false;
      for (std::size_t mm = 0; mm < m && used < budget; ++mm)
      {
        for (std::size_t n = 1; n < ns && used < budget; ++n)
        {
          const std::size_t at = mm * ns + n;
          const cd* row = tables[mm].data() + n * g;
          for (std::size_t alt = 0; alt < k && used < budget; ++alt)
          {
            if (alt == idx[at])
              continue;
            const cd delta = codebook[alt] - codebook[idx[at]];
            for (std::size_t i = 0; i < g; ++i)
              trial[i] = gains[mm][i] + delta * row[i];
            const double v = ranking_key(evaluate(mm, &trial));
            ++used;
            if (v < current)
            {
              current = v;
              idx[at] = alt;
              gains[mm].swap(trial);
              improved = true;
              if (stochastic_result{current, idx}.better_than(best))
                best = {current, idx, 0};
            }
          }
        }
      }
    }
  }
  best.evaluated = used;
  return best;
}

complementary_beam_set search_stochastic(const array_geometry& geometry,
                                         std::span<const std::size_t> subarrays,
                                         const phase_codebook& codebook,
                                         const angle_grid& grid,
                                         const search_options& options)
{
  const std::size_t m = subarrays.size();
  const std::size_t ns = geometry.elements_per_subarray();
  const std::size_t g = grid.size();
  if (options.budget == 0)
    throw domain_error("stochastic search needs a positive evaluation budget");

  std::vector<std::vector<cd>> tables;
  for (auto s : subarrays)
    tables.push_back(steering_table(geometry, s, grid));

  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  std::vector<stochastic_result> partial(workers);
  auto share = [&](std::size_t w) {
    return options.budget / workers + (w < options.budget % workers ? 1 : 0);
  };
  if (workers == 1)
    partial[0] = stochastic_worker(tables, codebook, ns, g, share(0), make_stream(options.seed, {0}));
  else
  {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        partial[w] = stochastic_worker(tables, codebook, ns, g, share(w), make_stream(options.seed, {w}));
      });
    for (auto& t : pool)
      t.join();
  }

  stochastic_result best;
  std::uint64_t evaluated = 0;
  for (const auto& p : partial)
  {
    evaluated += p.evaluated;
    if (!p.flat.empty() && p.better_than(best))
      best = p;
  }

  std::vector<std::vector<std::size_t>> indices;
  std::vector<weight_vector> weights;
  for (std::size_t mm = 0; mm < m; ++mm)
  {
    indices.emplace_back(best.flat.begin() + static_cast<std::ptrdiff_t>(mm * ns),
                         best.flat.begin() + static_cast<std::ptrdiff_t>((mm + 1) * ns));
    weights.push_back(codebook.weights(indices.back()));
  }
  return finish(geometry, subarrays, codebook.accuracy(), std::move(indices), std::move(weights), grid,
                {search_method::stochastic, evaluated, options.seed});
}

// ---------------------------------------------------------------- golay

complementary_beam_set search_golay(const array_geometry& geometry,
                                    std::span<const std::size_t> subarrays,
                                    const angle_grid& grid,
                                    const search_options& options)
{
  if (subarrays.size() != 2)
    throw unsupported_length_error("the Golay construction yields pairs only; use exhaustive or stochastic search for triples");
  auto [a, b] = golay_construct(geometry.elements_per_subarray());
  std::vector<std::vector<std::size_t>> indices;
  for (const auto* w : {&a, &b})
  {
    std::vector<std::size_t> idx(w->size());
    for (std::size_t n = 0; n < w->size(); ++n)
      idx[n] = (*w)[n].real() < 0.0 ? 1 : 0;
    indices.push_back(std::move(idx));
  }
  return finish(geometry, subarrays, 2, std::move(indices), {std::move(a), std::move(b)}, grid,
                {search_method::golay, 1, options.seed});
}

} // namespace

// ---------------------------------------------------------------- public API

complementary_beam_set find_complementary_set(const array_geometry& geometry,
                                              std::span<const std::size_t> subarrays,
                                              const phase_codebook& codebook,
                                              const angle_grid& grid,
                                              search_method method,
                                              const search_options& options)
{
  if (subarrays.size() < 2 || subarrays.size() > 3)
    throw domain_error("complementary sets have two or three members");
  for (std::size_t i = 0; i < subarrays.size(); ++i)
  {
    if (subarrays[i] >= geometry.num_subarrays())
      throw domain_error("sub-array index " + std::to_string(subarrays[i]) + " out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (subarrays[i] == subarrays[j])
        throw domain_error("sub-array listed twice in one group");
  }

  switch (method)
  {
  case search_method::exhaustive:
    return search_exhaustive(geometry, subarrays, codebook, grid, options);
  case search_method::golay:
    return search_golay(geometry, subarrays, grid, options);
  case search_method::stochastic:
    return search_stochastic(geometry, subarrays, codebook, grid, options);
  }
  throw domain_error("unknown search method");
}

complementary_beam_set find_complementary_pair(const array_geometry& geometry,
                                               const phase_codebook& codebook,
                                               const angle_grid& grid,
                                               search_method method,
                                               const search_options& options)
{
  if (geometry.num_subarrays() != 2)
    throw domain_error("pair search needs exactly two sub-arrays, geometry has " + std::to_string(geometry.num_subarrays()));
  const std::size_t members[] = {0, 1};
  return find_complementary_set(geometry, members, codebook, grid, method, options);
}

complementary_beam_set find_complementary_triple(const array_geometry& geometry,
                                                 const phase_codebook& codebook,
                                                 const angle_grid& grid,
                                                 search_method method,
                                                 const search_options& options)
{
  if (geometry.num_subarrays() != 3)
    throw domain_error("triple search needs exactly three sub-arrays, geometry has " + std::to_string(geometry.num_subarrays()));
  const std::size_t members[] = {0, 1, 2};
  return find_complementary_set(geometry, members, codebook, grid, method, options);
}

std::pair<weight_vector, weight_vector> golay_construct(std::size_t length)
{
  if (length == 0 || (length & (length - 1)) != 0)
    throw unsupported_length_error("Golay construction needs a power-of-two length, got " + std::to_string(length));
  std::vector<cd> a{1.0};
  std::vector<cd> b{1.0};
  while (a.size() < length)
  {
    std::vector<cd> a2(a);
    a2.insert(a2.end(), b.begin(), b.end());
    std::vector<cd> b2(a);
    for (const auto& v : b)
      b2.push_back(-v);
    a.swap(a2);
    b.swap(b2);
  }
  return {weight_vector::from_values(std::move(a)), weight_vector::from_values(std::move(b))};
}

std::vector<std::vector<std::size_t>> group_rf_chains(std::size_t num_chains)
{
  if (num_chains < 2)
    throw domain_error("grouping needs at least two RF chains");
  std::vector<std::vector<std::size_t>> groups;
  const std::size_t pairs = (num_chains % 2 == 0) ? num_chains / 2 : (num_chains - 3) / 2;
  for (std::size_t p = 0; p < pairs; ++p)
    groups.push_back({2 * p, 2 * p + 1});
  if (num_chains % 2 == 1)
    groups.push_back({num_chains - 3, num_chains - 2, num_chains - 1});
  return groups;
}

weight_vector random_beam(std::size_t n, rng_t& rng)
{
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  std::vector<double> phases(n);
  for (auto& p : phases)
    p = phase(rng);
  return weight_vector::from_phases(phases);
}

// ---------------------------------------------------------------- JSON

std::string beam_set_to_json(const complementary_beam_set& set)
{
  using nlohmann::json;
  json geometry = {{"elements", set.geometry.total_elements()},
                   {"subarrays", set.geometry.num_subarrays()},
                   {"spacing", set.geometry.spacing()}};
  if (!set.geometry.contiguous())
  {
    json partition = json::array();
    for (std::size_t n = 0; n < set.geometry.total_elements(); ++n)
      partition.push_back(set.geometry.subarray_of(n));
    geometry["partition"] = partition;
  }

  json weights = json::array();
  for (std::size_t k = 0; k < set.weights.size(); ++k)
  {
    json values = json::array();
    for (const auto& v : set.weights[k].entries())
      values.push_back({v.real(), v.imag()});
    weights.push_back({{"subarray", set.subarrays[k]}, {"phase_indices", set.phase_indices[k]}, {"values", values}});
  }

  json grid = {{"measure", std::string(to_string(set.grid.measure()))}, {"points", set.grid.size()}};
  if (set.grid.measure() == grid_measure::custom)
    grid["angles_rad"] = std::vector<double>(set.grid.points().begin(), set.grid.points().end());

  json doc = {{"geometry", geometry},
              {"K", set.accuracy},
              {"method", std::string(to_string(set.meta.method))},
              {"seed", set.meta.seed},
              {"candidates_evaluated", set.meta.candidates_evaluated},
              {"weights", weights},
              {"variance", set.variance},
              {"grid", grid}};
  return doc.dump(2) + "\n";
}

complementary_beam_set beam_set_from_json(std::string_view text)
{
  using nlohmann::json;
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::exception& e)
  {
    throw parse_error(std::string("beam-set JSON: ") + e.what());
  }

  try
  {
    const auto& geo = doc.at("geometry");
    const auto n = geo.at("elements").get<std::size_t>();
    const auto m = geo.at("subarrays").get<std::size_t>();
    const auto d = geo.at("spacing").get<double>();
    array_geometry geometry = geo.contains("partition")
                                  ? array_geometry(geo.at("partition").get<std::vector<std::size_t>>(), m, d)
                                  : array_geometry(n, m, d);

    const auto& g = doc.at("grid");
    const auto measure = grid_measure_from_string(g.at("measure").get<std::string>());
    angle_grid grid = measure == grid_measure::custom ? angle_grid::from_points(g.at("angles_rad").get<std::vector<double>>())
                                                      : angle_grid::make(measure, g.at("points").get<std::size_t>());

    complementary_beam_set set;
    set.geometry = geometry;
    set.accuracy = doc.at("K").get<std::size_t>();
    set.meta.method = search_method_from_string(doc.at("method").get<std::string>());
    set.meta.seed = doc.value("seed", std::uint64_t{0});
    set.meta.candidates_evaluated = doc.value("candidates_evaluated", std::uint64_t{0});
    set.grid = grid;

    const phase_codebook codebook(set.accuracy);
    for (const auto& w : doc.at("weights"))
    {
      set.subarrays.push_back(w.at("subarray").get<std::size_t>());
      set.phase_indices.push_back(w.at("phase_indices").get<std::vector<std::size_t>>());
      if (w.contains("values"))
      {
        std::vector<cd> values;
        for (const auto& v : w.at("values"))
          values.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
        set.weights.push_back(weight_vector::from_values(std::move(values)));
      }
      else
        set.weights.push_back(codebook.weights(set.phase_indices.back()));
      if (set.weights.back().size() != geometry.elements_per_subarray())
        throw dimension_error("beam-set weight length does not match the geometry");
    }
    if (set.weights.empty())
      throw parse_error("beam-set JSON lists no weights");
    set.variance = set.composite().variance;
    return set;
  }
  catch (const json::exception& e)
  {
    throw parse_error(std::string("beam-set JSON: ") + e.what());
  }
}

} // namespace cbf
