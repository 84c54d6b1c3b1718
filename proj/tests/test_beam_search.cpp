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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cbf/beam_search.hpp"
#include "cbf/errors.hpp"
#include "oracles.hpp"

#include <algorithm>

using namespace cbf;

namespace
{

void check_invariants(const complementary_beam_set& set)
{
  // stored variance equals an independent recomputation
  std::vector<beam_pattern> members;
  for (std::size_t k = 0; k < set.weights.size(); ++k)
    members.push_back(make_beam_pattern(set.weights[k], set.geometry, set.subarrays[k], set.grid));
  CHECK(std::abs(set.variance - make_composite_pattern(members).variance) <= 1e-12);

  for (const auto& w : set.weights)
    for (const auto& e : w.entries())
      CHECK(std::abs(std::abs(e) - 1.0) < 1e-12);

  // every entry is the codebook coefficient its phase index names
  const phase_codebook codebook(set.accuracy);
  for (std::size_t k = 0; k < set.weights.size(); ++k)
    for (std::size_t n = 0; n < set.weights[k].size(); ++n)
      CHECK(set.weights[k][n] == codebook[set.phase_indices[k][n]]);
}

} // namespace

TEST_CASE("phase codebook")
{
  const phase_codebook k4(4);
  CHECK(k4[0] == cd{1, 0});
  CHECK(k4[1] == cd{0, 1});
  CHECK(k4[2] == cd{-1, 0});
  CHECK(k4[3] == cd{0, -1});
  CHECK(k4.step() == doctest::Approx(pi / 2));

  const phase_codebook k7(7);
  for (std::size_t a = 0; a < 7; ++a)
  {
    CHECK(std::abs(std::abs(k7[a]) - 1.0) < 1e-15);
    for (std::size_t b = 0; b < a; ++b)
      CHECK(std::abs(k7[a] - k7[b]) > 0.1);
  }
  CHECK(phase_codebook(1)[0] == cd{1, 0});
  CHECK_THROWS_AS(phase_codebook(0), domain_error);
}

TEST_CASE("pair search examples")
{
  const auto grid = angle_grid::uniform_theta(512);

  SUBCASE("single isotropic elements")
  {
    const auto set = find_complementary_pair(array_geometry(2, 2), phase_codebook(1), grid, search_method::exhaustive);
    CHECK(set.weights[0] == weight_vector::uniform(1));
    CHECK(set.weights[1] == weight_vector::uniform(1));
    CHECK(set.variance < 1e-30);
    check_invariants(set);
  }

  SUBCASE("N_s = 2, K = 2 exhaustive returns ([1,1], [1,-1])")
  {
    const auto set = find_complementary_pair(array_geometry(4, 2), phase_codebook(2), grid, search_method::exhaustive);
    CHECK(set.phase_indices[0] == std::vector<std::size_t>{0, 0});
    CHECK(set.phase_indices[1] == std::vector<std::size_t>{0, 1});
    CHECK(set.variance < 1e-20);
    CHECK(set.meta.candidates_evaluated == 4);
    check_invariants(set);
  }

  SUBCASE("16-element ULA, two 8-element sub-arrays: isotropic composite")
  {
    const auto set = find_complementary_pair(array_geometry(16, 2), phase_codebook(4), grid, search_method::golay);
    CHECK(set.variance <= 1e-10);
    for (double a : set.composite().amplitude)
      CHECK(a == doctest::Approx(1.0).epsilon(1e-9));
    check_invariants(set);
  }

  SUBCASE("geometry must have two sub-arrays")
  {
    CHECK_THROWS_AS(find_complementary_pair(array_geometry(6, 3), phase_codebook(2), grid, search_method::exhaustive), domain_error);
  }
}

TEST_CASE("symmetry-reduced exhaustive search agrees with unreduced brute force")
{
  // every (N_s, K) small enough for the raw K^(2 N_s) enumeration
  const std::size_t points = 128;
  const auto grid = angle_grid::uniform_theta(points);
  const std::vector<std::pair<std::size_t, std::size_t>> cases{{1, 3}, {2, 2}, {2, 3}, {2, 4}, {2, 5}, {3, 2}, {3, 3}, {4, 2}, {3, 4}};
  for (auto [ns, k] : cases)
  {
    CAPTURE(ns);
    CAPTURE(k);
    const auto set = find_complementary_pair(array_geometry(2 * ns, 2), phase_codebook(k), grid, search_method::exhaustive);
    const double reference = oracle::brute_force_min_variance(ns, k, 2, points);
    CHECK(std::abs(set.variance - reference) <= 1e-12);
    check_invariants(set);
  }
}

TEST_CASE("exhaustive search is independent of the worker count")
{
  const auto grid = angle_grid::uniform_theta(200);
  const array_geometry g(10, 2);
  search_options one;
  search_options many;
  many.workers = 4;
  const auto a = find_complementary_pair(g, phase_codebook(3), grid, search_method::exhaustive, one);
  const auto b = find_complementary_pair(g, phase_codebook(3), grid, search_method::exhaustive, many);
  CHECK(a.phase_indices == b.phase_indices);
  CHECK(a.variance == b.variance);
}

TEST_CASE("exhaustive search refuses instances above the ceiling")
{
  search_options opts;
  opts.candidate_ceiling = 1000;
  try
  {
    find_complementary_pair(array_geometry(16, 2), phase_codebook(4), angle_grid::uniform_theta(64), search_method::exhaustive, opts);
    FAIL("expected capacity_error");
  }
  catch (const capacity_error& e)
  {
    CHECK(e.ceiling() == 1000);
    CHECK(std::string(e.what()).find("1000") != std::string::npos);
  }
}

TEST_CASE("golay construction")
{
  SUBCASE("small lengths")
  {
    auto [a1, b1] = golay_construct(1);
    CHECK(a1 == weight_vector::uniform(1));
    CHECK(b1 == weight_vector::uniform(1));
    auto [a2, b2] = golay_construct(2);
    CHECK(a2 == weight_vector::from_values({{1, 0}, {1, 0}}));
    CHECK(b2 == weight_vector::from_values({{1, 0}, {-1, 0}}));
  }

  SUBCASE("power spectra sum to 2 N_s on any grid (direct-sum oracle)")
  {
    std::vector<double> angles = oracle::theta_grid(1024);
    for (std::size_t len = 1; len <= 128; len *= 2)
    {
      auto [a, b] = golay_construct(len);
      for (const auto* w : {&a, &b})
        for (const auto& e : w->entries())
          CHECK((e == cd{1, 0} || e == cd{-1, 0}));
      const auto pa = oracle::power_pattern({a.entries().begin(), a.entries().end()}, 0, 0.5, angles);
      const auto pb = oracle::power_pattern({b.entries().begin(), b.entries().end()}, len, 0.5, angles);
      double worst = 0.0;
      for (std::size_t i = 0; i < angles.size(); ++i)
        worst = std::max(worst, std::abs(static_cast<double>(len) * (pa[i] + pb[i]) - 2.0 * static_cast<double>(len)));
      CHECK(worst < 1e-9 * static_cast<double>(len));
    }
  }

  SUBCASE("length 8 composite variance on a 4096-point grid")
  {
    const auto grid = angle_grid::uniform_theta(4096);
    const auto set = find_complementary_pair(array_geometry(16, 2), phase_codebook(2), grid, search_method::golay);
    CHECK(set.variance < 1e-12);
  }

  SUBCASE("unsupported lengths")
  {
    for (std::size_t len : {0u, 3u, 6u, 12u})
      CHECK_THROWS_AS(golay_construct(len), unsupported_length_error);
    CHECK_THROWS_AS(find_complementary_pair(array_geometry(6, 2), phase_codebook(2), angle_grid::uniform_theta(64), search_method::golay),
                    unsupported_length_error);
  }
}

TEST_CASE("triple search")
{
  const auto grid = angle_grid::uniform_theta(512);

  SUBCASE("single elements")
  {
    const auto set = find_complementary_triple(array_geometry(3, 3), phase_codebook(1), grid, search_method::exhaustive);
    CHECK(set.weights.size() == 3);
    CHECK(set.variance < 1e-30);
  }

  SUBCASE("N_s = 2, K = 2 matches the brute-force minimum over all 64 raw triples")
  {
    const auto set = find_complementary_triple(array_geometry(6, 3), phase_codebook(2), grid, search_method::exhaustive);
    // frozen from oracle::brute_force_min_variance(2, 2, 3, 512)
    CHECK(set.variance == doctest::Approx(0.057508350179149681).epsilon(1e-12));
    CHECK(std::abs(set.variance - oracle::brute_force_min_variance(2, 2, 3, 512)) <= 1e-12);
    check_invariants(set);
  }

  SUBCASE("stochastic search is reproducible for a fixed seed")
  {
    search_options opts;
    opts.seed = 1234;
    opts.budget = 20'000;
    const array_geometry g(12, 3);
    const auto a = find_complementary_triple(g, phase_codebook(4), grid, search_method::stochastic, opts);
    const auto b = find_complementary_triple(g, phase_codebook(4), grid, search_method::stochastic, opts);
    CHECK(a.phase_indices == b.phase_indices);
    CHECK(a.variance == b.variance);
    CHECK(a.meta.seed == 1234);
    check_invariants(a);
  }

  SUBCASE("golay has no triple construction")
  {
    CHECK_THROWS_AS(find_complementary_triple(array_geometry(6, 3), phase_codebook(2), grid, search_method::golay), unsupported_length_error);
  }
}

TEST_CASE("stochastic search")
{
  const auto grid = angle_grid::uniform_theta(256);
  const array_geometry g(12, 2);

  SUBCASE("best variance is non-increasing in the budget")
  {
    for (std::size_t workers : {1u, 3u})
    {
      double previous = std::numeric_limits<double>::infinity();
      for (std::uint64_t budget : {5u, 50u, 500u, 5000u, 20000u})
      {
        search_options opts;
        opts.seed = 99;
        opts.workers = workers;
        opts.budget = budget;
        const auto set = find_complementary_pair(g, phase_codebook(4), grid, search_method::stochastic, opts);
        CHECK(set.variance <= previous + 1e-15);
        CHECK(set.meta.candidates_evaluated <= budget);
        previous = set.variance;
        check_invariants(set);
      }
    }
  }

  SUBCASE("fixed worker count gives identical results")
  {
    search_options opts;
    opts.seed = 5;
    opts.workers = 4;
    opts.budget = 8000;
    const auto a = find_complementary_pair(g, phase_codebook(4), grid, search_method::stochastic, opts);
    const auto b = find_complementary_pair(g, phase_codebook(4), grid, search_method::stochastic, opts);
    CHECK(a.phase_indices == b.phase_indices);
  }

  SUBCASE("finds a zero-variance pair where one exists")
  {
    search_options opts;
    opts.seed = 3;
    const auto set = find_complementary_pair(array_geometry(8, 2), phase_codebook(2), grid, search_method::stochastic, opts);
    CHECK(set.variance < 1e-20);
  }
}

TEST_CASE("RF chain grouping")
{
  using groups = std::vector<std::vector<std::size_t>>;
  CHECK(group_rf_chains(2) == groups{{0, 1}});
  CHECK(group_rf_chains(3) == groups{{0, 1, 2}});
  CHECK(group_rf_chains(4) == groups{{0, 1}, {2, 3}});
  CHECK(group_rf_chains(5) == groups{{0, 1}, {2, 3, 4}});
  CHECK(group_rf_chains(8).size() == 4);
  CHECK_THROWS_AS(group_rf_chains(1), domain_error);
  CHECK_THROWS_AS(group_rf_chains(0), domain_error);

  for (std::size_t m = 2; m < 20; ++m)
  {
    std::vector<std::size_t> flat;
    for (const auto& g : group_rf_chains(m))
    {
      CHECK((g.size() == 2 || g.size() == 3));
      flat.insert(flat.end(), g.begin(), g.end());
    }
    std::vector<std::size_t> expected(m);
    for (std::size_t i = 0; i < m; ++i)
      expected[i] = i;
    CHECK(flat == expected);
  }
}

TEST_CASE("grouped search over a five-chain array")
{
  const array_geometry g(10, 5);
  const auto grid = angle_grid::uniform_theta(128);
  for (const auto& group : group_rf_chains(5))
  {
    const auto set = find_complementary_set(g, group, phase_codebook(2), grid, search_method::exhaustive);
    CHECK(set.subarrays == group);
    check_invariants(set);
  }
  const std::size_t dup[] = {1, 1};
  CHECK_THROWS_AS(find_complementary_set(g, dup, phase_codebook(2), grid, search_method::exhaustive), domain_error);
}

TEST_CASE("random beams")
{
  SUBCASE("single element")
  {
    auto rng = make_stream(1);
    const auto w = random_beam(1, rng);
    CHECK(std::abs(std::abs(w[0]) - 1.0) < 1e-15);
  }
  SUBCASE("same seed, same vector")
  {
    auto r1 = make_stream(42);
    auto r2 = make_stream(42);
    CHECK(random_beam(8, r1) == random_beam(8, r2));
    CHECK_FALSE(random_beam(8, r1) == random_beam(8, r1));
  }
  SUBCASE("average power is one in every direction")
  {
    const array_geometry g(8, 1);
    const auto grid = angle_grid::uniform_theta(64);
    std::vector<double> acc(grid.size(), 0.0);
    auto rng = make_stream(7);
    const int draws = 100'000;
    for (int d = 0; d < draws; ++d)
    {
      const auto gains = array_gains(random_beam(8, rng).entries(), g, 0, grid);
      for (std::size_t i = 0; i < grid.size(); ++i)
        acc[i] += std::norm(gains[i]);
    }
    for (double a : acc)
      CHECK(a / draws == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("beam-set JSON round trip")
{
  search_options opts;
  opts.seed = 17;
  opts.budget = 2000;
  for (auto method : {search_method::exhaustive, search_method::golay, search_method::stochastic})
  {
    const auto set = find_complementary_pair(array_geometry(8, 2, 0.45), phase_codebook(3), angle_grid::uniform_psi(300), method, opts);
    const auto back = beam_set_from_json(beam_set_to_json(set));
    CHECK(back.geometry == set.geometry);
    CHECK(back.grid == set.grid);
    CHECK(back.weights == set.weights);
    CHECK(back.phase_indices == set.phase_indices);
    CHECK(back.variance == set.variance);
    CHECK(back.meta.method == method);
    CHECK(back.meta.seed == 17);
  }
  CHECK_THROWS_AS(beam_set_from_json("{not json"), parse_error);
  CHECK_THROWS_AS(beam_set_from_json("{\"K\": 2}"), parse_error);
}
