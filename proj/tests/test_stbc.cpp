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
#include "cbf/stbc.hpp"

#include <random>

using namespace cbf;

namespace
{

struct gen
{
  std::mt19937_64 rng;
  std::normal_distribution<double> n{0.0, 1.0};

  explicit gen(std::uint64_t seed) : rng(seed) {}
  cd operator()() { return {n(rng), n(rng)}; }
};

bool near(cd a, cd b, double tol) { return std::abs(a - b) <= tol; }

} // namespace

TEST_CASE("alamouti encoding")
{
  CHECK(alamouti_encode(0.0, 0.0).matrix.isZero(0.0));

  const auto c = alamouti_encode({1, 1}, {1, -1});
  CHECK(c.matrix(0, 0) == cd{1, 1});
  CHECK(c.matrix(0, 1) == cd{-1, -1});
  CHECK(c.matrix(1, 0) == cd{1, -1});
  CHECK(c.matrix(1, 1) == cd{1, -1});
  CHECK(c.s1() == cd{1, 1});
  CHECK(c.s2() == cd{1, -1});

  gen g(1);
  for (int trial = 0; trial < 1000; ++trial)
  {
    const cd s1 = g(), s2 = g();
    const auto x = alamouti_encode(s1, s2).matrix;
    const double power = std::norm(s1) + std::norm(s2);
    CHECK(std::abs(x.col(0).dot(x.col(1))) < 1e-12 * (1.0 + power));
    CHECK(x.col(0).squaredNorm() == doctest::Approx(power).epsilon(1e-13));
    CHECK(x.col(1).squaredNorm() == doctest::Approx(power).epsilon(1e-13));
  }
}

TEST_CASE("composite channel")
{
  const auto h = make_composite_channel(1.0, 1.0, 1.0, 1.0);
  CHECK(h.matrix(0, 0) == cd{1, 0});
  CHECK(h.matrix(0, 1) == cd{1, 0});
  CHECK(h.matrix(1, 0) == cd{1, 0});
  CHECK(h.matrix(1, 1) == cd{-1, 0});

  SUBCASE("a beam null on stream 1 keeps orthogonality")
  {
    const auto hn = make_composite_channel(0.0, 1.0, 1.0, 1.0);
    CHECK((hn.matrix.adjoint() * hn.matrix).isApprox(matrix2c::Identity(), 1e-15));
    CHECK(hn.gain() == 1.0);
  }

  SUBCASE("H^H H = (|g1 h1|^2 + |g2 h2|^2) I for random inputs")
  {
    gen g(2);
    for (int trial = 0; trial < 10'000; ++trial)
    {
      const cd g1 = g(), g2 = g(), h1 = g(), h2 = g();
      const auto hc = make_composite_channel(g1, g2, h1, h2);
      const double rho = std::norm(g1 * h1) + std::norm(g2 * h2);
      const matrix2c gram = hc.matrix.adjoint() * hc.matrix;
      CHECK((gram - rho * matrix2c::Identity()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, rho));
      CHECK(hc.gain() == doctest::Approx(rho).epsilon(1e-13));
    }
  }
}

TEST_CASE("receive")
{
  SUBCASE("noiseless unit gains")
  {
    const auto [y1, y2] = receive(alamouti_encode(1.0, cd{0, 1}), stream_gains{}, 0.0, 0.0);
    CHECK(y1 == cd{1, 1});
    CHECK(y2 == cd{1, 1});
  }
  SUBCASE("stacked form equals H s")
  {
    gen g(3);
    for (int trial = 0; trial < 1000; ++trial)
    {
      const stream_gains sg{g(), g(), g(), g()};
      const cd s1 = g(), s2 = g();
      const auto [y1, y2] = receive(alamouti_encode(s1, s2), sg, 0.0, 0.0);
      const vector2c hs = make_composite_channel(sg).matrix * vector2c(s1, s2);
      CHECK(near(y1, hs(0), 1e-12));
      CHECK(near(std::conj(y2), hs(1), 1e-12));
    }
  }
  SUBCASE("zero symbols return the noise")
  {
    const cd n1{0.3, -0.1}, n2{-2.0, 0.5};
    const auto [y1, y2] = receive(alamouti_encode(0.0, 0.0), stream_gains{{0.2, 1}, {3, 0}, {1, 1}, {0.5, 0}}, n1, n2);
    CHECK(y1 == n1);
    CHECK(y2 == n2);
  }
}

TEST_CASE("MMSE decoding")
{
  SUBCASE("identity channel")
  {
    composite_channel h{matrix2c::Identity()};
    const auto [a, b] = mmse_decode({cd{0.5, 1}, std::conj(cd{-2, 3})}, h, {0.0});
    CHECK(near(a, {0.5, 1}, 1e-15));
    CHECK(near(b, {-2, 3}, 1e-15));
  }

  SUBCASE("noiseless zero forcing recovers the symbols (10^4 random instances)")
  {
    gen g(4);
    for (int trial = 0; trial < 10'000; ++trial)
    {
      const stream_gains sg{g(), g(), g(), g()};
      const cd s1 = g(), s2 = g();
      const auto y = receive(alamouti_encode(s1, s2), sg, 0.0, 0.0);
      const auto [a, b] = mmse_decode(y, make_composite_channel(sg), {0.0});
      CHECK(near(a, s1, 1e-9));
      CHECK(near(b, s2, 1e-9));
    }
  }

  SUBCASE("noise variance shrinks the estimate by rho / (rho + sigma^2)")
  {
    gen g(5);
    for (int trial = 0; trial < 500; ++trial)
    {
      const stream_gains sg{g(), g(), g(), g()};
      const cd s1 = g(), s2 = g();
      const double sigma2 = 0.01 + std::abs(g().real());
      const auto h = make_composite_channel(sg);
      const double rho = h.gain();
      const auto y = receive(alamouti_encode(s1, s2), sg, 0.0, 0.0);
      const auto [a, b] = mmse_decode(y, h, {sigma2});
      CHECK(near(a, rho / (rho + sigma2) * s1, 1e-10));
      CHECK(near(b, rho / (rho + sigma2) * s2, 1e-10));

      // general inverse and orthogonal shortcut agree with noise present too
      const cd n1 = g(), n2 = g();
      const auto yn = receive(alamouti_encode(s1, s2), sg, n1, n2);
      const auto full = mmse_decode(yn, h, {sigma2});
      const auto fast = mmse_decode_orthogonal(yn, h, {sigma2});
      CHECK(near(full.first, fast.first, 1e-10));
      CHECK(near(full.second, fast.second, 1e-10));
    }
  }

  SUBCASE("singular inputs")
  {
    const auto zero = make_composite_channel(0.0, 0.0, 1.0, 1.0);
    CHECK_THROWS_AS(mmse_decode({1.0, 1.0}, zero, {0.0}), singularity_error);
    CHECK_THROWS_AS(mmse_decode_orthogonal({1.0, 1.0}, zero, {0.0}), singularity_error);
    const auto [a, b] = mmse_decode({1.0, 1.0}, zero, {0.5});
    CHECK(a == cd{0, 0});
    CHECK(b == cd{0, 0});
  }
}

TEST_CASE("fallback pattern equals the sum of the sub-array patterns")
{
  const auto grid = angle_grid::uniform_theta(512);

  SUBCASE("uniform weights give the 4-element uniform pattern")
  {
    const array_geometry g(4, 2, 0.5);
    const auto f = fallback_pattern(weight_vector::uniform(2), weight_vector::uniform(2), g, grid);
    const auto full = array_gains(std::vector<cd>(4, 1.0), array_geometry(4, 1, 0.5), 0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(near(f.gains[i], std::sqrt(2.0) * full[i], 1e-12)); // 1/sqrt(N_s) instead of 1/sqrt(N)
    CHECK(std::norm(f.gains[256]) == doctest::Approx(8.0)); // |4 / sqrt(2)|^2
  }

  SUBCASE("random weights, pointwise identity (10^3 pairs)")
  {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 2 * pi);
    const array_geometry g(12, 2, 0.5);
    const auto coarse = angle_grid::uniform_theta(64);
    for (int trial = 0; trial < 1000; ++trial)
    {
      std::vector<double> p1(6), p2(6);
      for (auto& v : p1)
        v = u(rng);
      for (auto& v : p2)
        v = u(rng);
      const auto w1 = weight_vector::from_phases(p1);
      const auto w2 = weight_vector::from_phases(p2);
      const auto f = fallback_pattern(w1, w2, g, coarse);
      const auto g1 = make_beam_pattern(w1, g, 0, coarse);
      const auto g2 = make_beam_pattern(w2, g, 1, coarse);
      for (std::size_t i = 0; i < coarse.size(); ++i)
        CHECK(near(f.gains[i], g1.gains[i] + g2.gains[i], 1e-12));
    }
  }

  SUBCASE("a complementary pair transmitting the same symbol is not isotropic")
  {
    const array_geometry g(16, 2, 0.5);
    auto [a, b] = golay_construct(8);
    const auto f = fallback_pattern(a, b, g, grid);
    CHECK(pattern_variance(f, grid) > 0.1);
    const auto c = make_composite_pattern({make_beam_pattern(a, g, 0, grid), make_beam_pattern(b, g, 1, grid)});
    CHECK(c.variance < 1e-10);
  }

  SUBCASE("errors")
  {
    CHECK_THROWS_AS(fallback_pattern(weight_vector::uniform(2), weight_vector::uniform(3), array_geometry(4, 2), grid), dimension_error);
    CHECK_THROWS_AS(fallback_pattern(weight_vector::uniform(2), weight_vector::uniform(2), array_geometry(6, 3), grid), domain_error);
  }
}

TEST_CASE("per-period codeword energy under the equal power split")
{
  gen g(8);
  for (int trial = 0; trial < 200; ++trial)
  {
    const cd s1 = g(), s2 = g();
    const auto c = alamouti_encode(s1, s2);
    CHECK(codeword_energy_per_period(c) == doctest::Approx((std::norm(s1) + std::norm(s2)) / 2.0).epsilon(1e-13));
  }
  // unit-energy QPSK symbols: one unit per period, same as a single antenna
  const double q = 1.0 / std::sqrt(2.0);
  CHECK(codeword_energy_per_period(alamouti_encode({q, q}, {-q, q})) == doctest::Approx(1.0));
}
