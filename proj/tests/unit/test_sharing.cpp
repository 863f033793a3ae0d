// Copyright 2026 The abehg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "abehg/error.hpp"
#include "abehg/sharing.hpp"

using namespace abehg;
using namespace abehg::math;

namespace {
std::vector<std::uint32_t> idx(std::initializer_list<std::uint32_t> v) { return v; }
}  // namespace

TEST_CASE("lagrange_coeff hand-evaluated values") {
  const Scalar zero{};
  CHECK(lagrange_coeff(5, idx({5}), zero) == Scalar::one());
  // (0-2)/(1-2) = 2
  CHECK(lagrange_coeff(1, idx({1, 2}), zero) == Scalar::from_u64(2));
  // (0-1)(0-3)/((2-1)(2-3)) = -3
  CHECK(lagrange_coeff(2, idx({1, 2, 3}), zero) == -Scalar::from_u64(3));
}

TEST_CASE("lagrange_coeff domain errors") {
  CHECK_THROWS_AS(lagrange_coeff(4, idx({1, 2}), Scalar{}), Error);
  CHECK_THROWS_AS(lagrange_coeff(1, idx({1, 2, 2}), Scalar{}), Error);
  CHECK_THROWS_AS(lagrange_coeff(1, idx({0, 1}), Scalar{}), Error);
}

TEST_CASE("eval_polynomial") {
  const SharePolynomial constant({Scalar::from_u64(9)});
  CHECK(eval_polynomial(constant, Scalar::from_u64(77)) == Scalar::from_u64(9));

  const SharePolynomial linear({Scalar::from_u64(3), Scalar::from_u64(4)});
  CHECK(eval_polynomial(linear, Scalar::from_u64(2)) == Scalar::from_u64(11));

  SeededEntropy entropy(9);
  const auto poly = sample_polynomial(4, Scalar::from_u64(123), entropy);
  CHECK(eval_polynomial(poly, Scalar{}) == poly.coefficients()[0]);
}

TEST_CASE("sample_polynomial keeps the secret at zero") {
  SeededEntropy entropy(10);
  const Scalar s = Scalar::random(entropy);
  const auto p0 = sample_polynomial(0, s, entropy);
  CHECK(p0.degree() == 0);
  CHECK(eval_polynomial(p0, Scalar::from_u64(5)) == s);

  const auto p2 = sample_polynomial(2, s, entropy);
  CHECK(p2.degree() == 2);
  CHECK(p2.coefficients().size() == 3);
  CHECK(eval_polynomial(p2, Scalar{}) == s);

  // degree 1, secret 7: shares at 1 and 2 reconstruct 7.
  const auto p1 = sample_polynomial(1, Scalar::from_u64(7), entropy);
  const auto s1 = eval_polynomial(p1, Scalar::from_u64(1));
  const auto s2 = eval_polynomial(p1, Scalar::from_u64(2));
  const auto set = idx({1, 2});
  CHECK(s1 * lagrange_coeff(1, set, Scalar{}) + s2 * lagrange_coeff(2, set, Scalar{}) ==
        Scalar::from_u64(7));
}

TEST_CASE("any d+1 shares reconstruct the secret (100 trials)") {
  SeededEntropy entropy(11);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t degree = rng() % 6;
    const Scalar secret = Scalar::random(entropy);
    const auto poly = sample_polynomial(degree, secret, entropy);

    std::vector<std::uint32_t> pool(12);
    std::iota(pool.begin(), pool.end(), 1u);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(degree + 1);

    Scalar acc;
    for (const auto i : pool) {
      acc += eval_polynomial(poly, Scalar::from_u64(i)) * lagrange_coeff(i, pool, Scalar{});
    }
    CHECK(acc == secret);
  }
}

TEST_CASE("d shares leave the secret undetermined") {
  SeededEntropy entropy(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t degree = 1 + trial % 4;
    const auto poly = sample_polynomial(degree, Scalar::random(entropy), entropy);
    std::vector<std::uint32_t> known(degree);
    std::iota(known.begin(), known.end(), 1u);

    // Complete the missing share two different random ways.
    std::vector<std::uint32_t> full = known;
    full.push_back(static_cast<std::uint32_t>(degree + 1));
    auto reconstruct = [&](const Scalar& guess) {
      Scalar acc;
      for (const auto i : known) {
        acc += eval_polynomial(poly, Scalar::from_u64(i)) * lagrange_coeff(i, full, Scalar{});
      }
      return acc + guess * lagrange_coeff(full.back(), full, Scalar{});
    };
    CHECK_FALSE(reconstruct(Scalar::random(entropy)) == reconstruct(Scalar::random(entropy)));
  }
}
