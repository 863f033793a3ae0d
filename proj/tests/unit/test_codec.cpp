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

#include <random>

#include "abehg/codec.hpp"
#include "abehg/entropy.hpp"
#include "abehg/error.hpp"

using namespace abehg;

TEST_CASE("base64url uses the url alphabet without padding") {
  const Bytes data{0xfb, 0xff, 0xbf};
  CHECK(base64url_encode(data) == "-_-_");
  CHECK(base64url_encode(as_bytes("f")) == "Zg");
  CHECK(base64url_encode(as_bytes("")).empty());
  CHECK(to_string(base64url_decode("Zm9vYg")) == "foob");
}

TEST_CASE("base64url decoding is strict") {
  CHECK_THROWS_AS(base64url_decode("Zg=="), Error);
  CHECK_THROWS_AS(base64url_decode("Z+g"), Error);
  CHECK_THROWS_AS(base64url_decode("Zm9vY"), Error);  // length % 4 == 1
  CHECK_THROWS_AS(base64url_decode("Zh"), Error);     // stray low bits
}

TEST_CASE("base64url round-trips random byte strings") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Bytes data(rng() % 70);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    CHECK(base64url_decode(base64url_encode(data)) == data);
  }
}

TEST_CASE("seeded entropy is reproducible and system entropy is not flagged") {
  SeededEntropy a(42), b(42), c(43);
  std::array<std::uint8_t, 100> x{}, y{}, z{};
  a.fill(x);
  b.fill(y);
  c.fill(z);
  CHECK(x == y);
  CHECK(x != z);
  CHECK(a.deterministic());
  CHECK_THROWS_AS(require_production_entropy(a), Error);

  SystemEntropy system;
  CHECK_FALSE(system.deterministic());
  CHECK_NOTHROW(require_production_entropy(system));
}
