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

#include <set>

#include "abehg/error.hpp"
#include "abehg/group.hpp"

using namespace abehg;
using namespace abehg::math;

TEST_CASE("scalar identities and reduction") {
  SeededEntropy entropy(1);
  const Scalar a = Scalar::random(entropy);
  CHECK(a + Scalar{} == a);
  CHECK(a * Scalar::one() == a);
  CHECK((a - a).is_zero());
  CHECK(a * a.inverse() == Scalar::one());
  CHECK(-a + a == Scalar{});
  CHECK_THROWS_AS(Scalar{}.inverse(), Error);

  // p - 1 + 1 wraps to zero.
  const Scalar minus_one = -Scalar::one();
  CHECK((minus_one + Scalar::one()).is_zero());
}

TEST_CASE("scalar encoding rejects values at or above the group order") {
  std::array<std::uint8_t, 32> all_ones{};
  all_ones.fill(0xff);
  CHECK_THROWS_AS(Scalar::from_bytes(all_ones), Error);
  CHECK_THROWS_AS(Scalar::from_bytes(std::array<std::uint8_t, 31>{}), Error);
  const auto minus_one = (-Scalar::one()).to_bytes();
  CHECK(Scalar::from_bytes(minus_one) == -Scalar::one());
}

TEST_CASE("encode/decode round-trips scalars and group elements") {
  SeededEntropy entropy(2);
  for (int i = 0; i < 100; ++i) {
    const Scalar x = Scalar::random(entropy);
    CHECK(Scalar::from_bytes(x.to_bytes()) == x);

    const G0Element p = G0Element::generator().pow(x);
    const auto p_bytes = p.to_bytes();
    CHECK(p_bytes.size() == kG0Bytes);
    CHECK(G0Element::from_bytes(p_bytes) == p);

    if (i < 20) {  // GT exponentiation is the slow part
      const GTElement t = GTElement::generator().pow(x);
      CHECK(GTElement::from_bytes(t.to_bytes()) == t);
    }
  }
  CHECK(G0Element::from_bytes(G0Element::identity().to_bytes()).is_identity());
  CHECK(GTElement::from_bytes(GTElement::identity().to_bytes()).is_identity());
}

TEST_CASE("group element decoding rejects garbage") {
  std::array<std::uint8_t, kG0Bytes> junk{};
  junk.fill(0x5a);
  CHECK_THROWS_AS(G0Element::from_bytes(junk), Error);

  auto gt = GTElement::generator().to_bytes();
  gt[100] ^= 0x01;
  CHECK_THROWS_AS(GTElement::from_bytes(gt), Error);
  std::array<std::uint8_t, kGTBytes> over{};
  over.fill(0xff);
  CHECK_THROWS_AS(GTElement::from_bytes(over), Error);
}

TEST_CASE("hash_to_group is deterministic and separates labels") {
  CHECK(hash_to_group("position:doctor") == hash_to_group("position:doctor"));
  CHECK_FALSE(hash_to_group("a") == hash_to_group("b"));
  CHECK(hash_to_group("a").to_bytes().size() == kG0Bytes);

  std::set<std::array<std::uint8_t, kG0Bytes>> seen;
  for (int i = 0; i < 64; ++i) seen.insert(hash_to_group("attr:" + std::to_string(i)).to_bytes());
  CHECK(seen.size() == 64);
  CHECK_FALSE(hash_to_group("a").is_identity());
}

TEST_CASE("pairing exponent bookkeeping") {
  const G0Element g = G0Element::generator();
  const Scalar two = Scalar::from_u64(2), three = Scalar::from_u64(3), six = Scalar::from_u64(6);
  CHECK(pairing(g.pow(two), g.pow(three)) == GTElement::generator().pow(six));
  CHECK(pairing(G0Element::identity(), g).is_identity());
  CHECK(pairing(g, G0Element::identity()).is_identity());
  CHECK_FALSE(GTElement::generator().is_identity());

  const G0Element a = g.pow(Scalar::from_u64(11)), b = g.pow(Scalar::from_u64(29));
  CHECK(pairing(a, b) == pairing(b, a));
}

TEST_CASE("bilinearity on random elements") {
  SeededEntropy entropy(3);
  const G0Element g = G0Element::generator();
  for (int i = 0; i < 50; ++i) {
    const Scalar x = Scalar::random(entropy);
    const G0Element a = g.pow(Scalar::random(entropy));
    const G0Element b = i % 2 ? g.pow(Scalar::random(entropy)) : hash_to_group(std::to_string(i));
    CHECK(pairing(a.pow(x), b) == pairing(a, b).pow(x));
  }
}

TEST_CASE("group laws in G0 and GT") {
  SeededEntropy entropy(4);
  const G0Element g = G0Element::generator();
  const Scalar x = Scalar::random(entropy), y = Scalar::random(entropy);
  CHECK(g.pow(x) * g.pow(y) == g.pow(x + y));
  CHECK((g.pow(x) * g.pow(x).inverse()).is_identity());
  CHECK(g.pow(Scalar{}).is_identity());

  const GTElement t = GTElement::generator();
  CHECK(t.pow(x) * t.pow(y) == t.pow(x + y));
  CHECK((t.pow(x) / t.pow(x)).is_identity());
  CHECK(t.pow(x).pow(y) == t.pow(x * y));
}
