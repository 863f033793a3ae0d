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

#include <json.hpp>

#include "abehg/cpabe.hpp"
#include "abehg/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace abehg;
using namespace abehg::cpabe;
using abehg::math::GTElement;
using abehg::math::Scalar;
using abehg::policy::AttributeSet;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::io;
}

struct Authority {
  SeededEntropy entropy{"cpabe-unit"};
  KeyPair keys = setup(entropy);
};

}  // namespace

TEST_CASE("setup produces consistent keys") {
  SeededEntropy entropy(1);
  const auto a = setup(entropy);
  const auto b = setup(entropy);
  CHECK_FALSE(a.public_key.egg_alpha == b.public_key.egg_alpha);
  CHECK(math::pairing(a.master_key.g_alpha, a.public_key.g) == a.public_key.egg_alpha);
  CHECK_NOTHROW(validate_pair(a.public_key, a.master_key));
  CHECK_THROWS_AS(validate_pair(a.public_key, b.master_key), Error);

  // Replay the seed: alpha then beta are the first two draws.
  SeededEntropy replay(1);
  const Scalar alpha = Scalar::random(replay);
  const Scalar beta = Scalar::random_nonzero(replay);
  const auto egg = GTElement::generator();
  CHECK(math::pairing(a.public_key.g, a.public_key.h).pow(beta.inverse()) == egg);
  CHECK(a.public_key.egg_alpha == egg.pow(alpha));
}

TEST_CASE("keygen issues one component pair per attribute") {
  Authority aa;
  const auto sk = keygen(aa.keys.public_key, aa.keys.master_key, AttributeSet{"a", "b"}, aa.entropy);
  CHECK(sk.components.size() == 2);
  CHECK_NOTHROW(validate(sk));
  CHECK(code_of([&] {
          keygen(aa.keys.public_key, aa.keys.master_key, AttributeSet{}, aa.entropy);
        }) == Errc::domain);

  const auto again = keygen(aa.keys.public_key, aa.keys.master_key, AttributeSet{"a", "b"}, aa.entropy);
  CHECK_FALSE(again.d == sk.d);
  CHECK_FALSE(again.components[0].d == sk.components[0].d);
}

TEST_CASE("exponent bookkeeping: e(c, d) = egg_alpha^s * e(g,g)^(rs)") {
  Authority aa;
  const auto& pk = aa.keys.public_key;
  const auto tree = policy::parse_postfix("a b 1of2");

  SeededEntropy key_entropy(77);
  const auto sk = keygen(pk, aa.keys.master_key, AttributeSet{"a"}, key_entropy);
  SeededEntropy enc_entropy(78);
  const auto ct = encrypt_element(pk, GTElement::identity(), tree, enc_entropy);

  SeededEntropy r_replay(77), s_replay(78);
  const Scalar r = Scalar::random(r_replay);
  const Scalar s = Scalar::random(s_replay);
  CHECK(math::pairing(ct.c, sk.d) == pk.egg_alpha.pow(s) * GTElement::generator().pow(r * s));
  CHECK(ct.c_tilde == pk.egg_alpha.pow(s));
}

TEST_CASE("encrypt/decrypt on the EHR policy follows the table") {
  Authority aa;
  const auto& pk = aa.keys.public_key;
  const auto tree = policy::parse_postfix(testing::kPolicyT);
  const auto m = GTElement::random(aa.entropy);
  const auto ct = encrypt_element(pk, m, tree, aa.entropy);
  CHECK(ct.leaves.size() == 7);

  const auto row3 = keygen(pk, aa.keys.master_key, testing::row_attrs(2), aa.entropy);
  CHECK(decrypt_element(pk, row3, ct) == m);
  const auto row2 = keygen(pk, aa.keys.master_key, testing::row_attrs(1), aa.entropy);
  CHECK(decrypt_element(pk, row2, ct) == m);
  const auto row1 = keygen(pk, aa.keys.master_key, testing::row_attrs(0), aa.entropy);
  CHECK(code_of([&] { decrypt_element(pk, row1, ct); }) == Errc::policy_not_satisfied);

  const auto again = encrypt_element(pk, m, tree, aa.entropy);
  CHECK_FALSE(again.c == ct.c);
}

TEST_CASE("decrypt rejects a ciphertext whose component count disagrees with its policy") {
  Authority aa;
  const auto& pk = aa.keys.public_key;
  auto ct = encrypt_element(pk, GTElement::generator(), policy::parse_postfix("a b 2of2"), aa.entropy);
  ct.leaves.pop_back();
  const auto sk = keygen(pk, aa.keys.master_key, AttributeSet{"a", "b"}, aa.entropy);
  CHECK(code_of([&] { decrypt_element(pk, sk, ct); }) == Errc::malformed);
}

TEST_CASE("round-trip and soundness on random policies") {
  Authority aa;
  const auto& pk = aa.keys.public_key;
  testing::TreeGenerator gen(99, 6);
  int successes = 0, refusals = 0;
  for (int i = 0; i < 30; ++i) {
    const auto tree = gen.tree(12);
    const auto attrs = gen.attrs(0.5);
    if (attrs.empty()) continue;
    const auto m = GTElement::random(aa.entropy);
    const auto ct = encrypt_element(pk, m, tree, aa.entropy);
    const auto sk = keygen(pk, aa.keys.master_key, attrs, aa.entropy);
    if (testing::brute_force_satisfies(tree, attrs)) {
      CHECK(decrypt_element(pk, sk, ct) == m);
      ++successes;
    } else {
      CHECK(code_of([&] { decrypt_element(pk, sk, ct); }) == Errc::policy_not_satisfied);
      ++refusals;
    }
  }
  CHECK(successes > 0);
  CHECK(refusals > 0);
}

TEST_CASE("colluding keys cannot be merged") {
  Authority aa;
  const auto& pk = aa.keys.public_key;
  const auto tree = policy::parse_postfix(testing::kPolicyT);
  const auto m = GTElement::random(aa.entropy);
  const auto ct = encrypt_element(pk, m, tree, aa.entropy);

  const auto phd = keygen(pk, aa.keys.master_key, AttributeSet{"Position: PhD"}, aa.entropy);
  const auto amu = keygen(pk, aa.keys.master_key, AttributeSet{"University: AMU"}, aa.entropy);
  CHECK(code_of([&] { decrypt_element(pk, phd, ct); }) == Errc::policy_not_satisfied);
  CHECK(code_of([&] { decrypt_element(pk, amu, ct); }) == Errc::policy_not_satisfied);

  for (const auto* base : {&phd, &amu}) {
    PrivateKey merged;
    merged.d = base->d;
    merged.attrs = AttributeSet{"Position: PhD", "University: AMU"};
    for (const auto& attr : merged.attrs) {
      const auto& src = phd.attrs.contains(attr) ? phd : amu;
      for (const auto& c : src.components) {
        if (c.attribute == attr) merged.components.push_back(c);
      }
    }
    REQUIRE_NOTHROW(validate(merged));
    CHECK_FALSE(decrypt_element(pk, merged, ct) == m);
  }
}

TEST_CASE("artifact serialization") {
  Authority aa;
  const auto& pk = aa.keys.public_key;
  const auto sk = keygen(pk, aa.keys.master_key, testing::row_attrs(3), aa.entropy);
  const auto ct = encrypt_element(pk, GTElement::random(aa.entropy),
                                  policy::parse_postfix(testing::kPolicyT), aa.entropy);

  SUBCASE("round trips") {
    CHECK(deserialize_public_key(serialize_artifact(pk)) == pk);
    CHECK(deserialize_master_key(serialize_artifact(aa.keys.master_key)) == aa.keys.master_key);
    CHECK(deserialize_private_key(serialize_artifact(sk)) == sk);
    CHECK(deserialize_ciphertext(serialize_artifact(ct)) == ct);
    CHECK(std::holds_alternative<Ciphertext>(deserialize_artifact(serialize_artifact(ct))));

    const auto j = nlohmann::json::parse(serialize_artifact(pk));
    CHECK(j["v"] == 1);
    CHECK(j["type"] == "cpabe.public_key");
    CHECK(j["group_id"] == std::string(math::kGroupId));
  }

  SUBCASE("rejections") {
    auto j = nlohmann::json::parse(serialize_artifact(pk));
    j["group_id"] = "bn254/v1";
    CHECK(code_of([&] { deserialize_public_key(j.dump()); }) == Errc::group_mismatch);

    j = nlohmann::json::parse(serialize_artifact(pk));
    j["v"] = 2;
    CHECK(code_of([&] { deserialize_public_key(j.dump()); }) == Errc::version_mismatch);

    j = nlohmann::json::parse(serialize_artifact(sk));
    j["components"].erase(j["components"].size() - 1);
    CHECK(code_of([&] { deserialize_private_key(j.dump()); }) == Errc::malformed);

    j = nlohmann::json::parse(serialize_artifact(pk));
    j["h"] = std::string(j["h"]) + "==";
    CHECK(code_of([&] { deserialize_public_key(j.dump()); }) == Errc::malformed);

    j = nlohmann::json::parse(serialize_artifact(ct));
    j["policy"] = "a b 2of2";
    CHECK(code_of([&] { deserialize_ciphertext(j.dump()); }) == Errc::malformed);

    CHECK(code_of([&] { deserialize_ciphertext(serialize_artifact(pk)); }) == Errc::malformed);
    CHECK(code_of([&] { deserialize_artifact("not json"); }) == Errc::malformed);
  }
}
