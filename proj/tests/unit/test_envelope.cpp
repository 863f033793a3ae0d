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
#include <random>
#include <set>

#include "abehg/envelope.hpp"
#include "abehg/error.hpp"
#include "support/fixtures.hpp"

using namespace abehg;
using namespace abehg::envelope;
using abehg::policy::AttributeSet;

namespace {

struct Fixture {
  SeededEntropy entropy{"envelope-unit"};
  cpabe::KeyPair keys = cpabe::setup(entropy);
  policy::AccessTree tree = policy::parse_postfix(testing::kPolicyT);
  cpabe::PrivateKey good = cpabe::keygen(keys.public_key, keys.master_key, testing::row_attrs(2), entropy);
  cpabe::PrivateKey bad = cpabe::keygen(keys.public_key, keys.master_key, testing::row_attrs(0), entropy);
  Meta meta{"text/plain", 1700000000, "owner-1"};
};

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::io;  // sentinel: no error
}

}  // namespace

TEST_CASE("derive_content_key") {
  SeededEntropy entropy(5);
  const auto m = math::GTElement::random(entropy);
  CHECK(derive_content_key(m) == derive_content_key(m));
  CHECK(derive_content_key(m).size() == 32);

  std::set<ContentKey> keys;
  for (int i = 0; i < 32; ++i) keys.insert(derive_content_key(math::GTElement::random(entropy)));
  CHECK(keys.size() == 32);
}

TEST_CASE("seal/open round trip") {
  Fixture f;
  const auto& pk = f.keys.public_key;
  const std::string record = "patient: 4711\nfindings: none\n";
  const auto env = seal(pk, f.tree, as_bytes(record), f.meta, f.entropy);
  CHECK(to_string(open(pk, f.good, env)) == record);

  const auto wire = serialize_envelope(env);
  const auto parsed = deserialize_envelope(wire);
  CHECK(parsed == env);
  CHECK(to_string(open(pk, f.good, parsed)) == record);

  const auto j = nlohmann::json::parse(wire);
  CHECK(j["type"] == "ehr.envelope");
  CHECK(j["header"]["type"] == "cpabe.ciphertext");

  const auto empty = seal(pk, f.tree, {}, f.meta, f.entropy);
  CHECK(open(pk, f.good, empty).empty());

  const auto twice = seal(pk, f.tree, as_bytes(record), f.meta, f.entropy);
  CHECK(twice.body != env.body);
  CHECK(twice.nonce != env.nonce);
}

TEST_CASE("open refuses non-satisfying keys") {
  Fixture f;
  const auto env = seal(f.keys.public_key, f.tree, as_bytes("secret"), f.meta, f.entropy);
  CHECK(code_of([&] { open(f.keys.public_key, f.bad, env); }) == Errc::policy_not_satisfied);
}

TEST_CASE("oversize input is rejected") {
  Fixture f;
  const Bytes big(17, 0x41);
  CHECK(code_of([&] { seal(f.keys.public_key, f.tree, big, f.meta, f.entropy, 16); }) == Errc::oversize);
}

TEST_CASE("tampering is detected") {
  Fixture f;
  const auto& pk = f.keys.public_key;
  const auto env = seal(pk, f.tree, as_bytes("lab results"), f.meta, f.entropy);

  SUBCASE("body flip") {
    for (std::size_t i = 0; i < env.body.size(); ++i) {
      auto t = env;
      t.body[i] ^= 0x01;
      CHECK(code_of([&] { open(pk, f.good, t); }) == Errc::authentication_failed);
    }
  }
  SUBCASE("nonce flip") {
    auto t = env;
    t.nonce[3] ^= 0x80;
    CHECK(code_of([&] { open(pk, f.good, t); }) == Errc::authentication_failed);
  }
  SUBCASE("meta change") {
    auto t = env;
    t.meta.owner_id = "owner-2";
    CHECK(code_of([&] { open(pk, f.good, t); }) == Errc::authentication_failed);
  }
  SUBCASE("policy text swap with the same shape") {
    auto j = nlohmann::json::parse(serialize_envelope(env));
    std::string text = j["header"]["policy"];
    text.replace(text.find("position:postdoc"), 16, "position:student");
    j["header"]["policy"] = text;
    const auto t = deserialize_envelope(j.dump());
    // The key still satisfies the altered policy; only the AD binding catches it.
    CHECK(code_of([&] { open(pk, f.good, t); }) == Errc::authentication_failed);
  }
  SUBCASE("header moved onto another body") {
    const auto other = seal(pk, f.tree, as_bytes("lab results"), f.meta, f.entropy);
    auto t = other;
    t.header = env.header;
    CHECK(code_of([&] { open(pk, f.good, t); }) == Errc::authentication_failed);
  }
  SUBCASE("random single-byte flips of the wire form") {
    const auto wire = serialize_envelope(env);
    std::mt19937 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      auto t = wire;
      const auto offset = rng() % t.size();
      t[offset] = static_cast<char>(t[offset] ^ (1 + rng() % 255));
      CAPTURE(offset);
      CHECK(code_of([&] { open(pk, f.good, deserialize_envelope(t)); }) != Errc::io);
    }
  }
}

TEST_CASE("malformed envelopes are rejected") {
  Fixture f;
  const auto env = seal(f.keys.public_key, f.tree, as_bytes("x"), f.meta, f.entropy);
  auto j = nlohmann::json::parse(serialize_envelope(env));
  j["nonce"] = base64url_encode(Bytes(8, 0));
  CHECK(code_of([&] { deserialize_envelope(j.dump()); }) == Errc::malformed);
  j = nlohmann::json::parse(serialize_envelope(env));
  j["v"] = 7;
  CHECK(code_of([&] { deserialize_envelope(j.dump()); }) == Errc::version_mismatch);
  CHECK(code_of([&] { deserialize_envelope("[]"); }) == Errc::malformed);
}
