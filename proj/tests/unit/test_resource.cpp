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

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "abehg/error.hpp"
#include "abehg/resource.hpp"
#include "support/fixtures.hpp"

using namespace abehg;
using namespace abehg::resource;
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

AttributeSet attrs(std::string_view csv) { return AttributeSet::parse_list(csv); }

struct Stack {
  authz::ManualClock clock{1'700'000'000};
  SeededEntropy entropy{"resource-unit"};
  cpabe::KeyPair keys = cpabe::setup(entropy);
  authz::AuthorizationServer as{authz::AuthzConfig{3600, 86400, "svc", 1000}, clock, entropy};
  LocalTokenValidator validator{as};
  MemoryBackend memory;
  ResourceServer rs;

  explicit Stack(StorageBackend* backend = nullptr)
      : rs(validator, keys.public_key, keys.master_key, backend ? *backend : memory, clock, entropy) {}

  authz::AccessToken login(authz::Role role, const AttributeSet& a, authz::ScopeSet scope = {}) {
    const auto c = as.register_client(role, a);
    return as.issue_token(c.client_id, c.client_secret, scope);
  }

  std::string sealed(std::string_view text, std::string_view owner = "owner") {
    const auto env = envelope::seal(keys.public_key, policy::parse_postfix(testing::kPolicyT),
                                    as_bytes(text), {"text/plain", clock.now(), std::string(owner)},
                                    entropy);
    return envelope::serialize_envelope(env);
  }

  Bytes open(const std::string& key_json, const std::string& env_json) {
    return envelope::open(keys.public_key, cpabe::deserialize_private_key(key_json),
                          envelope::deserialize_envelope(env_json));
  }
};

}  // namespace

TEST_CASE("private key issuance") {
  Stack s;
  const auto row2 = s.login(authz::Role::user, testing::row_attrs(1));
  const auto key = cpabe::deserialize_private_key(s.rs.issue_private_key(row2.token));
  CHECK(key.components.size() == 2);
  CHECK(key.attrs == testing::row_attrs(1));
  CHECK(code_of([&] { s.rs.issue_private_key(row2.token, "someone-else"); }) == Errc::forbidden);

  const auto owner = s.login(authz::Role::owner, {});
  CHECK(code_of([&] { s.rs.issue_private_key(owner.token); }) == Errc::not_found);

  s.clock.advance(3600);
  CHECK(code_of([&] { s.rs.issue_private_key(row2.token); }) == Errc::unauthorized);
  CHECK(code_of([&] { s.rs.issue_private_key(row2.refresh_token); }) == Errc::unauthorized);
}

TEST_CASE("issued keys open T records exactly for satisfying rows") {
  Stack s;
  const auto owner = s.login(authz::Role::owner, {});
  const auto id = s.rs.put_record(owner.token, s.sealed("ct scan: clear"));
  for (std::size_t row = 0; row < testing::kUserTable.size(); ++row) {
    CAPTURE(row);
    const auto user = s.login(authz::Role::user, testing::row_attrs(row));
    const auto key = s.rs.issue_private_key(user.token);
    const auto env = s.rs.get_record(user.token, id);
    if (testing::kUserTable[row].satisfies) {
      CHECK(to_string(s.open(key, env)) == "ct scan: clear");
    } else {
      CHECK(code_of([&] { s.open(key, env); }) == Errc::policy_not_satisfied);
    }
  }
}

TEST_CASE("put and get") {
  Stack s;
  const auto owner = s.login(authz::Role::owner, {});
  const auto reader = s.login(authz::Role::user, attrs(testing::kS1));
  const auto env = s.sealed("x-ray");

  const auto id = s.rs.put_record(owner.token, env);
  CHECK(base64url_decode(id).size() == 16);
  CHECK(s.rs.get_record(reader.token, id) == env);
  CHECK(code_of([&] { s.rs.get_record(reader.token, "AAAAAAAAAAAAAAAAAAAAAA"); }) == Errc::not_found);
  CHECK(code_of([&] { s.rs.get_record(reader.token, "../../etc/passwd"); }) == Errc::not_found);

  CHECK(code_of([&] { s.rs.put_record(reader.token, env); }) == Errc::forbidden);
  const auto read_only = s.login(authz::Role::owner, {}, {"ehr.read"});
  CHECK(code_of([&] { s.rs.put_record(read_only.token, env); }) == Errc::forbidden);
  CHECK(code_of([&] { s.rs.put_record(owner.token, "{\"v\":1}"); }) == Errc::bad_request);
  CHECK(code_of([&] { s.rs.put_record(owner.token, env, std::string_view("a b 2of2")); }) ==
        Errc::bad_request);
  CHECK_NOTHROW(s.rs.put_record(owner.token, env, policy::serialize_policy(
                                                      policy::parse_postfix(testing::kPolicyT))));

  s.as.revoke(reader.token);
  CHECK(code_of([&] { s.rs.get_record(reader.token, id); }) == Errc::unauthorized);
  CHECK(code_of([&] { s.rs.get_record(owner.refresh_token, id); }) == Errc::unauthorized);
}

TEST_CASE("listing") {
  Stack s;
  const auto a = s.login(authz::Role::owner, {});
  const auto b = s.login(authz::Role::owner, {});
  CHECK(s.rs.list_records(a.token).empty());

  std::vector<std::string> ids;
  ids.push_back(s.rs.put_record(a.token, s.sealed("one")));
  ids.push_back(s.rs.put_record(b.token, s.sealed("two")));
  s.clock.advance(5);
  ids.push_back(s.rs.put_record(a.token, s.sealed("three")));

  const auto all = s.rs.list_records(a.token);
  REQUIRE(all.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(all[i].record_id == ids[i]);
  CHECK(all[0].policy_text == policy::serialize_policy(policy::parse_postfix(testing::kPolicyT)));
  CHECK(all[0].meta.content_type == "text/plain");

  const auto mine = s.rs.list_records(a.token, a.client_id);
  REQUIRE(mine.size() == 2);
  CHECK(mine[0].record_id == ids[0]);
  CHECK(mine[1].record_id == ids[2]);
}

TEST_CASE("update and delete are owner-only") {
  Stack s;
  const auto owner = s.login(authz::Role::owner, {});
  const auto other = s.login(authz::Role::owner, {});
  const auto id = s.rs.put_record(owner.token, s.sealed("v1"));

  const auto v2 = s.sealed("v2");
  CHECK(code_of([&] { s.rs.update_record(other.token, id, v2); }) == Errc::forbidden);
  CHECK(code_of([&] { s.rs.delete_record(other.token, id); }) == Errc::forbidden);

  s.clock.advance(10);
  s.rs.update_record(owner.token, id, v2);
  CHECK(s.rs.get_record(owner.token, id) == v2);
  const auto listed = s.rs.list_records(owner.token);
  REQUIRE(listed.size() == 1);
  CHECK(listed[0].updated_at == listed[0].created_at + 10);

  s.rs.delete_record(owner.token, id);
  CHECK(code_of([&] { s.rs.get_record(owner.token, id); }) == Errc::not_found);
  CHECK(code_of([&] { s.rs.delete_record(owner.token, id); }) == Errc::not_found);
  CHECK(code_of([&] { s.rs.update_record(owner.token, id, v2); }) == Errc::not_found);
}

TEST_CASE("directory backend persists and never holds plaintext") {
  const auto dir = std::filesystem::temp_directory_path() / "abehg-resource-unit";
  std::filesystem::remove_all(dir);
  const std::string sentinel = "SENTINEL-7f3a-plaintext-marker";
  std::string first_id;
  {
    DirectoryBackend backend(dir);
    Stack s(&backend);
    const auto owner = s.login(authz::Role::owner, {});
    for (int i = 0; i < 3; ++i) {
      const auto id = s.rs.put_record(owner.token, s.sealed(sentinel + std::to_string(i)));
      if (i == 0) first_id = id;
    }
    CHECK(backend.list().size() == 3);
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), {});
    CHECK(bytes.find(sentinel) == std::string::npos);
    CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
  }
  {
    DirectoryBackend backend(dir);
    Stack s(&backend);
    const auto reader = s.login(authz::Role::user, attrs(testing::kS0));
    const auto key = s.rs.issue_private_key(reader.token);
    CHECK(to_string(s.open(key, s.rs.get_record(reader.token, first_id))) == sentinel + "0");

    // A restarted server keeps upload order.
    const auto owner = s.login(authz::Role::owner, {});
    const auto late = s.rs.put_record(owner.token, s.sealed("late"));
    const auto listed = s.rs.list_records(reader.token);
    REQUIRE(listed.size() == 4);
    CHECK(listed[0].record_id == first_id);
    CHECK(listed[3].record_id == late);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("stored record encoding") {
  StoredRecord r{"id", "owner", "{\"x\":1}", "a b 2of2", {"text/plain", 5, "o"}, 5, 6, 7};
  CHECK(deserialize_record(serialize_record(r)) == r);
  CHECK(code_of([] { deserialize_record("{}"); }) == Errc::malformed);
  auto j = nlohmann::json::parse(serialize_record(r));
  j.erase("seq");
  CHECK(code_of([&] { deserialize_record(j.dump()); }) == Errc::malformed);
}
