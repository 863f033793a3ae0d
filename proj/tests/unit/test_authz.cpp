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
#include <thread>

#include "abehg/authz.hpp"
#include "abehg/error.hpp"
#include "support/fixtures.hpp"

using namespace abehg;
using namespace abehg::authz;

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

struct Server {
  ManualClock clock{1'700'000'000};
  SeededEntropy entropy{"authz-unit"};
  AuthorizationServer as{AuthzConfig{3600, 86400, "svc-secret", 1000}, clock, entropy};
};

const ScopeSet kRead{"ehr.read"};

policy::AttributeSet attrs(std::string_view csv) { return policy::AttributeSet::parse_list(csv); }

}  // namespace

TEST_CASE("scope helpers") {
  CHECK(parse_scope("ehr.read  ehr.write") == ScopeSet{"ehr.read", "ehr.write"});
  CHECK(parse_scope("").empty());
  CHECK(format_scope({"ehr.write", "ehr.read"}) == "ehr.read ehr.write");
  CHECK(parse_role("owner") == Role::owner);
  CHECK(code_of([] { parse_role("admin"); }) == Errc::bad_request);
}

TEST_CASE("registration") {
  Server s;
  const auto a = s.as.register_client(Role::user, attrs(testing::kS0));
  const auto b = s.as.register_client(Role::user, attrs(testing::kS0));
  CHECK(a.client_id != b.client_id);
  CHECK(a.client_secret != b.client_secret);
  CHECK(code_of([&] { s.as.register_client(Role::user, {}); }) == Errc::bad_request);
  CHECK_NOTHROW(s.as.register_client(Role::owner, {}));

  const auto rec = s.as.client(a.client_id);
  REQUIRE(rec);
  CHECK(rec->registered_attrs == attrs(testing::kS0));
  CHECK(rec->secret_hash.size() == 32);
  CHECK(to_string(rec->secret_hash).find(a.client_secret) == std::string::npos);

  s.as.register_client(Role::user, attrs(testing::kS1), "alice@example.org");
  CHECK(code_of([&] { s.as.register_client(Role::user, attrs(testing::kS1), "alice@example.org"); }) ==
        Errc::conflict);
}

TEST_CASE("token issuance follows the role's scopes") {
  Server s;
  const auto user = s.as.register_client(Role::user, attrs(testing::kS0));
  const auto owner = s.as.register_client(Role::owner, {});

  const auto tok = s.as.issue_token(user.client_id, user.client_secret, kRead);
  CHECK(tok.expires_in == 3600);
  CHECK(tok.scope == kRead);
  CHECK(base64url_decode(tok.token).size() == 32);
  CHECK(base64url_decode(tok.refresh_token).size() == 32);

  CHECK(code_of([&] { s.as.issue_token(user.client_id, user.client_secret, {"ehr.write"}); }) ==
        Errc::invalid_scope);
  CHECK(code_of([&] { s.as.issue_token(user.client_id, "wrong", kRead); }) == Errc::unauthorized);
  CHECK(code_of([&] { s.as.issue_token("nobody", user.client_secret, kRead); }) ==
        Errc::unauthorized);

  const auto otok = s.as.issue_token(owner.client_id, owner.client_secret, {});
  CHECK(otok.scope == ScopeSet{"ehr.read", "ehr.write"});
  CHECK(s.as.issue_token(user.client_id, user.client_secret, {}).scope == kRead);
}

TEST_CASE("introspection and expiry boundary") {
  Server s;
  const auto user = s.as.register_client(Role::user, attrs(testing::kS0));
  const auto tok = s.as.issue_token(user.client_id, user.client_secret, kRead);

  auto info = s.as.introspect("svc-secret", tok.token);
  CHECK(info.active);
  CHECK(info.client_id == user.client_id);
  CHECK(info.scope == kRead);
  CHECK(info.expires_at == tok.issued_at + 3600);
  CHECK(info.attributes == attrs(testing::kS0));
  CHECK(code_of([&] { s.as.introspect("nope", tok.token); }) == Errc::unauthorized);

  s.clock.set(info.expires_at - 1);
  CHECK(s.as.introspect_trusted(tok.token).active);
  s.clock.set(info.expires_at);
  info = s.as.introspect_trusted(tok.token);
  CHECK_FALSE(info.active);
  CHECK(info.client_id.empty());
  CHECK(info.scope.empty());
  CHECK(info.attributes.empty());

  SeededEntropy junk(4);
  Bytes raw(32);
  junk.fill(raw);
  CHECK_FALSE(s.as.introspect_trusted(base64url_encode(raw)).active);
}

TEST_CASE("refresh rotates single-use") {
  Server s;
  const auto user = s.as.register_client(Role::user, attrs(testing::kS2));
  const auto tok = s.as.issue_token(user.client_id, user.client_secret, kRead);

  const auto next = s.as.refresh(tok.refresh_token);
  CHECK(next.token != tok.token);
  CHECK(next.scope == tok.scope);
  CHECK_FALSE(s.as.introspect_trusted(tok.token).active);
  CHECK(s.as.introspect_trusted(next.token).active);
  CHECK(code_of([&] { s.as.refresh(tok.refresh_token); }) == Errc::invalid_grant);
  CHECK(code_of([&] { s.as.refresh("garbage"); }) == Errc::invalid_grant);

  // A refresh token is not an access token.
  CHECK_FALSE(s.as.introspect_trusted(next.refresh_token).active);
  // An access token is not a refresh token.
  CHECK(code_of([&] { s.as.refresh(next.token); }) == Errc::invalid_grant);

  s.clock.advance(86400);
  CHECK(code_of([&] { s.as.refresh(next.refresh_token); }) == Errc::invalid_grant);
}

TEST_CASE("revocation is immediate and idempotent") {
  Server s;
  const auto user = s.as.register_client(Role::user, attrs(testing::kS0));
  const auto tok = s.as.issue_token(user.client_id, user.client_secret, kRead);
  s.as.revoke(tok.token);
  CHECK_FALSE(s.as.introspect_trusted(tok.token).active);
  CHECK_NOTHROW(s.as.revoke(tok.token));
  CHECK_NOTHROW(s.as.revoke("never-issued"));
  CHECK(code_of([&] { s.as.refresh(tok.refresh_token); }) == Errc::invalid_grant);

  const auto other = s.as.issue_token(user.client_id, user.client_secret, kRead);
  s.as.revoke(other.refresh_token);
  CHECK_FALSE(s.as.introspect_trusted(other.token).active);
}

TEST_CASE("concurrent refreshes of one token yield one winner") {
  ManualClock clock(1'700'000'000);
  SystemEntropy entropy;
  AuthorizationServer as(AuthzConfig{3600, 86400, "svc", 1000}, clock, entropy);
  const auto user = as.register_client(Role::user, attrs(testing::kS0));
  const auto tok = as.issue_token(user.client_id, user.client_secret, kRead);

  std::atomic<int> wins{0}, losses{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      try {
        as.refresh(tok.refresh_token);
        ++wins;
      } catch (const Error& e) {
        if (e.code() == Errc::invalid_grant) ++losses;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(wins == 1);
  CHECK(losses == 7);
}
