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
#include <httplib.h>
#include <json.hpp>
#include <sstream>

#include "abehg/cpabe.hpp"
#include "abehg/demo.hpp"
#include "abehg/envelope.hpp"
#include "abehg/service.hpp"
#include "support/fixtures.hpp"

using namespace abehg;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

// Key files for one authority, written once per test binary run.
struct KeyFiles {
  fs::path dir = fs::temp_directory_path() / "abehg-service-unit";
  fs::path pk = dir / "authority.gpk";
  fs::path msk = dir / "authority.msk";

  KeyFiles() {
    fs::remove_all(dir);
    fs::create_directories(dir);
    SystemEntropy entropy;
    const auto keys = cpabe::setup(entropy);
    std::ofstream(pk) << cpabe::serialize_artifact(keys.public_key);
    std::ofstream(msk) << cpabe::serialize_artifact(keys.master_key);
  }
};

const KeyFiles& keyfiles() {
  static const KeyFiles files;
  return files;
}

config::ServiceConfig test_config() {
  config::ServiceConfig cfg;
  cfg.port = 0;
  cfg.public_key = keyfiles().pk;
  cfg.master_key = keyfiles().msk;
  cfg.service_secret = "svc-test-secret";
  cfg.pbkdf2_iterations = 1000;
  cfg.threads = 4;
  return cfg;
}

struct Running {
  SystemEntropy entropy;
  authz::ManualClock clock{authz::SystemClock().now()};
  service::Service svc;
  httplib::Client cli;

  explicit Running(service::Mode mode = service::Mode::all, config::ServiceConfig cfg = test_config())
      : svc(mode, std::move(cfg), entropy, clock), cli((svc.start(), svc.base_url())) {}

  httplib::Result post(const std::string& path, const json& body, const std::string& bearer = {}) {
    httplib::Headers h;
    if (!bearer.empty()) h.emplace("Authorization", "Bearer " + bearer);
    return cli.Post(path, h, body.dump(), "application/json");
  }

  json login(const std::string& role, const std::string& attrs = {}) {
    json reg{{"role", role}};
    if (!attrs.empty()) reg["attributes"] = attrs;
    const auto creds = json::parse(post("/oauth/register", reg)->body);
    auto tok = json::parse(post("/oauth/token", {{"grant_type", "client_credentials"},
                                                 {"client_id", creds["client_id"]},
                                                 {"client_secret", creds["client_secret"]}})
                               ->body);
    tok["client_id"] = creds["client_id"];
    return tok;
  }
};

std::string error_of(const httplib::Result& res) { return json::parse(res->body).value("error", ""); }

}  // namespace

TEST_CASE("health endpoint and startup failures") {
  Running r;
  const auto res = r.cli.Get("/healthz");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["status"] == "ok");

  auto cfg = test_config();
  cfg.port = r.svc.port();
  SystemEntropy entropy;
  authz::SystemClock clock;
  service::Service clash(service::Mode::all, cfg, entropy, clock);
  CHECK_THROWS_AS(clash.bind(), service::StartupError);

  cfg = test_config();
  cfg.master_key = keyfiles().dir / "missing.msk";
  CHECK_THROWS_AS(service::Service(service::Mode::all, cfg, entropy, clock), service::MissingKeyMaterial);

  SeededEntropy seeded(1);
  CHECK_THROWS_AS(service::Service(service::Mode::all, test_config(), seeded, clock), Error);
}

TEST_CASE("oauth endpoints") {
  Running r;
  const auto creds = json::parse(r.post("/oauth/register", {{"role", "user"}, {"attributes", {"position:phd", "university:amu"}}})->body);

  auto res = r.post("/oauth/token", {{"grant_type", "client_credentials"},
                                     {"client_id", creds["client_id"]},
                                     {"client_secret", "wrong"}});
  CHECK(res->status == 401);
  CHECK(error_of(res) == "unauthorized");

  res = r.post("/oauth/token", {{"grant_type", "client_credentials"},
                                {"client_id", creds["client_id"]},
                                {"client_secret", creds["client_secret"]},
                                {"scope", "ehr.write"}});
  CHECK(res->status == 400);
  CHECK(error_of(res) == "invalid_scope");

  // Form encoding, as most OAuth clients send it.
  res = r.cli.Post("/oauth/token",
                   "grant_type=client_credentials&client_id=" + creds["client_id"].get<std::string>() +
                       "&client_secret=" + creds["client_secret"].get<std::string>() + "&scope=ehr.read",
                   "application/x-www-form-urlencoded");
  REQUIRE(res->status == 200);
  const auto tok = json::parse(res->body);
  CHECK(tok["token_type"] == "Bearer");
  CHECK(tok["expires_in"] == 3600);
  CHECK(tok["scope"] == "ehr.read");

  res = r.post("/oauth/introspect", {{"token", tok["access_token"]}});
  CHECK(res->status == 401);
  res = r.post("/oauth/introspect", {{"token", tok["access_token"]}}, "svc-test-secret");
  REQUIRE(res->status == 200);
  auto info = json::parse(res->body);
  CHECK(info["active"] == true);
  CHECK(info["client_id"] == creds["client_id"]);
  CHECK(info["attributes"] == json({"position:phd", "university:amu"}));

  res = r.post("/oauth/token", {{"grant_type", "refresh_token"}, {"refresh_token", tok["refresh_token"]}});
  REQUIRE(res->status == 200);
  const auto next = json::parse(res->body);
  res = r.post("/oauth/token", {{"grant_type", "refresh_token"}, {"refresh_token", tok["refresh_token"]}});
  CHECK(res->status == 400);
  CHECK(error_of(res) == "invalid_grant");
  info = json::parse(r.post("/oauth/introspect", {{"token", tok["access_token"]}}, "svc-test-secret")->body);
  CHECK(info == json{{"active", false}});

  CHECK(r.post("/oauth/revoke", {{"token", next["access_token"]}})->status == 200);
  CHECK(r.post("/oauth/revoke", {{"token", next["access_token"]}})->status == 200);
  CHECK(r.post("/oauth/token", {{"grant_type", "password"}})->status == 400);
  CHECK(r.post("/oauth/register", {{"role", "user"}})->status == 400);
  CHECK(r.cli.Post("/oauth/register", "{not json", "application/json")->status == 400);
}

TEST_CASE("record endpoints") {
  Running r;
  const auto owner = r.login("owner");
  const auto reader = r.login("user", std::string(testing::kUserTable[1].attributes));
  const std::string otok = owner["access_token"], utok = reader["access_token"];

  const auto pk = cpabe::deserialize_public_key(r.cli.Get("/aa/public-key")->body);
  const auto env = envelope::serialize_envelope(envelope::seal(
      pk, policy::parse_postfix(testing::kPolicyT), as_bytes("mri"), {"text/plain", 1, "o"}, r.entropy));
  const httplib::Headers oh{{"Authorization", "Bearer " + otok}};
  const httplib::Headers uh{{"Authorization", "Bearer " + utok}};

  auto res = r.cli.Put("/records", oh, env, "application/json");
  REQUIRE(res->status == 201);
  const std::string id = json::parse(res->body)["record_id"];
  CHECK(r.cli.Put("/records", uh, env, "application/json")->status == 403);
  CHECK(r.cli.Put("/records", env, "application/json")->status == 401);
  CHECK(r.cli.Put("/records", oh, json{{"envelope", env}, {"policy", "a b 2of2"}}.dump(), "application/json")->status == 400);
  CHECK(r.cli.Put("/records", oh, "{\"v\":1}", "application/json")->status == 400);

  res = r.cli.Get("/records/" + id, uh);
  REQUIRE(res->status == 200);
  CHECK(res->body == env);
  CHECK(r.cli.Get("/records/AAAAAAAAAAAAAAAAAAAAAA", uh)->status == 404);
  CHECK(r.cli.Get("/records/" + id)->status == 401);
  CHECK(r.cli.Get("/records/" + id, {{"Authorization", "Bearer " + reader["refresh_token"].get<std::string>()}})->status == 401);

  const auto list = json::parse(r.cli.Get("/records", uh)->body)["records"];
  REQUIRE(list.size() == 1);
  CHECK(list[0]["record_id"] == id);
  CHECK_FALSE(list[0].contains("envelope"));
  CHECK(json::parse(r.cli.Get("/records?owner=nobody", uh)->body)["records"].empty());

  res = r.post("/aa/keys", json::object(), utok);
  REQUIRE(res->status == 200);
  const auto sk = cpabe::deserialize_private_key(json::parse(res->body)["private_key"].dump());
  CHECK(sk.components.size() == 2);
  CHECK(to_string(envelope::open(pk, sk, envelope::deserialize_envelope(env))) == "mri");
  CHECK(r.post("/aa/keys", json::object(), otok)->status == 404);

  CHECK(r.cli.Delete("/records/" + id, uh)->status == 403);
  CHECK(r.cli.Put("/records/" + id, oh, env, "application/json")->status == 200);
  CHECK(r.cli.Delete("/records/" + id, oh)->status == 200);
  CHECK(r.cli.Get("/records/" + id, uh)->status == 404);

  r.clock.advance(3600);
  CHECK(r.cli.Get("/records", uh)->status == 401);
}

TEST_CASE("demo transcript") {
  Running r;
  demo::DemoOptions opts;
  opts.authz_url = opts.resource_url = r.svc.base_url();
  SystemEntropy entropy;

  SUBCASE("S0 succeeds") {
    opts.user_attrs = policy::AttributeSet::parse_list(testing::kS0);
    std::ostringstream out;
    const auto res = demo::run_demo(opts, entropy, out);
    CHECK(res.success);
    CHECK(res.exit_code() == 0);
    CHECK(res.recovered == demo::sample_record());
    std::vector<std::string> labels;
    for (const auto& s : res.steps) labels.push_back(s.step);
    CHECK(labels == std::vector<std::string>{"DO-1", "DO-2", "DO-3", "AA", "DU-5", "DU-6", "DU-7", "DU-8"});
    CHECK(out.str().find("[DU-8]") != std::string::npos);
  }
  SUBCASE("S1 fetches but cannot open") {
    opts.user_attrs = policy::AttributeSet::parse_list(testing::kS1);
    opts.json = true;
    std::ostringstream out;
    const auto res = demo::run_demo(opts, entropy, out);
    CHECK_FALSE(res.success);
    CHECK(res.failed_step == "DU-8");
    CHECK(res.error == Errc::policy_not_satisfied);
    CHECK(res.exit_code() == 3);
    std::string line, last;
    std::istringstream lines(out.str());
    while (std::getline(lines, line)) last = line;
    CHECK(json::parse(last)["error"] == "policy_not_satisfied");
  }
  SUBCASE("expired token fails the fetch") {
    opts.before_fetch = [&](std::int64_t expires_in) { r.clock.advance(expires_in); };
    std::ostringstream out;
    const auto res = demo::run_demo(opts, entropy, out);
    CHECK(res.failed_step == "DU-8");
    CHECK(res.error == Errc::unauthorized);
    CHECK(res.exit_code() == 1);
  }
  SUBCASE("unreachable server names the first step") {
    opts.authz_url = "http://127.0.0.1:1";
    std::ostringstream out;
    const auto res = demo::run_demo(opts, entropy, out);
    CHECK(res.failed_step == "DO-1");
    CHECK(res.steps.size() == 1);
  }
}

TEST_CASE("split topology introspects over HTTP") {
  Running authz(service::Mode::authz);
  auto cfg = test_config();
  cfg.authz_url = authz.svc.base_url();
  Running res(service::Mode::resource, cfg);
  CHECK(authz.cli.Get("/records")->status == 404);

  demo::DemoOptions opts;
  opts.authz_url = authz.svc.base_url();
  opts.resource_url = res.svc.base_url();
  std::ostringstream out;
  SystemEntropy entropy;
  const auto result = demo::run_demo(opts, entropy, out);
  CHECK(result.success);

  cfg.service_secret = "wrong";
  Running bad(service::Mode::resource, cfg);
  const auto tok = authz.login("owner");
  const auto r = bad.cli.Get("/records", {{"Authorization", "Bearer " + tok["access_token"].get<std::string>()}});
  CHECK(r->status == 500);

  CHECK_THROWS_AS(Running(service::Mode::resource, test_config()), Error);
}
