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

#include <cstdlib>

#include "abehg/config.hpp"
#include "abehg/error.hpp"

using namespace abehg;
using namespace abehg::config;

namespace {

bool rejects(std::string_view text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code() == Errc::config;
  }
  return false;
}

}  // namespace

TEST_CASE("key/value parsing") {
  const auto kv = parse_key_values(
      "# header\n"
      "\n"
      "  service_secret = \"a \\\"quoted\\\" # value\"  # trailing\n"
      "authz_url=http://127.0.0.1:9000\r\n"
      "token_lifetime = 60 # seconds\n");
  CHECK(kv.size() == 3);
  CHECK(kv.at("service_secret") == "a \"quoted\" # value");
  CHECK(kv.at("authz_url") == "http://127.0.0.1:9000");
  CHECK(kv.at("token_lifetime") == "60");
}

TEST_CASE("typed config") {
  const auto cfg = parse_config(
      "bind = \"0.0.0.0:0\"\n"
      "storage_dir = records\n"
      "public_key = /keys/a.gpk\n"
      "master_key = a.msk\n"
      "token_lifetime = 120\n"
      "pbkdf2_iterations = 5000\n",
      "/etc/abehg");
  CHECK(cfg.host == "0.0.0.0");
  CHECK(cfg.port == 0);
  CHECK(cfg.storage_dir == "/etc/abehg/records");
  CHECK(cfg.public_key == "/keys/a.gpk");
  CHECK(cfg.master_key == "/etc/abehg/a.msk");
  CHECK(cfg.token_lifetime == 120);
  CHECK(cfg.refresh_lifetime == 30 * 24 * 3600);
  CHECK(cfg.pbkdf2_iterations == 5000);

  const auto defaults = parse_config("");
  CHECK(defaults.port == 8080);
  CHECK(defaults.storage_dir.empty());
}

TEST_CASE("bad configs are rejected") {
  CHECK(rejects("bind = localhost"));
  CHECK(rejects("bind = \"h:70000\""));
  CHECK(rejects("token_lifetime = 0"));
  CHECK(rejects("token_lifetime = 1h"));
  CHECK(rejects("colour = blue"));
  CHECK(rejects("[server]\nbind = \"h:1\""));
  CHECK(rejects("service_secret = \"open"));
  CHECK(rejects("service_secret = two words"));
  CHECK(rejects("a = 1\na = 2"));
  CHECK(rejects("just text"));
  CHECK(rejects("Bind = \"h:1\""));
}

TEST_CASE("config path resolution") {
  CHECK(resolve_config_path(std::string("x.toml")) == std::filesystem::path("x.toml"));
  ::setenv("ABEHG_CONFIG", "/tmp/env.toml", 1);
  CHECK(resolve_config_path(std::nullopt) == std::filesystem::path("/tmp/env.toml"));
  ::unsetenv("ABEHG_CONFIG");
  CHECK_FALSE(resolve_config_path(std::nullopt).has_value());
  CHECK_THROWS_AS(load_config("/nonexistent/abehg.toml"), Error);
}
