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

#pragma once

// Service configuration: a flat TOML-style file of `key = value` lines.
//
//   # comments run to end of line
//   bind = "127.0.0.1:8080"
//   storage_dir = "records"        # relative to the config file
//   public_key = "authority.gpk"
//   master_key = "authority.msk"
//   token_lifetime = 3600
//
// Strings may be quoted ("..." with \" and \\ escapes) or bare. Unknown keys
// and repeated keys are errors, so typos fail loudly.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace abehg::config {

inline constexpr std::string_view kConfigEnv = "ABEHG_CONFIG";

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks an ephemeral port
  std::filesystem::path storage_dir;  // empty keeps records in memory
  std::filesystem::path public_key;
  std::filesystem::path master_key;
  std::int64_t token_lifetime = 3600;
  std::int64_t refresh_lifetime = 30 * 24 * 3600;
  std::string service_secret;
  std::string authz_url;     // set when the resource server introspects over HTTP
  std::string resource_url;  // where the demo client sends resource requests
  unsigned pbkdf2_iterations = 100000;
  std::size_t max_record_bytes = std::size_t{64} << 20;
  int threads = 8;
};

/// Raw key/value pairs. Throws Error(Errc::config) naming the offending line.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Relative paths resolve against base_dir.
ServiceConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ServiceConfig load_config(const std::filesystem::path& path);

/// The explicit path if given, else $ABEHG_CONFIG, else nothing.
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& flag);

}  // namespace abehg::config
