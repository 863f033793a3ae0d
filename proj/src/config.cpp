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

#include "abehg/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "abehg/error.hpp"

namespace abehg::config {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(Errc::config, "config line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
  }
  return true;
}

// Parses the value part of a line, dropping any trailing comment.
std::string parse_value(std::string_view rest, std::size_t line) {
  rest = trim(rest);
  if (rest.empty()) fail(line, "missing value");
  if (rest.front() != '"') {
    const auto hash = rest.find('#');
    const auto v = trim(rest.substr(0, hash));
    if (v.empty()) fail(line, "missing value");
    if (v.find_first_of(" \t\"") != std::string_view::npos) fail(line, "bare values cannot contain spaces or quotes");
    return std::string(v);
  }
  std::string out;
  std::size_t i = 1;
  for (; i < rest.size() && rest[i] != '"'; ++i) {
    if (rest[i] == '\\') {
      if (++i >= rest.size()) break;
      if (rest[i] != '"' && rest[i] != '\\') fail(line, "unsupported escape");
    }
    out += rest[i];
  }
  if (i >= rest.size()) fail(line, "unterminated string");
  const auto tail = trim(rest.substr(i + 1));
  if (!tail.empty() && tail.front() != '#') fail(line, "unexpected text after value");
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, T min, T max) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || out < min || out > max) {
    throw Error(Errc::config, "config key '" + key + "' must be an integer in [" +
                                  std::to_string(min) + ", " + std::to_string(max) + "]");
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') fail(line_no, "sections are not supported");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) fail(line_no, "invalid key '" + key + "'");
    if (out.contains(key)) fail(line_no, "duplicate key '" + key + "'");
    out.emplace(key, parse_value(line.substr(eq + 1), line_no));
  }
  return out;
}

ServiceConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ServiceConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "bind") {
      const auto colon = value.rfind(':');
      if (colon == std::string::npos || colon == 0) {
        throw Error(Errc::config, "config key 'bind' must look like host:port");
      }
      cfg.host = value.substr(0, colon);
      cfg.port = parse_number<int>(key, value.substr(colon + 1), 0, 65535);
    } else if (key == "storage_dir") {
      cfg.storage_dir = resolve(base_dir, value);
    } else if (key == "public_key") {
      cfg.public_key = resolve(base_dir, value);
    } else if (key == "master_key") {
      cfg.master_key = resolve(base_dir, value);
    } else if (key == "token_lifetime") {
      cfg.token_lifetime = parse_number<std::int64_t>(key, value, 1, std::int64_t{1} << 40);
    } else if (key == "refresh_lifetime") {
      cfg.refresh_lifetime = parse_number<std::int64_t>(key, value, 1, std::int64_t{1} << 40);
    } else if (key == "service_secret") {
      cfg.service_secret = value;
    } else if (key == "authz_url") {
      cfg.authz_url = value;
    } else if (key == "resource_url") {
      cfg.resource_url = value;
    } else if (key == "pbkdf2_iterations") {
      cfg.pbkdf2_iterations = parse_number<unsigned>(key, value, 1, 10'000'000);
    } else if (key == "max_record_bytes") {
      cfg.max_record_bytes = parse_number<std::size_t>(key, value, 1, std::size_t{1} << 34);
    } else if (key == "threads") {
      cfg.threads = parse_number<int>(key, value, 1, 256);
    } else {
      throw Error(Errc::config, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ServiceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return std::filesystem::path(*flag);
  if (const char* env = std::getenv(std::string(kConfigEnv).c_str()); env && *env) {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

}  // namespace abehg::config
