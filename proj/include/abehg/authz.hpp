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

// OAuth 2.0 authorization server, client-credentials style.
//
// The data owner never approves individual requests: a registered client's
// credential pair is its authorization grant, and content access is left to
// the CPABE layer. Tokens are opaque server-side references; only their
// SHA-256 digests are stored.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "abehg/codec.hpp"
#include "abehg/entropy.hpp"
#include "abehg/policy.hpp"

namespace abehg::authz {

inline constexpr std::string_view kScopeRead = "ehr.read";
inline constexpr std::string_view kScopeWrite = "ehr.write";

using ScopeSet = std::set<std::string, std::less<>>;

enum class Role { owner, user };

std::string_view to_string(Role role);
/// Throws Error(Errc::bad_request) for anything but "owner" / "user".
Role parse_role(std::string_view text);

ScopeSet allowed_scopes(Role role);
/// Space-separated scope string, as on the wire.
ScopeSet parse_scope(std::string_view text);
std::string format_scope(const ScopeSet& scope);

/// Seconds since the unix epoch.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now() const = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now() const override;
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::int64_t start) : now_(start) {}
  std::int64_t now() const override { return now_.load(); }
  void set(std::int64_t t) { now_.store(t); }
  void advance(std::int64_t seconds) { now_.fetch_add(seconds); }

 private:
  std::atomic<std::int64_t> now_;
};

struct ClientRecord {
  std::string client_id;
  Bytes secret_salt;
  Bytes secret_hash;
  Role role = Role::user;
  policy::AttributeSet registered_attrs;
  std::int64_t created_at = 0;
  std::optional<std::string> external_id;
};

struct Credentials {
  std::string client_id;
  std::string client_secret;
};

struct AccessToken {
  std::string token;
  std::string client_id;
  ScopeSet scope;
  std::int64_t issued_at = 0;
  std::int64_t expires_in = 0;
  std::string refresh_token;
};

/// Introspection result. When inactive every other field is empty.
struct TokenInfo {
  bool active = false;
  std::string client_id;
  ScopeSet scope;
  std::int64_t expires_at = 0;
  Role role = Role::user;
  policy::AttributeSet attributes;
};

struct AuthzConfig {
  std::int64_t token_lifetime = 3600;
  std::int64_t refresh_lifetime = 30 * 24 * 3600;
  /// Shared credential the resource server presents to introspect.
  std::string service_secret;
  unsigned pbkdf2_iterations = 10000;
};

class AuthorizationServer {
 public:
  AuthorizationServer(AuthzConfig config, const Clock& clock, Entropy& entropy);

  /// The secret is returned here and nowhere else. Users need attributes;
  /// a repeated external_id is Errc::conflict.
  Credentials register_client(Role role, const policy::AttributeSet& attrs,
                              std::optional<std::string> external_id = std::nullopt);

  /// Empty scope requests the role's full allowance.
  /// Errc::unauthorized for bad credentials, Errc::invalid_scope past the role's allowance.
  AccessToken issue_token(std::string_view client_id, std::string_view client_secret,
                          const ScopeSet& scope);

  /// Single-use rotation; the old access token is revoked. Errc::invalid_grant otherwise.
  AccessToken refresh(std::string_view refresh_token);

  /// Errc::unauthorized unless service_credential matches the configured secret.
  TokenInfo introspect(std::string_view service_credential, std::string_view token) const;
  /// Co-hosted resource servers skip the service credential.
  TokenInfo introspect_trusted(std::string_view token) const;

  /// Idempotent. Either half of a pair revokes both.
  void revoke(std::string_view token);

  std::optional<ClientRecord> client(std::string_view client_id) const;

  const AuthzConfig& config() const { return config_; }

 private:
  struct TokenState {
    std::string client_id;
    ScopeSet scope;
    std::int64_t issued_at = 0;
    std::int64_t expires_at = 0;
    std::int64_t refresh_expires_at = 0;
    std::string access_digest;
    std::string refresh_digest;
    bool revoked = false;
  };

  AccessToken mint(const std::string& client_id, const ScopeSet& scope);
  Bytes hash_secret(std::string_view secret, std::span<const std::uint8_t> salt) const;

  AuthzConfig config_;
  const Clock& clock_;
  Entropy& entropy_;

  mutable std::mutex mutex_;
  std::unordered_map<std::string, ClientRecord> clients_;
  std::set<std::string, std::less<>> external_ids_;
  // Keyed by hex SHA-256 of the token; both maps share one state per pair.
  std::unordered_map<std::string, std::shared_ptr<TokenState>> access_;
  std::unordered_map<std::string, std::shared_ptr<TokenState>> refresh_;
};

}  // namespace abehg::authz
