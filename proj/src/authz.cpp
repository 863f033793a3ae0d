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

#include "abehg/authz.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <chrono>

#include "abehg/error.hpp"

namespace abehg::authz {

namespace {

constexpr std::size_t kTokenBytes = 32;
constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kClientIdBytes = 16;

std::string random_token(Entropy& entropy, std::size_t n) {
  Bytes raw(n);
  entropy.fill(raw);
  return base64url_encode(raw);
}

std::string digest(std::string_view token) { return to_hex(sha256(as_bytes(token))); }

}  // namespace

std::string_view to_string(Role role) { return role == Role::owner ? "owner" : "user"; }

Role parse_role(std::string_view text) {
  if (text == "owner") return Role::owner;
  if (text == "user") return Role::user;
  throw Error(Errc::bad_request, "role must be 'owner' or 'user'");
}

ScopeSet allowed_scopes(Role role) {
  if (role == Role::owner) return {std::string(kScopeRead), std::string(kScopeWrite)};
  return {std::string(kScopeRead)};
}

ScopeSet parse_scope(std::string_view text) {
  ScopeSet out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.emplace(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string format_scope(const ScopeSet& scope) {
  std::string out;
  for (const auto& s : scope) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::int64_t SystemClock::now() const {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

AuthorizationServer::AuthorizationServer(AuthzConfig config, const Clock& clock, Entropy& entropy)
    : config_(std::move(config)), clock_(clock), entropy_(entropy) {
  if (config_.token_lifetime <= 0 || config_.refresh_lifetime <= 0) {
    throw Error(Errc::config, "token lifetimes must be positive");
  }
  if (config_.pbkdf2_iterations == 0) throw Error(Errc::config, "pbkdf2 iterations must be positive");
}

Bytes AuthorizationServer::hash_secret(std::string_view secret,
                                       std::span<const std::uint8_t> salt) const {
  Bytes out(32);
  if (PKCS5_PBKDF2_HMAC(secret.data(), static_cast<int>(secret.size()), salt.data(),
                        static_cast<int>(salt.size()), static_cast<int>(config_.pbkdf2_iterations),
                        EVP_sha256(), static_cast<int>(out.size()), out.data()) != 1) {
    throw Error(Errc::io, "PBKDF2 failed");
  }
  return out;
}

Credentials AuthorizationServer::register_client(Role role, const policy::AttributeSet& attrs,
                                                 std::optional<std::string> external_id) {
  if (role == Role::user && attrs.empty()) {
    throw Error(Errc::bad_request, "a user registration needs at least one attribute");
  }
  ClientRecord rec;
  rec.role = role;
  rec.registered_attrs = attrs;
  rec.external_id = external_id;
  rec.secret_salt.resize(kSaltBytes);
  entropy_.fill(rec.secret_salt);
  Credentials creds{"", random_token(entropy_, kTokenBytes)};
  rec.secret_hash = hash_secret(creds.client_secret, rec.secret_salt);

  std::lock_guard lock(mutex_);
  if (external_id && external_ids_.contains(*external_id)) {
    throw Error(Errc::conflict, "external identity is already registered");
  }
  do {
    creds.client_id = "c_" + random_token(entropy_, kClientIdBytes);
  } while (clients_.contains(creds.client_id));
  rec.client_id = creds.client_id;
  rec.created_at = clock_.now();
  if (external_id) external_ids_.insert(*external_id);
  clients_.emplace(rec.client_id, std::move(rec));
  return creds;
}

AccessToken AuthorizationServer::mint(const std::string& client_id, const ScopeSet& scope) {
  auto state = std::make_shared<TokenState>();
  AccessToken tok;
  do {
    tok.token = random_token(entropy_, kTokenBytes);
    state->access_digest = digest(tok.token);
  } while (access_.contains(state->access_digest));
  do {
    tok.refresh_token = random_token(entropy_, kTokenBytes);
    state->refresh_digest = digest(tok.refresh_token);
  } while (refresh_.contains(state->refresh_digest));

  tok.client_id = client_id;
  tok.scope = scope;
  tok.issued_at = clock_.now();
  tok.expires_in = config_.token_lifetime;

  state->client_id = client_id;
  state->scope = scope;
  state->issued_at = tok.issued_at;
  state->expires_at = tok.issued_at + config_.token_lifetime;
  state->refresh_expires_at = tok.issued_at + config_.refresh_lifetime;
  access_.emplace(state->access_digest, state);
  refresh_.emplace(state->refresh_digest, state);
  return tok;
}

AccessToken AuthorizationServer::issue_token(std::string_view client_id,
                                             std::string_view client_secret,
                                             const ScopeSet& scope) {
  std::optional<ClientRecord> rec = client(client_id);
  // Hash even for unknown ids so the failure path costs the same.
  const Bytes salt = rec ? rec->secret_salt : Bytes(kSaltBytes, 0);
  const Bytes computed = hash_secret(client_secret, salt);
  if (!rec || !constant_time_equal(computed, rec->secret_hash)) {
    throw Error(Errc::unauthorized, "invalid client credentials");
  }

  const ScopeSet allowed = allowed_scopes(rec->role);
  const ScopeSet granted = scope.empty() ? allowed : scope;
  for (const auto& s : granted) {
    if (!allowed.contains(s)) throw Error(Errc::invalid_scope, "scope '" + s + "' is not allowed");
  }
  std::lock_guard lock(mutex_);
  return mint(rec->client_id, granted);
}

AccessToken AuthorizationServer::refresh(std::string_view refresh_token) {
  std::lock_guard lock(mutex_);
  const auto it = refresh_.find(digest(refresh_token));
  if (it == refresh_.end()) throw Error(Errc::invalid_grant, "unknown refresh token");
  const auto state = it->second;
  if (state->revoked || clock_.now() >= state->refresh_expires_at) {
    throw Error(Errc::invalid_grant, "refresh token is no longer valid");
  }
  state->revoked = true;
  return mint(state->client_id, state->scope);
}

TokenInfo AuthorizationServer::introspect(std::string_view service_credential,
                                          std::string_view token) const {
  if (config_.service_secret.empty() ||
      !constant_time_equal(as_bytes(service_credential), as_bytes(config_.service_secret))) {
    throw Error(Errc::unauthorized, "invalid service credential");
  }
  return introspect_trusted(token);
}

TokenInfo AuthorizationServer::introspect_trusted(std::string_view token) const {
  std::lock_guard lock(mutex_);
  const auto it = access_.find(digest(token));
  if (it == access_.end()) return {};
  const auto& state = *it->second;
  if (state.revoked || clock_.now() >= state.expires_at) return {};
  const auto client = clients_.find(state.client_id);
  if (client == clients_.end()) return {};

  TokenInfo info;
  info.active = true;
  info.client_id = state.client_id;
  info.scope = state.scope;
  info.expires_at = state.expires_at;
  info.role = client->second.role;
  info.attributes = client->second.registered_attrs;
  return info;
}

void AuthorizationServer::revoke(std::string_view token) {
  const auto d = digest(token);
  std::lock_guard lock(mutex_);
  if (const auto it = access_.find(d); it != access_.end()) it->second->revoked = true;
  if (const auto it = refresh_.find(d); it != refresh_.end()) it->second->revoked = true;
}

std::optional<ClientRecord> AuthorizationServer::client(std::string_view client_id) const {
  std::lock_guard lock(mutex_);
  const auto it = clients_.find(std::string(client_id));
  if (it == clients_.end()) return std::nullopt;
  return it->second;
}

}  // namespace abehg::authz
