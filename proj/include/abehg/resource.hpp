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

// Resource server and attribute-authority facade.
//
// Bearer tokens gate transport only. Records are stored and served as
// opaque envelopes; whether a reader can open one is decided by CPABE at
// the client, never here.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abehg/authz.hpp"
#include "abehg/cpabe.hpp"
#include "abehg/envelope.hpp"

namespace abehg::resource {

/// Key/value store of serialized records. Implementations must give
/// read-after-write consistency and tolerate concurrent callers.
class StorageBackend {
 public:
  virtual ~StorageBackend() = default;
  virtual void put(const std::string& id, const std::string& bytes) = 0;
  virtual std::optional<std::string> get(const std::string& id) const = 0;
  /// False when nothing was stored under id.
  virtual bool remove(const std::string& id) = 0;
  virtual std::vector<std::string> list() const = 0;
};

class MemoryBackend final : public StorageBackend {
 public:
  void put(const std::string& id, const std::string& bytes) override;
  std::optional<std::string> get(const std::string& id) const override;
  bool remove(const std::string& id) override;
  std::vector<std::string> list() const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> data_;
};

/// One file per record, replaced by write-to-temp plus rename.
class DirectoryBackend final : public StorageBackend {
 public:
  explicit DirectoryBackend(std::filesystem::path root);

  void put(const std::string& id, const std::string& bytes) override;
  std::optional<std::string> get(const std::string& id) const override;
  bool remove(const std::string& id) override;
  std::vector<std::string> list() const override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path path_for(const std::string& id) const;

  std::filesystem::path root_;
};

struct StoredRecord {
  std::string record_id;
  std::string owner_client_id;
  std::string envelope_json;  // exactly as uploaded
  std::string policy_text;    // canonical postfix
  envelope::Meta meta;
  std::int64_t created_at = 0;
  std::int64_t updated_at = 0;
  std::uint64_t sequence = 0;  // tie-break for records created in the same second

  bool operator==(const StoredRecord&) const = default;
};

std::string serialize_record(const StoredRecord& record);
StoredRecord deserialize_record(std::string_view bytes);

/// Listing entry; never carries the envelope.
struct RecordSummary {
  std::string record_id;
  std::string owner_client_id;
  std::string policy_text;
  envelope::Meta meta;
  std::int64_t created_at = 0;
  std::int64_t updated_at = 0;
};

/// Resolves a bearer token to its introspection result.
class TokenValidator {
 public:
  virtual ~TokenValidator() = default;
  virtual authz::TokenInfo validate(std::string_view bearer) = 0;
};

/// Co-hosted deployment: asks the authorization server directly.
class LocalTokenValidator final : public TokenValidator {
 public:
  explicit LocalTokenValidator(const authz::AuthorizationServer& server) : server_(server) {}
  authz::TokenInfo validate(std::string_view bearer) override {
    return server_.introspect_trusted(bearer);
  }

 private:
  const authz::AuthorizationServer& server_;
};

struct ResourceConfig {
  std::size_t max_envelope_bytes = std::size_t{96} << 20;
};

class ResourceServer {
 public:
  /// The master key is optional; without it the server stores records but
  /// refuses key issuance.
  ResourceServer(TokenValidator& validator, cpabe::PublicKey pk,
                 std::optional<cpabe::MasterKey> msk, StorageBackend& storage,
                 const authz::Clock& clock, Entropy& entropy, ResourceConfig config = {});

  const cpabe::PublicKey& public_key() const { return pk_; }
  bool has_master_key() const { return msk_.has_value(); }

  /// Serialized PrivateKey over the caller's registered attributes. Never stored.
  /// A non-empty client_id must name the token's own client.
  std::string issue_private_key(std::string_view bearer, std::string_view client_id = {});

  /// Needs ehr.write. When policy_text is given it must match the header's policy.
  std::string put_record(std::string_view bearer, std::string_view envelope_json,
                         std::optional<std::string_view> policy_text = std::nullopt);
  std::string get_record(std::string_view bearer, std::string_view record_id) const;
  std::vector<RecordSummary> list_records(
      std::string_view bearer, std::optional<std::string_view> owner_client_id = std::nullopt) const;
  /// Owner only.
  void update_record(std::string_view bearer, std::string_view record_id,
                     std::string_view envelope_json,
                     std::optional<std::string_view> policy_text = std::nullopt);
  void delete_record(std::string_view bearer, std::string_view record_id);

 private:
  authz::TokenInfo require(std::string_view bearer, std::string_view scope) const;
  StoredRecord load(std::string_view record_id) const;
  envelope::RecordEnvelope check_envelope(std::string_view envelope_json,
                                          std::optional<std::string_view> policy_text) const;

  TokenValidator& validator_;
  cpabe::PublicKey pk_;
  std::optional<cpabe::MasterKey> msk_;
  StorageBackend& storage_;
  const authz::Clock& clock_;
  Entropy& entropy_;
  ResourceConfig config_;

  mutable std::mutex mutex_;
  std::uint64_t next_sequence_ = 0;
};

}  // namespace abehg::resource
