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

#include "abehg/resource.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "abehg/error.hpp"

namespace abehg::resource {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kRecordIdBytes = 16;
constexpr std::string_view kRecordSuffix = ".rec";

// Record ids are base64url; anything else never reaches the filesystem.
bool valid_id(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '_';
  });
}

std::string random_suffix() {
  SystemEntropy entropy;
  Bytes raw(8);
  entropy.fill(raw);
  return to_hex(raw);
}

}  // namespace

void MemoryBackend::put(const std::string& id, const std::string& bytes) {
  std::lock_guard lock(mutex_);
  data_[id] = bytes;
}

std::optional<std::string> MemoryBackend::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = data_.find(id);
  if (it == data_.end()) return std::nullopt;
  return it->second;
}

bool MemoryBackend::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  return data_.erase(id) > 0;
}

std::vector<std::string> MemoryBackend::list() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : data_) out.push_back(id);
  return out;
}

DirectoryBackend::DirectoryBackend(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) {
    throw Error(Errc::io, "cannot use storage directory " + root_.string());
  }
}

fs::path DirectoryBackend::path_for(const std::string& id) const {
  if (!valid_id(id)) throw Error(Errc::not_found, "no such record");
  return root_ / (id + std::string(kRecordSuffix));
}

void DirectoryBackend::put(const std::string& id, const std::string& bytes) {
  const auto target = path_for(id);
  auto tmp = target;
  tmp += ".tmp-" + random_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(Errc::io, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::io, "cannot replace " + target.string());
  }
}

std::optional<std::string> DirectoryBackend::get(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  std::ifstream in(path_for(id), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool DirectoryBackend::remove(const std::string& id) {
  if (!valid_id(id)) return false;
  std::error_code ec;
  return fs::remove(path_for(id), ec);
}

std::vector<std::string> DirectoryBackend::list() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file() || !name.ends_with(kRecordSuffix)) continue;
    const auto id = name.substr(0, name.size() - kRecordSuffix.size());
    if (valid_id(id)) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string serialize_record(const StoredRecord& r) {
  nlohmann::json j;
  j["v"] = 1;
  j["type"] = "ehr.stored_record";
  j["record_id"] = r.record_id;
  j["owner_client_id"] = r.owner_client_id;
  j["policy"] = r.policy_text;
  j["meta"] = {{"content_type", r.meta.content_type},
               {"created_at", r.meta.created_at},
               {"owner_id", r.meta.owner_id}};
  j["created_at"] = r.created_at;
  j["updated_at"] = r.updated_at;
  j["seq"] = r.sequence;
  j["envelope"] = r.envelope_json;
  return j.dump();
}

StoredRecord deserialize_record(std::string_view bytes) {
  const auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("type", "") != "ehr.stored_record" ||
      j.value("v", 0) != 1) {
    throw Error(Errc::malformed, "stored record is corrupt");
  }
  try {
    StoredRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.owner_client_id = j.at("owner_client_id").get<std::string>();
    r.policy_text = j.at("policy").get<std::string>();
    const auto& m = j.at("meta");
    r.meta = {m.at("content_type").get<std::string>(), m.at("created_at").get<std::int64_t>(),
              m.at("owner_id").get<std::string>()};
    r.created_at = j.at("created_at").get<std::int64_t>();
    r.updated_at = j.at("updated_at").get<std::int64_t>();
    r.sequence = j.at("seq").get<std::uint64_t>();
    r.envelope_json = j.at("envelope").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::malformed, "stored record is corrupt");
  }
}

ResourceServer::ResourceServer(TokenValidator& validator, cpabe::PublicKey pk,
                               std::optional<cpabe::MasterKey> msk, StorageBackend& storage,
                               const authz::Clock& clock, Entropy& entropy, ResourceConfig config)
    : validator_(validator),
      pk_(std::move(pk)),
      msk_(std::move(msk)),
      storage_(storage),
      clock_(clock),
      entropy_(entropy),
      config_(config) {
  cpabe::validate(pk_);
  if (msk_) cpabe::validate_pair(pk_, *msk_);
  for (const auto& id : storage_.list()) {
    if (const auto bytes = storage_.get(id)) {
      next_sequence_ = std::max(next_sequence_, deserialize_record(*bytes).sequence + 1);
    }
  }
}

authz::TokenInfo ResourceServer::require(std::string_view bearer, std::string_view scope) const {
  auto info = validator_.validate(bearer);
  if (!info.active) throw Error(Errc::unauthorized, "invalid or expired access token");
  if (!scope.empty() && !info.scope.contains(scope)) {
    throw Error(Errc::forbidden, "token lacks scope " + std::string(scope));
  }
  return info;
}

StoredRecord ResourceServer::load(std::string_view record_id) const {
  const std::string id(record_id);
  const auto bytes = valid_id(id) ? storage_.get(id) : std::nullopt;
  if (!bytes) throw Error(Errc::not_found, "no such record");
  return deserialize_record(*bytes);
}

envelope::RecordEnvelope ResourceServer::check_envelope(
    std::string_view envelope_json, std::optional<std::string_view> policy_text) const {
  if (envelope_json.size() > config_.max_envelope_bytes) {
    throw Error(Errc::bad_request, "envelope exceeds the size limit");
  }
  auto env = [&] {
    try {
      return envelope::deserialize_envelope(envelope_json);
    } catch (const Error& e) {
      throw Error(Errc::bad_request, std::string("invalid envelope: ") + e.what());
    }
  }();
  if (env.header.group_id != pk_.group_id) throw Error(Errc::bad_request, "envelope group mismatch");
  if (policy_text) {
    const auto claimed = [&] {
      try {
        return policy::parse_postfix(*policy_text);
      } catch (const Error&) {
        throw Error(Errc::bad_request, "policy text does not parse");
      }
    }();
    if (!(claimed == env.header.policy)) {
      throw Error(Errc::bad_request, "policy text does not match the envelope header");
    }
  }
  return env;
}

std::string ResourceServer::issue_private_key(std::string_view bearer, std::string_view client_id) {
  const auto info = require(bearer, {});
  if (!client_id.empty() && client_id != info.client_id) {
    throw Error(Errc::forbidden, "keys are only issued to the token's own client");
  }
  if (info.attributes.empty()) throw Error(Errc::not_found, "client has no registered attributes");
  if (!msk_) throw Error(Errc::not_found, "this server does not hold the master key");
  return cpabe::serialize_artifact(cpabe::keygen(pk_, *msk_, info.attributes, entropy_));
}

std::string ResourceServer::put_record(std::string_view bearer, std::string_view envelope_json,
                                       std::optional<std::string_view> policy_text) {
  const auto info = require(bearer, authz::kScopeWrite);
  const auto env = check_envelope(envelope_json, policy_text);

  StoredRecord rec;
  rec.owner_client_id = info.client_id;
  rec.envelope_json = std::string(envelope_json);
  rec.policy_text = policy::serialize_policy(env.header.policy);
  rec.meta = env.meta;
  rec.created_at = rec.updated_at = clock_.now();

  std::lock_guard lock(mutex_);
  do {
    Bytes raw(kRecordIdBytes);
    entropy_.fill(raw);
    rec.record_id = base64url_encode(raw);
  } while (storage_.get(rec.record_id));
  rec.sequence = next_sequence_++;
  storage_.put(rec.record_id, serialize_record(rec));
  return rec.record_id;
}

std::string ResourceServer::get_record(std::string_view bearer, std::string_view record_id) const {
  require(bearer, authz::kScopeRead);
  return load(record_id).envelope_json;
}

std::vector<RecordSummary> ResourceServer::list_records(
    std::string_view bearer, std::optional<std::string_view> owner_client_id) const {
  require(bearer, authz::kScopeRead);
  std::vector<StoredRecord> records;
  for (const auto& id : storage_.list()) {
    const auto bytes = storage_.get(id);
    if (!bytes) continue;  // removed since list()
    auto rec = deserialize_record(*bytes);
    if (owner_client_id && rec.owner_client_id != *owner_client_id) continue;
    records.push_back(std::move(rec));
  }
  std::sort(records.begin(), records.end(), [](const StoredRecord& a, const StoredRecord& b) {
    return std::tie(a.created_at, a.sequence) < std::tie(b.created_at, b.sequence);
  });
  std::vector<RecordSummary> out;
  out.reserve(records.size());
  for (auto& r : records) {
    out.push_back({std::move(r.record_id), std::move(r.owner_client_id), std::move(r.policy_text),
                   std::move(r.meta), r.created_at, r.updated_at});
  }
  return out;
}

void ResourceServer::update_record(std::string_view bearer, std::string_view record_id,
                                   std::string_view envelope_json,
                                   std::optional<std::string_view> policy_text) {
  const auto info = require(bearer, authz::kScopeWrite);
  const auto env = check_envelope(envelope_json, policy_text);

  std::lock_guard lock(mutex_);
  auto rec = load(record_id);
  if (rec.owner_client_id != info.client_id) throw Error(Errc::forbidden, "not the record owner");
  rec.envelope_json = std::string(envelope_json);
  rec.policy_text = policy::serialize_policy(env.header.policy);
  rec.meta = env.meta;
  rec.updated_at = clock_.now();
  storage_.put(rec.record_id, serialize_record(rec));
}

void ResourceServer::delete_record(std::string_view bearer, std::string_view record_id) {
  const auto info = require(bearer, authz::kScopeWrite);
  std::lock_guard lock(mutex_);
  const auto rec = load(record_id);
  if (rec.owner_client_id != info.client_id) throw Error(Errc::forbidden, "not the record owner");
  if (!storage_.remove(rec.record_id)) throw Error(Errc::not_found, "no such record");
}

}  // namespace abehg::resource
