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

#include "abehg/envelope.hpp"

#include <openssl/evp.h>

#include <json.hpp>
#include <memory>

#include "abehg/error.hpp"

namespace abehg::envelope {

namespace {

constexpr std::size_t kTagBytes = 16;

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  if (!ctx) throw Error(Errc::io, "cannot allocate cipher context");
  return ctx;
}

void append_field(Bytes& out, std::span<const std::uint8_t> field) {
  const auto n = static_cast<std::uint32_t>(field.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(n >> shift));
  out.insert(out.end(), field.begin(), field.end());
}

Bytes aead_seal(const ContentKey& key, const Nonce& nonce, std::span<const std::uint8_t> plaintext,
                std::span<const std::uint8_t> ad) {
  auto ctx = new_ctx();
  Bytes out(plaintext.size() + kTagBytes);
  int len = 0;
  bool ok = EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, nonce.size(), nullptr) == 1 &&
            EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) == 1 &&
            EVP_EncryptUpdate(ctx.get(), nullptr, &len, ad.data(), static_cast<int>(ad.size())) == 1;
  std::size_t written = 0;
  if (ok && !plaintext.empty()) {
    ok = EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                           static_cast<int>(plaintext.size())) == 1;
    written = static_cast<std::size_t>(len);
  }
  ok = ok && EVP_EncryptFinal_ex(ctx.get(), out.data() + written, &len) == 1 &&
       EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes,
                           out.data() + plaintext.size()) == 1;
  if (!ok) throw Error(Errc::io, "AES-256-GCM encryption failed");
  return out;
}

Bytes aead_open(const ContentKey& key, const Nonce& nonce, std::span<const std::uint8_t> sealed,
                std::span<const std::uint8_t> ad) {
  if (sealed.size() < kTagBytes) throw Error(Errc::authentication_failed, "authentication failure");
  const auto body = sealed.first(sealed.size() - kTagBytes);
  Bytes tag(sealed.end() - kTagBytes, sealed.end());

  auto ctx = new_ctx();
  Bytes out(body.size());
  int len = 0;
  bool ok = EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, nonce.size(), nullptr) == 1 &&
            EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) == 1 &&
            EVP_DecryptUpdate(ctx.get(), nullptr, &len, ad.data(), static_cast<int>(ad.size())) == 1;
  std::size_t written = 0;
  if (ok && !body.empty()) {
    ok = EVP_DecryptUpdate(ctx.get(), out.data(), &len, body.data(), static_cast<int>(body.size())) == 1;
    written = static_cast<std::size_t>(len);
  }
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes, tag.data()) == 1 &&
       EVP_DecryptFinal_ex(ctx.get(), out.data() + written, &len) == 1;
  if (!ok) {
    std::fill(out.begin(), out.end(), 0);
    throw Error(Errc::authentication_failed, "authentication failure");
  }
  return out;
}

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(Errc::malformed, std::string("envelope: missing field '") + name + "'");
  }
  return j.at(name);
}

std::string string_field(const nlohmann::json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) throw Error(Errc::malformed, std::string("envelope: '") + name + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

ContentKey derive_content_key(const math::GTElement& m) {
  Bytes input(kKdfTag.begin(), kKdfTag.end());
  const auto encoded = m.to_bytes();
  input.insert(input.end(), encoded.begin(), encoded.end());
  return sha256(input);
}

Bytes associated_data(std::string_view policy_text, const Meta& meta) {
  Bytes out;
  append_field(out, as_bytes(policy_text));
  append_field(out, as_bytes(meta.content_type));
  append_field(out, as_bytes(std::to_string(meta.created_at)));
  append_field(out, as_bytes(meta.owner_id));
  return out;
}

RecordEnvelope seal(const cpabe::PublicKey& pk, const policy::AccessTree& tree,
                    std::span<const std::uint8_t> plaintext, const Meta& meta, Entropy& entropy,
                    std::size_t max_plaintext) {
  if (plaintext.size() > max_plaintext) {
    throw Error(Errc::oversize, "record of " + std::to_string(plaintext.size()) +
                                    " bytes exceeds the limit of " + std::to_string(max_plaintext));
  }
  const auto m = math::GTElement::random(entropy);
  RecordEnvelope env{cpabe::encrypt_element(pk, m, tree, entropy), {}, {}, meta};
  entropy.fill(env.nonce);
  const auto key = derive_content_key(m);
  env.body = aead_seal(key, env.nonce, plaintext,
                       associated_data(policy::serialize_policy(env.header.policy), meta));
  return env;
}

Bytes open(const cpabe::PublicKey& pk, const cpabe::PrivateKey& sk, const RecordEnvelope& env) {
  const auto m = cpabe::decrypt_element(pk, sk, env.header);
  return aead_open(derive_content_key(m), env.nonce, env.body,
                   associated_data(policy::serialize_policy(env.header.policy), env.meta));
}

std::string serialize_envelope(const RecordEnvelope& env) {
  nlohmann::json j;
  j["v"] = 1;
  j["type"] = "ehr.envelope";
  j["header"] = nlohmann::json::parse(cpabe::serialize_artifact(env.header));
  j["nonce"] = base64url_encode(env.nonce);
  j["body"] = base64url_encode(env.body);
  j["meta"] = {{"content_type", env.meta.content_type},
               {"created_at", env.meta.created_at},
               {"owner_id", env.meta.owner_id}};
  return j.dump();
}

RecordEnvelope deserialize_envelope(std::string_view bytes) {
  const auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::malformed, "envelope is not a JSON object");
  const auto& v = field(j, "v");
  if (!v.is_number_integer() || v.get<long long>() != 1) {
    throw Error(Errc::version_mismatch, "unsupported envelope version");
  }
  if (string_field(j, "type") != "ehr.envelope") throw Error(Errc::malformed, "not an ehr.envelope");
  const auto& header = field(j, "header");
  if (!header.is_object()) throw Error(Errc::malformed, "envelope header must be an object");

  const auto nonce = base64url_decode(string_field(j, "nonce"));
  if (nonce.size() != Nonce{}.size()) throw Error(Errc::malformed, "envelope nonce must be 12 bytes");
  const auto& meta = field(j, "meta");
  const auto& created = field(meta, "created_at");
  if (!created.is_number_integer()) throw Error(Errc::malformed, "meta.created_at must be an integer");

  RecordEnvelope env{cpabe::deserialize_ciphertext(header.dump()),
                     {},
                     base64url_decode(string_field(j, "body")),
                     {string_field(meta, "content_type"), created.get<std::int64_t>(),
                      string_field(meta, "owner_id")}};
  std::copy(nonce.begin(), nonce.end(), env.nonce.begin());
  if (env.body.size() < kTagBytes) throw Error(Errc::malformed, "envelope body is shorter than its tag");
  return env;
}

}  // namespace abehg::envelope
