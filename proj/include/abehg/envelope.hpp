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

// Hybrid record encryption: a fresh random GT element is CPABE-encrypted
// under the policy, and the record bytes are sealed with AES-256-GCM under
// a key derived from that element. The associated data binds the policy
// text and the metadata.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "abehg/codec.hpp"
#include "abehg/cpabe.hpp"

namespace abehg::envelope {

inline constexpr std::string_view kKdfTag = "cpabe:kdf:v1";
inline constexpr std::size_t kDefaultMaxPlaintext = std::size_t{64} << 20;

using ContentKey = std::array<std::uint8_t, 32>;
using Nonce = std::array<std::uint8_t, 12>;

struct Meta {
  std::string content_type = "application/octet-stream";
  std::int64_t created_at = 0;  // unix seconds
  std::string owner_id;

  bool operator==(const Meta&) const = default;
};

struct RecordEnvelope {
  cpabe::Ciphertext header;
  Nonce nonce{};
  Bytes body;  // ciphertext || 16-byte tag
  Meta meta;

  bool operator==(const RecordEnvelope&) const = default;
};

/// SHA-256(kKdfTag || canonical encoding of m).
ContentKey derive_content_key(const math::GTElement& m);

/// Length-prefixed policy text, content_type, created_at and owner_id.
Bytes associated_data(std::string_view policy_text, const Meta& meta);

/// Throws Error(Errc::oversize) past max_plaintext bytes.
RecordEnvelope seal(const cpabe::PublicKey& pk, const policy::AccessTree& tree,
                    std::span<const std::uint8_t> plaintext, const Meta& meta, Entropy& entropy,
                    std::size_t max_plaintext = kDefaultMaxPlaintext);

/// Throws Error(Errc::policy_not_satisfied) or Error(Errc::authentication_failed);
/// never returns partial plaintext.
Bytes open(const cpabe::PublicKey& pk, const cpabe::PrivateKey& sk, const RecordEnvelope& env);

/// {"v":1,"type":"ehr.envelope","header":{...},"nonce":...,"body":...,"meta":{...}}
std::string serialize_envelope(const RecordEnvelope& env);
RecordEnvelope deserialize_envelope(std::string_view bytes);

}  // namespace abehg::envelope
