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

// Ciphertext-policy ABE over threshold access trees.
//
//   PublicKey   g, h = g^beta, e(g,g)^alpha
//   MasterKey   beta, g^alpha
//   PrivateKey  d = g^((alpha + r)/beta); per attribute j:
//               d_j = g^r * H(j)^(r_j), dp_j = g^(r_j)
//   Ciphertext  c_tilde = m * e(g,g)^(alpha s), c = h^s; per leaf y:
//               c_y = g^(q_y(0)), cp_y = H(att(y))^(q_y(0))
//
// Entropy draw order is part of the contract (tests replay seeded sources):
// setup draws alpha then beta, keygen draws r first, encrypt draws s first.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "abehg/entropy.hpp"
#include "abehg/group.hpp"
#include "abehg/policy.hpp"

namespace abehg::cpabe {

struct PublicKey {
  std::string group_id{math::kGroupId};
  math::G0Element g;
  math::G0Element h;
  math::GTElement egg_alpha;

  bool operator==(const PublicKey&) const = default;
};

struct MasterKey {
  std::string group_id{math::kGroupId};
  math::Scalar beta;
  math::G0Element g_alpha;

  bool operator==(const MasterKey&) const = default;
};

struct KeyComponent {
  policy::Attribute attribute;
  math::G0Element d;   // g^r * H(j)^(r_j)
  math::G0Element dp;  // g^(r_j)

  bool operator==(const KeyComponent&) const = default;
};

struct PrivateKey {
  std::string group_id{math::kGroupId};
  policy::AttributeSet attrs;
  math::G0Element d;
  std::vector<KeyComponent> components;  // one per attribute, in attrs order

  bool operator==(const PrivateKey&) const = default;
};

struct LeafComponent {
  math::G0Element c;   // g^(q_y(0))
  math::G0Element cp;  // H(att(y))^(q_y(0))

  bool operator==(const LeafComponent&) const = default;
};

struct Ciphertext {
  std::string group_id{math::kGroupId};
  policy::AccessTree policy;
  math::GTElement c_tilde;
  math::G0Element c;
  std::vector<LeafComponent> leaves;  // pre-order leaf order

  bool operator==(const Ciphertext&) const = default;
};

struct KeyPair {
  PublicKey public_key;
  MasterKey master_key;
};

KeyPair setup(Entropy& entropy);

/// Throws Error(Errc::domain) for an empty attribute set.
PrivateKey keygen(const PublicKey& pk, const MasterKey& mk, const policy::AttributeSet& attrs,
                  Entropy& entropy);

Ciphertext encrypt_element(const PublicKey& pk, const math::GTElement& message,
                           const policy::AccessTree& tree, Entropy& entropy);

/// Throws Error(Errc::policy_not_satisfied) with no detail when the key's
/// attributes do not satisfy the policy, Error(Errc::malformed) when the
/// ciphertext component count disagrees with its policy.
math::GTElement decrypt_element(const PublicKey& pk, const PrivateKey& sk, const Ciphertext& ct);

/// Structural invariants; throw Error(Errc::malformed / group_mismatch).
void validate(const PublicKey& pk);
void validate(const MasterKey& mk);
void validate(const PrivateKey& sk);
void validate(const Ciphertext& ct);
/// e(g_alpha, g) == egg_alpha.
void validate_pair(const PublicKey& pk, const MasterKey& mk);

// JSON envelopes: {"v":1,"type":"cpabe.<kind>","group_id":...,fields...}.
using Artifact = std::variant<PublicKey, MasterKey, PrivateKey, Ciphertext>;

std::string serialize_artifact(const Artifact& artifact);
/// Throws Error(Errc::version_mismatch / group_mismatch / malformed).
Artifact deserialize_artifact(std::string_view bytes);

PublicKey deserialize_public_key(std::string_view bytes);
MasterKey deserialize_master_key(std::string_view bytes);
PrivateKey deserialize_private_key(std::string_view bytes);
Ciphertext deserialize_ciphertext(std::string_view bytes);

}  // namespace abehg::cpabe
