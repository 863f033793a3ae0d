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

#include "abehg/cpabe.hpp"

#include <json.hpp>

#include <map>

#include "abehg/codec.hpp"
#include "abehg/error.hpp"
#include "abehg/sharing.hpp"

namespace abehg::cpabe {

using math::G0Element;
using math::GTElement;
using math::Scalar;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

void check_group(const std::string& group_id) {
  if (group_id != math::kGroupId) {
    throw Error(Errc::group_mismatch,
                "artifact group '" + group_id + "' does not match '" +
                    std::string(math::kGroupId) + "'");
  }
}

void share_secret(const policy::AccessTree::Node& node, const Scalar& secret,
                  const G0Element& g, Entropy& entropy, std::vector<LeafComponent>& out) {
  if (node.is_leaf()) {
    out.push_back({g.pow(secret), math::hash_to_group(node.attribute().text()).pow(secret)});
    return;
  }
  const auto poly = math::sample_polynomial(node.threshold() - 1, secret, entropy);
  for (std::size_t i = 0; i < node.children().size(); ++i) {
    share_secret(node.children()[i], math::eval_polynomial(poly, Scalar::from_u64(i + 1)), g,
                 entropy, out);
  }
}

GTElement decrypt_node(const std::vector<policy::FlatNode>& flat, std::size_t id,
                       const policy::SatisfyingAssignment& assignment,
                       const std::map<policy::Attribute, const KeyComponent*>& components,
                       const Ciphertext& ct) {
  const auto& node = *flat[id].node;
  if (node.is_leaf()) {
    const auto* key = components.at(node.attribute());
    const auto& leaf = ct.leaves[flat[id].leaf_ordinal];
    // Hash-bearing operands (d_j, cp_y) go first; see group.hpp.
    return math::pairing(key->d, leaf.c) / math::pairing(leaf.cp, key->dp);
  }
  const auto& chosen = assignment.chosen.at(id);
  GTElement acc;
  for (const auto k : chosen) {
    const auto child = decrypt_node(flat, flat[id].children[k - 1], assignment, components, ct);
    acc = acc * child.pow(math::lagrange_coeff(k, chosen, Scalar{}));
  }
  return acc;
}

// ------------------------------------------------------------ JSON helpers

template <std::size_t N>
std::string b64(const std::array<std::uint8_t, N>& bytes) {
  return base64url_encode(bytes);
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(Errc::malformed, std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

std::string string_field(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) throw Error(Errc::malformed, std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

const json& array_field(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_array()) throw Error(Errc::malformed, std::string("field '") + name + "' must be an array");
  return v;
}

G0Element g0_field(const json& j, const char* name) {
  return G0Element::from_bytes(base64url_decode(string_field(j, name)));
}

GTElement gt_field(const json& j, const char* name) {
  return GTElement::from_bytes(base64url_decode(string_field(j, name)));
}

json header(std::string_view kind, const std::string& group_id) {
  return json{{"v", kFormatVersion}, {"type", "cpabe." + std::string(kind)}, {"group_id", group_id}};
}

json to_json(const PublicKey& pk) {
  auto j = header("public_key", pk.group_id);
  j["g"] = b64(pk.g.to_bytes());
  j["h"] = b64(pk.h.to_bytes());
  j["egg_alpha"] = b64(pk.egg_alpha.to_bytes());
  return j;
}

json to_json(const MasterKey& mk) {
  auto j = header("master_key", mk.group_id);
  j["beta"] = b64(mk.beta.to_bytes());
  j["g_alpha"] = b64(mk.g_alpha.to_bytes());
  return j;
}

json to_json(const PrivateKey& sk) {
  auto j = header("private_key", sk.group_id);
  j["attributes"] = sk.attrs.to_strings();
  j["d"] = b64(sk.d.to_bytes());
  auto components = json::array();
  for (const auto& c : sk.components) {
    components.push_back(
        {{"attribute", c.attribute.text()}, {"d", b64(c.d.to_bytes())}, {"dp", b64(c.dp.to_bytes())}});
  }
  j["components"] = std::move(components);
  return j;
}

json to_json(const Ciphertext& ct) {
  auto j = header("ciphertext", ct.group_id);
  j["policy"] = policy::serialize_policy(ct.policy);
  j["c_tilde"] = b64(ct.c_tilde.to_bytes());
  j["c"] = b64(ct.c.to_bytes());
  auto leaves = json::array();
  for (const auto& leaf : ct.leaves) {
    leaves.push_back({{"c", b64(leaf.c.to_bytes())}, {"cp", b64(leaf.cp.to_bytes())}});
  }
  j["leaves"] = std::move(leaves);
  return j;
}

policy::Attribute canonical_attribute(const std::string& text) {
  auto attribute = policy::Attribute::normalize(text);
  if (attribute.text() != text) {
    throw Error(Errc::malformed, "attribute '" + text + "' is not in normalized form");
  }
  return attribute;
}

PublicKey public_key_from_json(const json& j) {
  PublicKey pk;
  pk.group_id = string_field(j, "group_id");
  check_group(pk.group_id);
  pk.g = g0_field(j, "g");
  pk.h = g0_field(j, "h");
  pk.egg_alpha = gt_field(j, "egg_alpha");
  validate(pk);
  return pk;
}

MasterKey master_key_from_json(const json& j) {
  MasterKey mk;
  mk.group_id = string_field(j, "group_id");
  check_group(mk.group_id);
  mk.beta = Scalar::from_bytes(base64url_decode(string_field(j, "beta")));
  mk.g_alpha = g0_field(j, "g_alpha");
  validate(mk);
  return mk;
}

PrivateKey private_key_from_json(const json& j) {
  PrivateKey sk;
  sk.group_id = string_field(j, "group_id");
  check_group(sk.group_id);
  for (const auto& a : array_field(j, "attributes")) {
    if (!a.is_string()) throw Error(Errc::malformed, "attributes must be strings");
    if (!sk.attrs.insert(canonical_attribute(a.get<std::string>()))) {
      throw Error(Errc::malformed, "duplicate attribute in private key");
    }
  }
  sk.d = g0_field(j, "d");
  for (const auto& c : array_field(j, "components")) {
    sk.components.push_back(
        {canonical_attribute(string_field(c, "attribute")), g0_field(c, "d"), g0_field(c, "dp")});
  }
  validate(sk);
  return sk;
}

Ciphertext ciphertext_from_json(const json& j) {
  const auto group_id = string_field(j, "group_id");
  check_group(group_id);
  const auto policy_text = string_field(j, "policy");
  auto tree = [&] {
    try {
      return policy::parse_postfix(policy_text);
    } catch (const ParseError& e) {
      throw Error(Errc::malformed, std::string("embedded policy: ") + e.what());
    }
  }();
  if (policy::serialize_policy(tree) != policy_text) {
    throw Error(Errc::malformed, "embedded policy is not in canonical form");
  }
  Ciphertext ct{group_id, std::move(tree), gt_field(j, "c_tilde"), g0_field(j, "c"), {}};
  for (const auto& leaf : array_field(j, "leaves")) {
    ct.leaves.push_back({g0_field(leaf, "c"), g0_field(leaf, "cp")});
  }
  validate(ct);
  return ct;
}

json parse_envelope(std::string_view bytes, std::string_view expected_kind) {
  json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::malformed, "artifact is not a JSON object");
  const auto& v = field(j, "v");
  if (!v.is_number_integer() || v.get<long long>() != kFormatVersion) {
    throw Error(Errc::version_mismatch, "unsupported artifact version");
  }
  const auto type = string_field(j, "type");
  if (!expected_kind.empty() && type != "cpabe." + std::string(expected_kind)) {
    throw Error(Errc::malformed, "expected cpabe." + std::string(expected_kind) + ", got " + type);
  }
  return j;
}

}  // namespace

// ------------------------------------------------------------ algorithms

KeyPair setup(Entropy& entropy) {
  const Scalar alpha = Scalar::random(entropy);
  const Scalar beta = Scalar::random_nonzero(entropy);
  const G0Element g = G0Element::generator();

  KeyPair out;
  out.public_key.g = g;
  out.public_key.h = g.pow(beta);
  out.public_key.egg_alpha = math::GTElement::generator().pow(alpha);
  out.master_key.beta = beta;
  out.master_key.g_alpha = g.pow(alpha);
  return out;
}

PrivateKey keygen(const PublicKey& pk, const MasterKey& mk, const policy::AttributeSet& attrs,
                  Entropy& entropy) {
  if (attrs.empty()) throw Error(Errc::domain, "cannot issue a key for an empty attribute set");
  check_group(pk.group_id);
  check_group(mk.group_id);

  const Scalar r = Scalar::random(entropy);
  const G0Element g_r = pk.g.pow(r);

  PrivateKey sk;
  sk.attrs = attrs;
  sk.d = (mk.g_alpha * g_r).pow(mk.beta.inverse());
  sk.components.reserve(attrs.size());
  for (const auto& attribute : attrs) {
    const Scalar r_j = Scalar::random(entropy);
    sk.components.push_back({attribute,
                             g_r * math::hash_to_group(attribute.text()).pow(r_j),
                             pk.g.pow(r_j)});
  }
  return sk;
}

Ciphertext encrypt_element(const PublicKey& pk, const math::GTElement& message,
                           const policy::AccessTree& tree, Entropy& entropy) {
  check_group(pk.group_id);
  const Scalar s = Scalar::random(entropy);

  Ciphertext ct{std::string(math::kGroupId), tree, message * pk.egg_alpha.pow(s), pk.h.pow(s), {}};
  ct.leaves.reserve(tree.leaf_count());
  share_secret(tree.root(), s, pk.g, entropy, ct.leaves);
  return ct;
}

math::GTElement decrypt_element(const PublicKey& pk, const PrivateKey& sk, const Ciphertext& ct) {
  check_group(pk.group_id);
  check_group(sk.group_id);
  check_group(ct.group_id);
  if (ct.leaves.size() != ct.policy.leaf_count()) {
    throw Error(Errc::malformed, "ciphertext leaf components do not match its policy");
  }
  if (sk.components.size() != sk.attrs.size()) {
    throw Error(Errc::malformed, "private key components do not match its attributes");
  }

  const auto assignment = policy::min_satisfying_assignment(ct.policy, sk.attrs);
  if (!assignment) throw Error(Errc::policy_not_satisfied, "policy not satisfied");

  std::map<policy::Attribute, const KeyComponent*> components;
  for (const auto& c : sk.components) components.emplace(c.attribute, &c);
  for (const auto& a : sk.attrs) {
    if (!components.contains(a)) {
      throw Error(Errc::malformed, "private key is missing a component");
    }
  }

  const auto flat = policy::flatten(ct.policy);
  const GTElement blinding = decrypt_node(flat, 0, *assignment, components, ct);
  return ct.c_tilde * blinding / math::pairing(ct.c, sk.d);
}

// ------------------------------------------------------------ validation

void validate(const PublicKey& pk) {
  check_group(pk.group_id);
  if (pk.g.is_identity() || pk.h.is_identity()) {
    throw Error(Errc::malformed, "public key generator elements must not be the identity");
  }
  if (math::pairing(pk.g, pk.h).is_identity()) {
    throw Error(Errc::malformed, "public key pairing e(g, h) is degenerate");
  }
}

void validate(const MasterKey& mk) {
  check_group(mk.group_id);
  if (mk.beta.is_zero()) throw Error(Errc::malformed, "master key beta must be invertible");
}

void validate(const PrivateKey& sk) {
  check_group(sk.group_id);
  if (sk.attrs.empty()) throw Error(Errc::malformed, "private key has no attributes");
  if (sk.components.size() != sk.attrs.size()) {
    throw Error(Errc::malformed, "private key needs exactly one component pair per attribute");
  }
  auto it = sk.attrs.begin();
  for (const auto& c : sk.components) {
    if (!(c.attribute == *it++)) {
      throw Error(Errc::malformed, "private key components are not aligned with its attributes");
    }
  }
}

void validate(const Ciphertext& ct) {
  check_group(ct.group_id);
  if (ct.leaves.size() != ct.policy.leaf_count()) {
    throw Error(Errc::malformed, "ciphertext needs exactly one component pair per policy leaf");
  }
}

void validate_pair(const PublicKey& pk, const MasterKey& mk) {
  validate(pk);
  validate(mk);
  if (!(math::pairing(mk.g_alpha, pk.g) == pk.egg_alpha)) {
    throw Error(Errc::malformed, "master key does not belong to this public key");
  }
  if (!(pk.g.pow(mk.beta) == pk.h)) {
    throw Error(Errc::malformed, "master key beta does not match public key h");
  }
}

// ------------------------------------------------------------ serialization

std::string serialize_artifact(const Artifact& artifact) {
  return std::visit([](const auto& a) { return to_json(a).dump(); }, artifact);
}

Artifact deserialize_artifact(std::string_view bytes) {
  const auto j = parse_envelope(bytes, "");
  const auto type = string_field(j, "type");
  if (type == "cpabe.public_key") return public_key_from_json(j);
  if (type == "cpabe.master_key") return master_key_from_json(j);
  if (type == "cpabe.private_key") return private_key_from_json(j);
  if (type == "cpabe.ciphertext") return ciphertext_from_json(j);
  throw Error(Errc::malformed, "unknown artifact type '" + type + "'");
}

PublicKey deserialize_public_key(std::string_view bytes) {
  return public_key_from_json(parse_envelope(bytes, "public_key"));
}

MasterKey deserialize_master_key(std::string_view bytes) {
  return master_key_from_json(parse_envelope(bytes, "master_key"));
}

PrivateKey deserialize_private_key(std::string_view bytes) {
  return private_key_from_json(parse_envelope(bytes, "private_key"));
}

Ciphertext deserialize_ciphertext(std::string_view bytes) {
  return ciphertext_from_json(parse_envelope(bytes, "ciphertext"));
}

}  // namespace abehg::cpabe
