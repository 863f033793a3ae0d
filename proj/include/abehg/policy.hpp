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

// Monotone threshold-gate access policies.
//
// Canonical text form is postfix: attribute tokens push leaves and a
// `<k>of<n>` token pops n nodes into a k-of-n gate. The spaced spelling
// "Position: Doctor" is accepted; tokens ending in ':' or '=' (or followed by
// one starting with ':' or '=') are joined into one attribute before
// normalization.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace abehg::policy {

class Attribute {
 public:
  /// Trims, lowercases, unifies '=' with ':', drops whitespace around ':' and
  /// turns any remaining whitespace run into '_'. Idempotent.
  /// Throws ParseError for empty input, gate-like text (`2of3`), reserved
  /// words (and, or) and the characters ( ) [ ] ,
  static Attribute normalize(std::string_view raw);

  const std::string& text() const { return text_; }

  auto operator<=>(const Attribute&) const = default;
  bool operator==(const Attribute&) const = default;

 private:
  explicit Attribute(std::string text) : text_(std::move(text)) {}

  std::string text_;
};

inline Attribute normalize_attribute(std::string_view raw) {
  return Attribute::normalize(raw);
}

/// Set of normalized attributes. Attributes are opaque: several values may
/// share a "position:" prefix.
class AttributeSet {
 public:
  AttributeSet() = default;
  AttributeSet(std::initializer_list<std::string_view> raw);

  static AttributeSet from_strings(const std::vector<std::string>& raw);
  /// Comma-separated list, e.g. "Position: PhD, University: AMU".
  static AttributeSet parse_list(std::string_view csv);

  bool insert(Attribute attribute) { return attrs_.insert(std::move(attribute)).second; }
  bool contains(const Attribute& attribute) const { return attrs_.contains(attribute); }
  bool contains(std::string_view raw) const;

  std::size_t size() const { return attrs_.size(); }
  bool empty() const { return attrs_.empty(); }
  auto begin() const { return attrs_.begin(); }
  auto end() const { return attrs_.end(); }

  std::vector<std::string> to_strings() const;

  bool operator==(const AttributeSet&) const = default;

 private:
  std::set<Attribute> attrs_;
};

class AccessTree {
 public:
  class Node {
   public:
    static Node leaf(Attribute attribute);
    /// Throws Error(Errc::domain) unless 1 <= threshold <= children.size().
    static Node gate(std::uint32_t threshold, std::vector<Node> children);

    bool is_leaf() const { return attribute_.has_value(); }
    const Attribute& attribute() const { return *attribute_; }
    std::uint32_t threshold() const { return threshold_; }
    const std::vector<Node>& children() const { return children_; }

    bool operator==(const Node&) const = default;

   private:
    Node() = default;

    std::optional<Attribute> attribute_;
    std::uint32_t threshold_ = 1;
    std::vector<Node> children_;
  };

  explicit AccessTree(Node root) : root_(std::move(root)) {}

  const Node& root() const { return root_; }
  std::size_t leaf_count() const;
  std::size_t node_count() const;
  /// Leaf attributes in pre-order; the ciphertext component order.
  std::vector<Attribute> leaves() const;

  bool operator==(const AccessTree&) const = default;

 private:
  Node root_;
};

/// Pre-order view of a tree. Node ids are pre-order positions (root = 0);
/// leaf_ordinal numbers leaves in pre-order.
struct FlatNode {
  const AccessTree::Node* node;
  std::vector<std::size_t> children;  // node ids, child index k at children[k-1]
  std::size_t leaf_ordinal = 0;       // meaningful for leaves only
};

std::vector<FlatNode> flatten(const AccessTree& tree);

struct SatisfyingAssignment {
  /// Gate node id -> chosen 1-based child indices, ascending.
  std::map<std::size_t, std::vector<std::uint32_t>> chosen;
  /// Leaf ordinals of the leaves used, ascending.
  std::vector<std::size_t> leaves;

  bool operator==(const SatisfyingAssignment&) const = default;
};

AccessTree parse_postfix(std::string_view text);

/// expr := term (OR term)*; term := factor (AND factor)*;
/// factor := attribute | ( expr ) | [ expr ] | <k>of( expr, ... ).
/// A chain of the same operator becomes one n-ary gate.
AccessTree parse_infix(std::string_view text);

std::string serialize_policy(const AccessTree& tree);

bool satisfies(const AccessTree& tree, const AttributeSet& attrs);

/// Fewest-leaves assignment, ties broken towards lower child indices.
std::optional<SatisfyingAssignment> min_satisfying_assignment(const AccessTree& tree,
                                                              const AttributeSet& attrs);

}  // namespace abehg::policy
