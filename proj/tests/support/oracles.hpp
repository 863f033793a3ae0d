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

// Test-only oracles and generators. Nothing here calls into the policy
// evaluation or assignment code it is used to check.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "abehg/policy.hpp"

namespace abehg::testing {

using policy::AccessTree;
using policy::AttributeSet;

// Gate satisfied iff some k-subset of its children is entirely satisfied,
// found by enumerating every child subset.
inline bool brute_force_satisfies(const AccessTree::Node& node,
                                  const std::function<bool(const AccessTree::Node&)>& leaf_ok) {
  if (node.is_leaf()) return leaf_ok(node);
  const auto n = node.children().size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::uint32_t>(__builtin_popcountll(mask)) != node.threshold()) continue;
    bool all = true;
    for (std::size_t i = 0; i < n && all; ++i) {
      if (mask & (std::uint64_t{1} << i)) all = brute_force_satisfies(node.children()[i], leaf_ok);
    }
    if (all) return true;
  }
  return false;
}

inline bool brute_force_satisfies(const AccessTree& tree, const AttributeSet& attrs) {
  return brute_force_satisfies(tree.root(), [&](const AccessTree::Node& leaf) {
    return attrs.contains(leaf.attribute());
  });
}

// Pre-order leaf attribute list, computed independently of policy::flatten.
inline void collect_leaves(const AccessTree::Node& node, std::vector<const AccessTree::Node*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (const auto& c : node.children()) collect_leaves(c, out);
}

// Smallest set of leaf ordinals that alone satisfies the tree, by exhaustive
// search over leaf subsets (smallest size first, then lowest mask).
inline std::optional<std::vector<std::size_t>> exhaustive_min_cover(const AccessTree& tree,
                                                                    const AttributeSet& attrs) {
  std::vector<const AccessTree::Node*> leaves;
  collect_leaves(tree.root(), leaves);
  const auto n = leaves.size();
  std::optional<std::vector<std::size_t>> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::size_t> chosen;
    bool usable = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (std::uint64_t{1} << i))) continue;
      if (!attrs.contains(leaves[i]->attribute())) usable = false;
      chosen.push_back(i);
    }
    if (!usable || (best && chosen.size() >= best->size())) continue;
    const bool ok = brute_force_satisfies(tree.root(), [&](const AccessTree::Node& leaf) {
      for (const auto i : chosen) {
        if (leaves[i] == &leaf) return true;
      }
      return false;
    });
    if (ok) best = chosen;
  }
  return best;
}

// Random tree with at most max_nodes nodes over attributes "attr:0".."attr:{universe-1}".
class TreeGenerator {
 public:
  TreeGenerator(std::uint64_t seed, std::size_t universe) : rng_(seed), universe_(universe) {}

  AccessTree tree(std::size_t max_nodes) {
    std::size_t budget = max_nodes;
    return AccessTree(node(budget, 0));
  }

  AttributeSet attrs(double density) {
    AttributeSet out;
    std::bernoulli_distribution pick(density);
    for (std::size_t i = 0; i < universe_; ++i) {
      if (pick(rng_)) out.insert(policy::Attribute::normalize("attr:" + std::to_string(i)));
    }
    return out;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  AccessTree::Node leaf() {
    std::uniform_int_distribution<std::size_t> pick(0, universe_ - 1);
    return AccessTree::Node::leaf(policy::Attribute::normalize("attr:" + std::to_string(pick(rng_))));
  }

  AccessTree::Node node(std::size_t& budget, int depth) {
    --budget;
    std::bernoulli_distribution make_gate(depth == 0 ? 0.9 : 0.45);
    if (budget < 2 || !make_gate(rng_)) return leaf();
    std::uniform_int_distribution<std::size_t> arity_dist(1, std::min<std::size_t>(4, budget));
    const auto arity = arity_dist(rng_);
    std::vector<AccessTree::Node> children;
    for (std::size_t i = 0; i < arity; ++i) {
      if (budget == 0) break;
      children.push_back(node(budget, depth + 1));
    }
    std::uniform_int_distribution<std::uint32_t> k_dist(1, static_cast<std::uint32_t>(children.size()));
    return AccessTree::Node::gate(k_dist(rng_), std::move(children));
  }

  std::mt19937_64 rng_;
  std::size_t universe_;
};

}  // namespace abehg::testing
