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

#include "abehg/policy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>

#include "abehg/error.hpp"

namespace abehg::policy {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<std::uint32_t> parse_uint(std::string_view digits) {
  if (digits.empty() || digits.size() > 9) return std::nullopt;
  std::uint32_t value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return value;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

// "<digits>of..." prefix: a gate token, well-formed or not.
bool looks_like_gate(std::string_view token) {
  const auto pos = token.find("of");
  return pos != std::string_view::npos && pos > 0 && all_digits(token.substr(0, pos));
}

struct GateSpec {
  std::uint32_t threshold;
  std::uint32_t arity;
};

GateSpec parse_gate_token(std::string_view token, std::size_t position) {
  const auto pos = token.find("of");
  const auto k = parse_uint(token.substr(0, pos));
  const auto n = parse_uint(token.substr(pos + 2));
  if (!k || !n || *n == 0 || !all_digits(token.substr(pos + 2))) {
    throw ParseError(ParseFailure::malformed_gate, position,
                     "malformed gate token '" + std::string(token) + "' at token " +
                         std::to_string(position));
  }
  if (*k < 1 || *k > *n) {
    throw ParseError(ParseFailure::threshold_out_of_range, position,
                     "gate threshold out of range in '" + std::string(token) +
                         "' at token " + std::to_string(position));
  }
  return {*k, *n};
}

void count(const AccessTree::Node& node, std::size_t& nodes, std::size_t& leaves) {
  ++nodes;
  if (node.is_leaf()) {
    ++leaves;
    return;
  }
  for (const auto& child : node.children()) count(child, nodes, leaves);
}

void flatten_into(const AccessTree::Node& node, std::vector<FlatNode>& out,
                  std::size_t& next_leaf) {
  const std::size_t id = out.size();
  out.push_back(FlatNode{&node, {}, 0});
  if (node.is_leaf()) {
    out[id].leaf_ordinal = next_leaf++;
    return;
  }
  for (const auto& child : node.children()) {
    out[id].children.push_back(out.size());
    flatten_into(child, out, next_leaf);
  }
}

bool satisfies_node(const AccessTree::Node& node, const AttributeSet& attrs) {
  if (node.is_leaf()) return attrs.contains(node.attribute());
  std::uint32_t satisfied = 0;
  for (const auto& child : node.children()) {
    if (satisfies_node(child, attrs) && ++satisfied >= node.threshold()) return true;
  }
  return false;
}

void serialize_node(const AccessTree::Node& node, std::string& out) {
  if (!out.empty()) out.push_back(' ');
  if (node.is_leaf()) {
    out += node.attribute().text();
    return;
  }
  for (const auto& child : node.children()) serialize_node(child, out);
  out.push_back(' ');
  out += std::to_string(node.threshold()) + "of" + std::to_string(node.children().size());
}

// ------------------------------------------------------------ infix parser

enum class TokenKind { word, open, close, comma, end };

struct InfixToken {
  TokenKind kind;
  std::string text;
  std::size_t position;
};

std::vector<InfixToken> tokenize_infix(std::string_view text) {
  std::vector<InfixToken> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (is_space(c)) {
      ++i;
    } else if (c == '(' || c == '[') {
      tokens.push_back({TokenKind::open, std::string(1, c), tokens.size()});
      ++i;
    } else if (c == ')' || c == ']') {
      tokens.push_back({TokenKind::close, std::string(1, c), tokens.size()});
      ++i;
    } else if (c == ',') {
      tokens.push_back({TokenKind::comma, ",", tokens.size()});
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !is_space(text[j]) && std::string_view("()[],").find(text[j]) ==
                                                          std::string_view::npos) {
        ++j;
      }
      tokens.push_back({TokenKind::word, std::string(text.substr(i, j - i)), tokens.size()});
      i = j;
    }
  }
  tokens.push_back({TokenKind::end, "", tokens.size()});
  return tokens;
}

bool is_keyword(const InfixToken& t, std::string_view upper, std::string_view lower) {
  return t.kind == TokenKind::word && (t.text == upper || t.text == lower);
}

class InfixParser {
 public:
  explicit InfixParser(std::vector<InfixToken> tokens) : tokens_(std::move(tokens)) {}

  AccessTree::Node parse() {
    if (peek().kind == TokenKind::end) {
      throw ParseError(ParseFailure::empty_policy, 0, "empty policy");
    }
    auto root = expr();
    if (peek().kind == TokenKind::close) {
      fail(ParseFailure::unbalanced_parentheses, "unmatched closing bracket");
    }
    if (peek().kind != TokenKind::end) fail(ParseFailure::unexpected_token, "unexpected token");
    return root;
  }

 private:
  const InfixToken& peek() const { return tokens_[pos_]; }
  const InfixToken& take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(ParseFailure failure, const std::string& what) const {
    const auto& t = peek();
    throw ParseError(failure, t.position,
                     what + " at token " + std::to_string(t.position) +
                         (t.text.empty() ? std::string() : " ('" + t.text + "')"));
  }

  bool is_kof() const {
    const auto& t = peek();
    if (t.kind != TokenKind::word || t.text.size() < 3 || !t.text.ends_with("of")) return false;
    return all_digits(std::string_view(t.text).substr(0, t.text.size() - 2)) &&
           tokens_[pos_ + 1].kind == TokenKind::open && tokens_[pos_ + 1].text == "(";
  }

  AccessTree::Node expr() {
    std::vector<AccessTree::Node> terms;
    terms.push_back(term());
    while (is_keyword(peek(), "OR", "or")) {
      take();
      terms.push_back(term());
    }
    if (terms.size() == 1) return std::move(terms.front());
    return AccessTree::Node::gate(1, std::move(terms));
  }

  AccessTree::Node term() {
    std::vector<AccessTree::Node> factors;
    factors.push_back(factor());
    while (is_keyword(peek(), "AND", "and")) {
      take();
      factors.push_back(factor());
    }
    if (factors.size() == 1) return std::move(factors.front());
    const auto n = static_cast<std::uint32_t>(factors.size());
    return AccessTree::Node::gate(n, std::move(factors));
  }

  AccessTree::Node factor() {
    const auto& t = peek();
    if (t.kind == TokenKind::open) {
      const char closer = t.text == "(" ? ')' : ']';
      take();
      if (peek().kind == TokenKind::close) fail(ParseFailure::empty_operands, "empty group");
      auto inner = expr();
      expect_close(closer);
      return inner;
    }
    if (is_kof()) {
      const auto k_text = take().text;
      const auto k = parse_uint(std::string_view(k_text).substr(0, k_text.size() - 2));
      take();  // '('
      if (peek().kind == TokenKind::close) fail(ParseFailure::empty_operands, "empty operand list");
      std::vector<AccessTree::Node> operands;
      operands.push_back(expr());
      while (peek().kind == TokenKind::comma) {
        take();
        operands.push_back(expr());
      }
      const std::size_t close_pos = peek().position;
      expect_close(')');
      if (!k || *k < 1 || *k > operands.size()) {
        throw ParseError(ParseFailure::threshold_out_of_range, close_pos,
                         "threshold " + k_text + " out of range for " +
                             std::to_string(operands.size()) + " operands");
      }
      return AccessTree::Node::gate(*k, std::move(operands));
    }
    if (t.kind == TokenKind::word && !is_keyword(t, "AND", "and") && !is_keyword(t, "OR", "or")) {
      std::string raw;
      while (peek().kind == TokenKind::word && !is_keyword(peek(), "AND", "and") &&
             !is_keyword(peek(), "OR", "or") && !is_kof()) {
        if (!raw.empty()) raw.push_back(' ');
        raw += take().text;
      }
      return AccessTree::Node::leaf(Attribute::normalize(raw));
    }
    if (t.kind == TokenKind::end || t.kind == TokenKind::close || t.kind == TokenKind::comma ||
        t.kind == TokenKind::word) {
      fail(ParseFailure::empty_operands, "missing operand");
    }
    fail(ParseFailure::unexpected_token, "unexpected token");
  }

  void expect_close(char closer) {
    const auto& t = peek();
    if (t.kind != TokenKind::close) {
      fail(ParseFailure::unbalanced_parentheses,
           std::string("expected '") + closer + "'");
    }
    if (t.text[0] != closer) {
      fail(ParseFailure::unbalanced_parentheses, "mismatched bracket");
    }
    take();
  }

  std::vector<InfixToken> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

// ------------------------------------------------------------ Attribute

Attribute Attribute::normalize(std::string_view raw) {
  const auto trimmed = trim(raw);
  if (trimmed.empty()) {
    throw ParseError(ParseFailure::empty_attribute, std::nullopt, "empty attribute");
  }
  std::string lowered;
  lowered.reserve(trimmed.size());
  for (const char c : trimmed) {
    lowered.push_back(c == '=' ? ':' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }

  std::string out;
  out.reserve(lowered.size());
  for (std::size_t i = 0; i < lowered.size();) {
    if (!is_space(lowered[i])) {
      out.push_back(lowered[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < lowered.size() && is_space(lowered[j])) ++j;
    const bool next_to_colon = (!out.empty() && out.back() == ':') ||
                               (j < lowered.size() && lowered[j] == ':');
    if (!next_to_colon) out.push_back('_');
    i = j;
  }

  if (out.find_first_of("()[],") != std::string::npos) {
    throw ParseError(ParseFailure::invalid_attribute, std::nullopt,
                     "attribute '" + out + "' contains a reserved character");
  }
  if (looks_like_gate(out) || out == "and" || out == "or") {
    throw ParseError(ParseFailure::invalid_attribute, std::nullopt,
                     "attribute '" + out + "' collides with policy syntax");
  }
  return Attribute(std::move(out));
}

// ------------------------------------------------------------ AttributeSet

AttributeSet::AttributeSet(std::initializer_list<std::string_view> raw) {
  for (const auto r : raw) attrs_.insert(Attribute::normalize(r));
}

AttributeSet AttributeSet::from_strings(const std::vector<std::string>& raw) {
  AttributeSet out;
  for (const auto& r : raw) out.insert(Attribute::normalize(r));
  return out;
}

AttributeSet AttributeSet::parse_list(std::string_view csv) {
  AttributeSet out;
  while (!csv.empty()) {
    const auto comma = csv.find(',');
    const auto item = trim(csv.substr(0, comma));
    if (!item.empty()) out.insert(Attribute::normalize(item));
    if (comma == std::string_view::npos) break;
    csv.remove_prefix(comma + 1);
  }
  return out;
}

bool AttributeSet::contains(std::string_view raw) const {
  return attrs_.contains(Attribute::normalize(raw));
}

std::vector<std::string> AttributeSet::to_strings() const {
  std::vector<std::string> out;
  out.reserve(attrs_.size());
  for (const auto& a : attrs_) out.push_back(a.text());
  return out;
}

// ------------------------------------------------------------ AccessTree

AccessTree::Node AccessTree::Node::leaf(Attribute attribute) {
  Node node;
  node.attribute_ = std::move(attribute);
  return node;
}

AccessTree::Node AccessTree::Node::gate(std::uint32_t threshold, std::vector<Node> children) {
  if (children.empty()) throw Error(Errc::domain, "gate needs at least one child");
  if (threshold < 1 || threshold > children.size()) {
    throw Error(Errc::domain, "gate threshold must satisfy 1 <= k <= number of children");
  }
  Node node;
  node.threshold_ = threshold;
  node.children_ = std::move(children);
  return node;
}

std::size_t AccessTree::leaf_count() const {
  std::size_t nodes = 0, leaves = 0;
  count(root_, nodes, leaves);
  return leaves;
}

std::size_t AccessTree::node_count() const {
  std::size_t nodes = 0, leaves = 0;
  count(root_, nodes, leaves);
  return nodes;
}

std::vector<Attribute> AccessTree::leaves() const {
  std::vector<Attribute> out;
  for (const auto& flat : flatten(*this)) {
    if (flat.node->is_leaf()) out.push_back(flat.node->attribute());
  }
  return out;
}

std::vector<FlatNode> flatten(const AccessTree& tree) {
  std::vector<FlatNode> out;
  std::size_t next_leaf = 0;
  flatten_into(tree.root(), out, next_leaf);
  return out;
}

// ------------------------------------------------------------ parsing

AccessTree parse_postfix(std::string_view text) {
  std::vector<std::string_view> raw;
  for (std::size_t i = 0; i < text.size();) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) raw.push_back(text.substr(i, j - i));
    i = j;
  }
  if (raw.empty()) throw ParseError(ParseFailure::empty_policy, 0, "empty policy");

  std::vector<AccessTree::Node> stack;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (looks_like_gate(raw[i])) {
      const auto gate = parse_gate_token(raw[i], i);
      if (stack.size() < gate.arity) {
        throw ParseError(ParseFailure::stack_underflow, i,
                         "gate '" + std::string(raw[i]) + "' at token " + std::to_string(i) +
                             " needs " + std::to_string(gate.arity) + " operands, stack has " +
                             std::to_string(stack.size()));
      }
      std::vector<AccessTree::Node> children(
          std::make_move_iterator(stack.end() - gate.arity), std::make_move_iterator(stack.end()));
      stack.erase(stack.end() - gate.arity, stack.end());
      stack.push_back(AccessTree::Node::gate(gate.threshold, std::move(children)));
      continue;
    }

    const std::size_t start = i;
    std::string joined(raw[i]);
    auto dangling = [](std::string_view s) { return s.ends_with(':') || s.ends_with('='); };
    while (i + 1 < raw.size() && !looks_like_gate(raw[i + 1]) &&
           (dangling(joined) || raw[i + 1].starts_with(':') || raw[i + 1].starts_with('='))) {
      joined.push_back(' ');
      joined += raw[++i];
    }
    try {
      stack.push_back(AccessTree::Node::leaf(Attribute::normalize(joined)));
    } catch (const ParseError& e) {
      throw ParseError(e.failure(), start,
                       std::string(e.what()) + " at token " + std::to_string(start));
    }
  }
  if (stack.size() != 1) {
    throw ParseError(ParseFailure::leftover_nodes, raw.size(),
                     std::to_string(stack.size()) + " nodes left on the stack at end of policy");
  }
  return AccessTree(std::move(stack.front()));
}

AccessTree parse_infix(std::string_view text) {
  return AccessTree(InfixParser(tokenize_infix(text)).parse());
}

std::string serialize_policy(const AccessTree& tree) {
  std::string out;
  serialize_node(tree.root(), out);
  return out;
}

bool satisfies(const AccessTree& tree, const AttributeSet& attrs) {
  return satisfies_node(tree.root(), attrs);
}

std::optional<SatisfyingAssignment> min_satisfying_assignment(const AccessTree& tree,
                                                              const AttributeSet& attrs) {
  const auto flat = flatten(tree);
  // Children always carry larger ids than their parent, so a reverse sweep
  // sees every child before its gate.
  std::vector<std::optional<std::size_t>> cost(flat.size());
  std::vector<std::vector<std::uint32_t>> pick(flat.size());
  for (std::size_t id = flat.size(); id-- > 0;) {
    const auto& node = *flat[id].node;
    if (node.is_leaf()) {
      if (attrs.contains(node.attribute())) cost[id] = 1;
      continue;
    }
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t k = 1; k <= flat[id].children.size(); ++k) {
      if (cost[flat[id].children[k - 1]]) candidates.push_back(k);
    }
    if (candidates.size() < node.threshold()) continue;
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
      return *cost[flat[id].children[a - 1]] < *cost[flat[id].children[b - 1]];
    });
    candidates.resize(node.threshold());
    std::sort(candidates.begin(), candidates.end());
    std::size_t total = 0;
    for (const auto k : candidates) total += *cost[flat[id].children[k - 1]];
    cost[id] = total;
    pick[id] = std::move(candidates);
  }
  if (!cost[0]) return std::nullopt;

  SatisfyingAssignment out;
  std::vector<std::size_t> pending{0};
  while (!pending.empty()) {
    const auto id = pending.back();
    pending.pop_back();
    if (flat[id].node->is_leaf()) {
      out.leaves.push_back(flat[id].leaf_ordinal);
      continue;
    }
    out.chosen[id] = pick[id];
    for (const auto k : pick[id]) pending.push_back(flat[id].children[k - 1]);
  }
  std::sort(out.leaves.begin(), out.leaves.end());
  return out;
}

}  // namespace abehg::policy
