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

#include <doctest.h>

#include "abehg/error.hpp"
#include "abehg/policy.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace abehg;
using namespace abehg::policy;
using abehg::testing::kPolicyT;
using abehg::testing::kPolicyTBoolean;

namespace {

AccessTree::Node L(std::string_view a) { return AccessTree::Node::leaf(Attribute::normalize(a)); }
AccessTree::Node G(std::uint32_t k, std::vector<AccessTree::Node> c) {
  return AccessTree::Node::gate(k, std::move(c));
}

ParseFailure failure_of(auto&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.failure();
  }
  FAIL("expected a ParseError");
  return ParseFailure::unexpected_token;
}

}  // namespace

TEST_CASE("normalize_attribute") {
  CHECK(normalize_attribute("Position: Doctor").text() == "position:doctor");
  CHECK(normalize_attribute("position = Doctor").text() == "position:doctor");
  CHECK(normalize_attribute("  University:AMU ").text() == "university:amu");
  CHECK(normalize_attribute("Status :  Permanent").text() == "status:permanent");
  CHECK(normalize_attribute("Dr. P").text() == "dr._p");
  CHECK_THROWS_AS(normalize_attribute("   "), ParseError);
  CHECK_THROWS_AS(normalize_attribute("2of3"), ParseError);
  CHECK_THROWS_AS(normalize_attribute("a(b"), ParseError);

  for (const auto raw : {"Position: Doctor", "position = Doctor", "Dr. P", "Year: 2022"}) {
    const auto once = normalize_attribute(raw);
    CHECK(normalize_attribute(once.text()) == once);
  }
}

TEST_CASE("attribute sets normalize and deduplicate") {
  const AttributeSet a{"Position: Doctor", "position = doctor", "University: AMU"};
  CHECK(a.size() == 2);
  CHECK(a == AttributeSet::parse_list("University:AMU, Position: Doctor"));
  // Two values under one prefix are independent attributes.
  CHECK(AttributeSet::parse_list("Position: Postdoc, Position: Researcher").size() == 2);
}

TEST_CASE("parse_postfix basics") {
  CHECK(parse_postfix("a b 2of2") == AccessTree(G(2, {L("a"), L("b")})));
  CHECK(parse_postfix("a") == AccessTree(L("a")));
  CHECK(failure_of([] { parse_postfix("a 2of2"); }) == ParseFailure::stack_underflow);
  CHECK(failure_of([] { parse_postfix("a b"); }) == ParseFailure::leftover_nodes);
  CHECK(failure_of([] { parse_postfix("a b 3of2"); }) == ParseFailure::threshold_out_of_range);
  CHECK(failure_of([] { parse_postfix("a b 0of2"); }) == ParseFailure::threshold_out_of_range);
  CHECK(failure_of([] { parse_postfix("a b 2ofx"); }) == ParseFailure::malformed_gate);
  CHECK(failure_of([] { parse_postfix("   "); }) == ParseFailure::empty_policy);

  try {
    parse_postfix("a b c 1of2 1of3");
    FAIL("expected underflow");
  } catch (const ParseError& e) {
    CHECK(e.failure() == ParseFailure::stack_underflow);
    REQUIRE(e.position().has_value());
    CHECK(*e.position() == 4);
  }
}

TEST_CASE("the EHR policy parses into the expected tree") {
  const auto tree = parse_postfix(kPolicyT);
  const auto expected = AccessTree(
      G(2, {G(1, {G(2, {G(1, {L("position:doctor"), L("position:researcher"),
                              L("position:professor")}),
                        L("department:radiology")}),
                  L("position:phd"), L("position:postdoc")}),
            L("university:amu")}));
  CHECK(tree == expected);
  CHECK(tree.leaf_count() == 7);
  CHECK(tree == parse_infix(kPolicyTBoolean));
  CHECK(serialize_policy(tree) ==
        "position:doctor position:researcher position:professor 1of3 department:radiology 2of2 "
        "position:phd position:postdoc 1of3 university:amu 2of2");
}

TEST_CASE("parse_infix") {
  CHECK(parse_infix("a AND b") == AccessTree(G(2, {L("a"), L("b")})));
  CHECK(parse_infix("a OR b") == AccessTree(G(1, {L("a"), L("b")})));
  CHECK(parse_infix("2of(a, b, c)") == AccessTree(G(2, {L("a"), L("b"), L("c")})));
  CHECK(parse_infix("(p OR q OR r) AND (h OR s)") ==
        AccessTree(G(2, {G(1, {L("p"), L("q"), L("r")}), G(1, {L("h"), L("s")})})));
  CHECK(parse_infix("(Dr. P OR Dr. Q OR Nurse R) AND (Hospital H OR Hospital S)").leaf_count() == 5);
  // AND binds tighter than OR.
  CHECK(parse_infix("a OR b AND c") == AccessTree(G(1, {L("a"), G(2, {L("b"), L("c")})})));
  CHECK(parse_infix("((a))") == AccessTree(L("a")));

  CHECK(failure_of([] { parse_infix("(a AND b"); }) == ParseFailure::unbalanced_parentheses);
  CHECK(failure_of([] { parse_infix("a AND b)"); }) == ParseFailure::unbalanced_parentheses);
  CHECK(failure_of([] { parse_infix("[a AND b)"); }) == ParseFailure::unbalanced_parentheses);
  CHECK(failure_of([] { parse_infix("2of()"); }) == ParseFailure::empty_operands);
  CHECK(failure_of([] { parse_infix("a AND"); }) == ParseFailure::empty_operands);
  CHECK(failure_of([] { parse_infix("3of(a, b)"); }) == ParseFailure::threshold_out_of_range);
  CHECK(failure_of([] { parse_infix("0of(a)"); }) == ParseFailure::threshold_out_of_range);
  CHECK(failure_of([] { parse_infix(""); }) == ParseFailure::empty_policy);
}

TEST_CASE("serialize_policy round-trips") {
  CHECK(serialize_policy(AccessTree(G(2, {L("a"), L("b")}))) == "a b 2of2");
  CHECK(serialize_policy(AccessTree(L("a"))) == "a");

  testing::TreeGenerator gen(5, 8);
  for (int i = 0; i < 200; ++i) {
    const auto tree = gen.tree(15);
    CHECK(parse_postfix(serialize_policy(tree)) == tree);
  }
}

TEST_CASE("satisfies reproduces the data-user table") {
  const auto tree = parse_postfix(kPolicyT);
  for (std::size_t row = 0; row < testing::kUserTable.size(); ++row) {
    CAPTURE(row);
    CHECK(satisfies(tree, testing::row_attrs(row)) == testing::kUserTable[row].satisfies);
  }
  CHECK_FALSE(satisfies(tree, AttributeSet{}));
  CHECK(satisfies(tree, AttributeSet::parse_list(testing::kS0)));
  CHECK_FALSE(satisfies(tree, AttributeSet::parse_list(testing::kS1)));
  CHECK(satisfies(tree, AttributeSet::parse_list(testing::kS2)));
}

TEST_CASE("satisfies agrees with the brute-force oracle on random trees") {
  testing::TreeGenerator gen(17, 6);
  int positives = 0;
  for (int i = 0; i < 200; ++i) {
    const auto tree = gen.tree(15);
    const auto attrs = gen.attrs(0.5);
    const bool expected = testing::brute_force_satisfies(tree, attrs);
    positives += expected;
    CHECK(satisfies(tree, attrs) == expected);
  }
  CHECK(positives > 20);
  CHECK(positives < 180);
}

TEST_CASE("min_satisfying_assignment") {
  SUBCASE("tie-break picks the lowest child index") {
    const AccessTree tree(G(1, {L("a"), L("b")}));
    const auto a = min_satisfying_assignment(tree, AttributeSet{"a", "b"});
    REQUIRE(a);
    CHECK(a->chosen.at(0) == std::vector<std::uint32_t>{1});
    CHECK(a->leaves == std::vector<std::size_t>{0});
  }
  SUBCASE("unsatisfied tree yields nothing") {
    CHECK_FALSE(min_satisfying_assignment(AccessTree(G(2, {L("a"), L("b")})), AttributeSet{"a"}));
  }
  SUBCASE("row 2 of the table uses only phd and amu") {
    const auto tree = parse_postfix(kPolicyT);
    const auto attrs = testing::row_attrs(1);
    const auto a = min_satisfying_assignment(tree, attrs);
    REQUIRE(a);
    const auto oracle = testing::exhaustive_min_cover(tree, attrs);
    REQUIRE(oracle);
    CHECK(a->leaves == *oracle);
    const auto leaves = tree.leaves();
    std::vector<std::string> used;
    for (const auto i : a->leaves) used.push_back(leaves[i].text());
    CHECK(used == std::vector<std::string>{"position:phd", "university:amu"});
  }
  SUBCASE("prefers the cheaper child") {
    // Child 1 needs two leaves, child 2 needs one.
    const AccessTree tree(G(1, {G(2, {L("a"), L("b")}), L("c")}));
    const auto a = min_satisfying_assignment(tree, AttributeSet{"a", "b", "c"});
    REQUIRE(a);
    CHECK(a->chosen.at(0) == std::vector<std::uint32_t>{2});
    CHECK(a->leaves == std::vector<std::size_t>{2});
  }
}

TEST_CASE("assignments are minimal, replayable and deterministic on random trees") {
  testing::TreeGenerator gen(23, 6);
  for (int i = 0; i < 200; ++i) {
    const auto tree = gen.tree(12);
    const auto attrs = gen.attrs(0.6);
    const auto a = min_satisfying_assignment(tree, attrs);
    CHECK(a.has_value() == satisfies(tree, attrs));
    if (!a) continue;

    CHECK(min_satisfying_assignment(tree, attrs) == a);

    const auto leaves = tree.leaves();
    AttributeSet used;
    for (const auto l : a->leaves) used.insert(leaves[l]);
    CHECK(satisfies(tree, used));

    const auto flat = flatten(tree);
    for (const auto& [gate, picked] : a->chosen) {
      CHECK(picked.size() == flat[gate].node->threshold());
    }

    const auto oracle = testing::exhaustive_min_cover(tree, attrs);
    REQUIRE(oracle);
    CHECK(a->leaves.size() == oracle->size());
  }
}
