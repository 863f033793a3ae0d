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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace abehg {

enum class Errc {
  parse,
  domain,
  policy_not_satisfied,
  authentication_failed,
  malformed,
  version_mismatch,
  group_mismatch,
  entropy,
  oversize,
  unauthorized,
  forbidden,
  not_found,
  invalid_scope,
  invalid_grant,
  conflict,
  bad_request,
  io,
  config,
};

std::string_view errc_name(Errc code) noexcept;
/// Inverse of errc_name.
std::optional<Errc> errc_from_name(std::string_view name) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

enum class ParseFailure {
  empty_attribute,
  invalid_attribute,
  stack_underflow,
  leftover_nodes,
  malformed_gate,
  threshold_out_of_range,
  unbalanced_parentheses,
  empty_operands,
  unexpected_token,
  empty_policy,
};

// Policy text errors carry the zero-based token position where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(ParseFailure failure, std::optional<std::size_t> position,
             const std::string& what)
      : Error(Errc::parse, what), failure_(failure), position_(position) {}

  ParseFailure failure() const noexcept { return failure_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ParseFailure failure_;
  std::optional<std::size_t> position_;
};

}  // namespace abehg
