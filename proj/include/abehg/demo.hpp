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

// End-to-end replay of the EHR sharing procedure over HTTP:
//
//   DO-1  owner registers and obtains a write token
//   DO-2  owner seals the record under the policy with the public key
//   DO-3  owner uploads the envelope
//   AA    user registers its attributes and receives a private key
//   DU-5  user presents its authorization grant (client credentials)
//   DU-6  authorization server issues the access token
//   DU-7  user locates the record on the resource server
//   DU-8  user fetches the envelope with the token and opens it

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "abehg/codec.hpp"
#include "abehg/entropy.hpp"
#include "abehg/error.hpp"
#include "abehg/policy.hpp"

namespace abehg::demo {

inline constexpr std::string_view kDefaultPolicy =
    "Position: Doctor Position: Researcher Position: Professor 1of3 Department: Radiology 2of2 "
    "Position: PhD Position: Postdoc 1of3 University: AMU 2of2";
inline constexpr std::string_view kDefaultAttributes =
    "Position: Doctor, Department: Radiology, University: AMU";

struct DemoOptions {
  std::string authz_url;
  std::string resource_url;
  std::string policy_text{kDefaultPolicy};
  policy::AttributeSet user_attrs = policy::AttributeSet::parse_list(kDefaultAttributes);
  Bytes record;  // empty selects a built-in sample record
  bool json = false;
  /// Runs between DU-7 and DU-8, e.g. to let the token expire.
  std::function<void(std::int64_t expires_in)> before_fetch;
};

struct StepLog {
  std::string step;
  bool ok = false;
  std::string detail;
};

struct DemoResult {
  bool success = false;
  std::string failed_step;
  std::optional<Errc> error;
  Bytes recovered;
  std::vector<StepLog> steps;

  /// 0 on success, 3 when the key does not satisfy the policy, 1 otherwise.
  int exit_code() const;
};

/// Prints one line per step to `out` (JSON lines when options.json).
DemoResult run_demo(const DemoOptions& options, Entropy& entropy, std::ostream& out);

/// Built-in sample record.
Bytes sample_record();

}  // namespace abehg::demo
