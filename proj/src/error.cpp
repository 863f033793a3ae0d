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

#include "abehg/error.hpp"

namespace abehg {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::parse: return "parse_error";
    case Errc::domain: return "domain_error";
    case Errc::policy_not_satisfied: return "policy_not_satisfied";
    case Errc::authentication_failed: return "authentication_failure";
    case Errc::malformed: return "malformed";
    case Errc::version_mismatch: return "version_mismatch";
    case Errc::group_mismatch: return "group_mismatch";
    case Errc::entropy: return "entropy_failure";
    case Errc::oversize: return "oversize";
    case Errc::unauthorized: return "unauthorized";
    case Errc::forbidden: return "forbidden";
    case Errc::not_found: return "not_found";
    case Errc::invalid_scope: return "invalid_scope";
    case Errc::invalid_grant: return "invalid_grant";
    case Errc::conflict: return "conflict";
    case Errc::bad_request: return "bad_request";
    case Errc::io: return "io_error";
    case Errc::config: return "config_error";
  }
  return "unknown";
}

std::optional<Errc> errc_from_name(std::string_view name) noexcept {
  for (int i = 0; i <= static_cast<int>(Errc::config); ++i) {
    const auto code = static_cast<Errc>(i);
    if (errc_name(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace abehg
