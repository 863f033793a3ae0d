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

#include <array>
#include <string_view>

#include "abehg/policy.hpp"

namespace abehg::testing {

// Verbatim access policy of the EHR use case.
inline constexpr std::string_view kPolicyT =
    "Position: Doctor Position: Researcher Position: Professor 1of3 Department: Radiology 2of2 "
    "Position: PhD Position: Postdoc 1of3 University: AMU 2of2";

// The same policy in its boolean spelling.
inline constexpr std::string_view kPolicyTBoolean =
    "[[[[position = Doctor OR position = Researcher OR position = Professor] AND Department = "
    "Radiology] OR position = PhD OR position = Postdoc] AND University = AMU]";

struct TableRow {
  std::string_view attributes;
  bool satisfies;
};

// Data-user attribute sets and their expected outcome against kPolicyT.
inline constexpr std::array<TableRow, 8> kUserTable = {{
    {"Position: Doctor", false},
    {"Position: PhD, University: AMU", true},
    {"Position: Doctor, Department: Radiology, University: AMU", true},
    {"Position: PhD, College: JNMC, University: AMU, Department: Radiology, City: Aligarh", true},
    {"Position: Researcher, University: AMU, Department: Radiology, City: Aligarh, College: JNMC",
     true},
    {"Position: Postdoc, College: JNMC, University: AMU, Department: Radiology, City: Aligarh, "
     "Position: Researcher",
     true},
    {"Position: PhD, College: JNMC, University: AMU, Department: Radiology, City: Aligarh, "
     "Position: Researcher, Status: Temporary",
     true},
    {"Position: Doctor, College: JNMC, University: AMU, Department: Radiology, City: Aligarh, "
     "Position: Researcher, Status: Permanent, Year: 2022",
     true},
}};

inline constexpr std::string_view kS0 = "Position: Doctor, Department: Radiology, University: AMU";
inline constexpr std::string_view kS1 = "Position: Student, University: AMU";
inline constexpr std::string_view kS2 = "Position: PhD, College: JNMC, University: AMU";

inline policy::AttributeSet row_attrs(std::size_t row) {
  return policy::AttributeSet::parse_list(kUserTable.at(row).attributes);
}

}  // namespace abehg::testing
