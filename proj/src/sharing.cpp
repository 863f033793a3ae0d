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

#include "abehg/sharing.hpp"

#include <algorithm>
#include <unordered_set>

#include "abehg/error.hpp"

namespace abehg::math {

SharePolynomial::SharePolynomial(std::vector<Scalar> coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) {
    throw Error(Errc::domain, "polynomial needs at least one coefficient");
  }
}

SharePolynomial sample_polynomial(std::size_t degree, const Scalar& secret,
                                  Entropy& entropy) {
  std::vector<Scalar> coefficients;
  coefficients.reserve(degree + 1);
  coefficients.push_back(secret);
  for (std::size_t i = 0; i < degree; ++i) {
    coefficients.push_back(Scalar::random(entropy));
  }
  return SharePolynomial(std::move(coefficients));
}

Scalar eval_polynomial(const SharePolynomial& poly, const Scalar& x) {
  const auto& c = poly.coefficients();
  Scalar acc = c.back();
  for (auto it = c.rbegin() + 1; it != c.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

Scalar lagrange_coeff(std::uint32_t i, std::span<const std::uint32_t> indices,
                      const Scalar& x) {
  std::unordered_set<std::uint32_t> seen;
  for (const auto j : indices) {
    if (j == 0) throw Error(Errc::domain, "interpolation index must be nonzero");
    if (!seen.insert(j).second) {
      throw Error(Errc::domain, "duplicate interpolation index");
    }
  }
  if (!seen.contains(i)) {
    throw Error(Errc::domain, "index is not a member of the interpolation set");
  }

  const Scalar xi = Scalar::from_u64(i);
  Scalar numerator = Scalar::one();
  Scalar denominator = Scalar::one();
  for (const auto j : indices) {
    if (j == i) continue;
    const Scalar xj = Scalar::from_u64(j);
    numerator *= x - xj;
    denominator *= xi - xj;
  }
  return numerator * denominator.inverse();
}

}  // namespace abehg::math
