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

#include <cstdint>
#include <span>
#include <vector>

#include "abehg/entropy.hpp"
#include "abehg/group.hpp"

namespace abehg::math {

/// Threshold-sharing polynomial q(x) = sum coefficients[i] * x^i over Z_p.
/// coefficients[0] is the shared secret.
class SharePolynomial {
 public:
  explicit SharePolynomial(std::vector<Scalar> coefficients);

  std::size_t degree() const { return coefficients_.size() - 1; }
  const std::vector<Scalar>& coefficients() const { return coefficients_; }
  const Scalar& secret() const { return coefficients_.front(); }

 private:
  std::vector<Scalar> coefficients_;
};

SharePolynomial sample_polynomial(std::size_t degree, const Scalar& secret,
                                  Entropy& entropy);

Scalar eval_polynomial(const SharePolynomial& poly, const Scalar& x);

/// Lagrange basis coefficient Delta_{i,S}(x) = prod_{j in S, j != i} (x - j)/(i - j).
/// Indices are positive child positions. Throws Error(Errc::domain) when
/// i is not in S, S has duplicates, or an index is zero.
Scalar lagrange_coeff(std::uint32_t i, std::span<const std::uint32_t> indices,
                      const Scalar& x);

}  // namespace abehg::math
