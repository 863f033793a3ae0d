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

// Symmetric-model view of the BLS12-381 pairing.
//
// G0Element carries a (G1, G2) pair. Elements derived from the generator by
// exponentiation hold the same exponent in both halves, so for them
// pairing(a, b) == pairing(b, a). Hashed elements have independently hashed
// halves; callers must put the hash-bearing operand first in pairing().

#include <blst.h>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "abehg/codec.hpp"
#include "abehg/entropy.hpp"

namespace abehg::math {

inline constexpr std::string_view kGroupId = "bls12-381/sym-pair/v1";
inline constexpr std::string_view kAttributeHashTag = "cpabe:attr:v1";

inline constexpr std::size_t kScalarBytes = 32;
inline constexpr std::size_t kG0Bytes = 48 + 96;
inline constexpr std::size_t kGTBytes = 12 * 48;

/// Element of Z_p, p the prime order of the pairing groups. Always reduced.
class Scalar {
 public:
  Scalar();  // zero

  static Scalar from_u64(std::uint64_t value);
  static Scalar one() { return from_u64(1); }
  static Scalar random(Entropy& entropy);
  static Scalar random_nonzero(Entropy& entropy);
  /// 32-byte big-endian; values >= p are rejected.
  static Scalar from_bytes(std::span<const std::uint8_t> bytes);

  std::array<std::uint8_t, kScalarBytes> to_bytes() const;

  bool is_zero() const;
  /// Throws Error(Errc::domain) for zero.
  Scalar inverse() const;

  Scalar operator+(const Scalar& rhs) const;
  Scalar operator-(const Scalar& rhs) const;
  Scalar operator*(const Scalar& rhs) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& rhs) { return *this = *this + rhs; }
  Scalar& operator*=(const Scalar& rhs) { return *this = *this * rhs; }

  bool operator==(const Scalar& rhs) const;

  /// Little-endian canonical bytes as consumed by blst point multiplication.
  blst_scalar to_blst() const;

 private:
  blst_fr value_{};
};

/// Element of the symmetric-model source group, written multiplicatively.
class G0Element {
 public:
  G0Element();  // identity

  static G0Element generator();
  static G0Element identity() { return {}; }
  /// Deterministic hash into the group under the attribute DST.
  static G0Element hash(std::span<const std::uint8_t> label);
  /// Compressed G1 || compressed G2; both halves subgroup-checked.
  static G0Element from_bytes(std::span<const std::uint8_t> bytes);

  std::array<std::uint8_t, kG0Bytes> to_bytes() const;

  G0Element operator*(const G0Element& rhs) const;
  G0Element pow(const Scalar& exponent) const;
  G0Element inverse() const;

  bool is_identity() const;
  bool operator==(const G0Element& rhs) const;

  const blst_p1& g1() const { return g1_; }
  const blst_p2& g2() const { return g2_; }

 private:
  blst_p1 g1_{};
  blst_p2 g2_{};
};

/// Element of the target group GT.
class GTElement {
 public:
  GTElement();  // identity

  static GTElement identity() { return {}; }
  /// e(g, g).
  static GTElement generator();
  static GTElement random(Entropy& entropy);
  /// Twelve 48-byte big-endian base-field coordinates; checked to lie in GT.
  static GTElement from_bytes(std::span<const std::uint8_t> bytes);

  std::array<std::uint8_t, kGTBytes> to_bytes() const;

  GTElement operator*(const GTElement& rhs) const;
  GTElement operator/(const GTElement& rhs) const;
  GTElement pow(const Scalar& exponent) const;
  GTElement inverse() const;

  bool is_identity() const;
  bool operator==(const GTElement& rhs) const;

 private:
  explicit GTElement(const blst_fp12& value) : value_(value) {}
  friend GTElement pairing(const G0Element&, const G0Element&);

  blst_fp12 value_;
};

/// e(a.g1, b.g2).
GTElement pairing(const G0Element& a, const G0Element& b);

inline G0Element hash_to_group(std::string_view label) {
  return G0Element::hash(as_bytes(label));
}

}  // namespace abehg::math
