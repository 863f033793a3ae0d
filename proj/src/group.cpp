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

#include "abehg/group.hpp"

#include <cstring>

#include "abehg/error.hpp"

namespace abehg::math {

namespace {

const blst_fr kZeroFr{};

// Coordinate i (0..11) of an Fp12 element in tower order.
blst_fp& coordinate(blst_fp12& v, std::size_t i) {
  return v.fp6[i / 6].fp2[(i / 2) % 3].fp[i % 2];
}
const blst_fp& coordinate(const blst_fp12& v, std::size_t i) {
  return v.fp6[i / 6].fp2[(i / 2) % 3].fp[i % 2];
}

}  // namespace

// ---------------------------------------------------------------- Scalar

Scalar::Scalar() = default;

Scalar Scalar::from_u64(std::uint64_t value) {
  const std::uint64_t limbs[4] = {value, 0, 0, 0};
  Scalar out;
  blst_fr_from_uint64(&out.value_, limbs);
  return out;
}

Scalar Scalar::random(Entropy& entropy) {
  // 512 bits reduced mod p: bias below 2^-256.
  std::array<std::uint8_t, 64> wide{};
  entropy.fill(wide);
  blst_scalar reduced;
  blst_scalar_from_be_bytes(&reduced, wide.data(), wide.size());
  Scalar out;
  blst_fr_from_scalar(&out.value_, &reduced);
  std::memset(wide.data(), 0, wide.size());
  return out;
}

Scalar Scalar::random_nonzero(Entropy& entropy) {
  for (;;) {
    Scalar candidate = random(entropy);
    if (!candidate.is_zero()) return candidate;
  }
}

Scalar Scalar::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kScalarBytes) {
    throw Error(Errc::malformed, "scalar encoding must be 32 bytes");
  }
  blst_scalar raw;
  blst_scalar_from_bendian(&raw, bytes.data());
  if (!blst_scalar_fr_check(&raw)) {
    throw Error(Errc::malformed, "scalar encoding is not reduced");
  }
  Scalar out;
  blst_fr_from_scalar(&out.value_, &raw);
  return out;
}

std::array<std::uint8_t, kScalarBytes> Scalar::to_bytes() const {
  blst_scalar raw = to_blst();
  std::array<std::uint8_t, kScalarBytes> out{};
  blst_bendian_from_scalar(out.data(), &raw);
  return out;
}

blst_scalar Scalar::to_blst() const {
  blst_scalar raw;
  blst_scalar_from_fr(&raw, &value_);
  return raw;
}

bool Scalar::is_zero() const {
  return std::memcmp(&value_, &kZeroFr, sizeof(value_)) == 0;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw Error(Errc::domain, "zero has no inverse");
  Scalar out;
  blst_fr_eucl_inverse(&out.value_, &value_);
  return out;
}

Scalar Scalar::operator+(const Scalar& rhs) const {
  Scalar out;
  blst_fr_add(&out.value_, &value_, &rhs.value_);
  return out;
}

Scalar Scalar::operator-(const Scalar& rhs) const {
  Scalar out;
  blst_fr_sub(&out.value_, &value_, &rhs.value_);
  return out;
}

Scalar Scalar::operator*(const Scalar& rhs) const {
  Scalar out;
  blst_fr_mul(&out.value_, &value_, &rhs.value_);
  return out;
}

Scalar Scalar::operator-() const { return Scalar{} - *this; }

bool Scalar::operator==(const Scalar& rhs) const {
  return std::memcmp(&value_, &rhs.value_, sizeof(value_)) == 0;
}

// ---------------------------------------------------------------- G0

G0Element::G0Element() = default;

G0Element G0Element::generator() {
  G0Element out;
  out.g1_ = *blst_p1_generator();
  out.g2_ = *blst_p2_generator();
  return out;
}

G0Element G0Element::hash(std::span<const std::uint8_t> label) {
  const auto* dst = reinterpret_cast<const byte*>(kAttributeHashTag.data());
  G0Element out;
  blst_hash_to_g1(&out.g1_, label.data(), label.size(), dst, kAttributeHashTag.size(),
                  nullptr, 0);
  blst_hash_to_g2(&out.g2_, label.data(), label.size(), dst, kAttributeHashTag.size(),
                  nullptr, 0);
  return out;
}

G0Element G0Element::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kG0Bytes) {
    throw Error(Errc::malformed, "group element encoding must be 144 bytes");
  }
  blst_p1_affine a1;
  blst_p2_affine a2;
  if (blst_p1_uncompress(&a1, bytes.data()) != BLST_SUCCESS ||
      blst_p2_uncompress(&a2, bytes.data() + 48) != BLST_SUCCESS) {
    throw Error(Errc::malformed, "group element is not a curve point");
  }
  if (!blst_p1_affine_in_g1(&a1) || !blst_p2_affine_in_g2(&a2)) {
    throw Error(Errc::malformed, "group element fails the subgroup check");
  }
  G0Element out;
  blst_p1_from_affine(&out.g1_, &a1);
  blst_p2_from_affine(&out.g2_, &a2);
  return out;
}

std::array<std::uint8_t, kG0Bytes> G0Element::to_bytes() const {
  std::array<std::uint8_t, kG0Bytes> out{};
  blst_p1_compress(out.data(), &g1_);
  blst_p2_compress(out.data() + 48, &g2_);
  return out;
}

G0Element G0Element::operator*(const G0Element& rhs) const {
  G0Element out;
  blst_p1_add_or_double(&out.g1_, &g1_, &rhs.g1_);
  blst_p2_add_or_double(&out.g2_, &g2_, &rhs.g2_);
  return out;
}

G0Element G0Element::pow(const Scalar& exponent) const {
  const blst_scalar raw = exponent.to_blst();
  G0Element out;
  blst_p1_mult(&out.g1_, &g1_, raw.b, 255);
  blst_p2_mult(&out.g2_, &g2_, raw.b, 255);
  return out;
}

G0Element G0Element::inverse() const {
  G0Element out = *this;
  blst_p1_cneg(&out.g1_, true);
  blst_p2_cneg(&out.g2_, true);
  return out;
}

bool G0Element::is_identity() const {
  return blst_p1_is_inf(&g1_) && blst_p2_is_inf(&g2_);
}

bool G0Element::operator==(const G0Element& rhs) const {
  return blst_p1_is_equal(&g1_, &rhs.g1_) && blst_p2_is_equal(&g2_, &rhs.g2_);
}

// ---------------------------------------------------------------- GT

GTElement::GTElement() : value_(*blst_fp12_one()) {}

GTElement GTElement::generator() {
  static const GTElement kGenerator =
      pairing(G0Element::generator(), G0Element::generator());
  return kGenerator;
}

GTElement GTElement::random(Entropy& entropy) {
  return generator().pow(Scalar::random(entropy));
}

GTElement GTElement::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kGTBytes) {
    throw Error(Errc::malformed, "target group encoding must be 576 bytes");
  }
  blst_fp12 value;
  for (std::size_t i = 0; i < 12; ++i) {
    blst_fp_from_bendian(&coordinate(value, i), bytes.data() + 48 * i);
  }
  GTElement out(value);
  const auto canonical = out.to_bytes();
  if (std::memcmp(canonical.data(), bytes.data(), kGTBytes) != 0) {
    throw Error(Errc::malformed, "target group coordinate is not reduced");
  }
  if (!blst_fp12_in_group(&out.value_)) {
    throw Error(Errc::malformed, "target group element fails the subgroup check");
  }
  return out;
}

std::array<std::uint8_t, kGTBytes> GTElement::to_bytes() const {
  std::array<std::uint8_t, kGTBytes> out{};
  for (std::size_t i = 0; i < 12; ++i) {
    blst_bendian_from_fp(out.data() + 48 * i, &coordinate(value_, i));
  }
  return out;
}

GTElement GTElement::operator*(const GTElement& rhs) const {
  GTElement out;
  blst_fp12_mul(&out.value_, &value_, &rhs.value_);
  return out;
}

GTElement GTElement::operator/(const GTElement& rhs) const {
  return *this * rhs.inverse();
}

GTElement GTElement::inverse() const {
  GTElement out;
  blst_fp12_inverse(&out.value_, &value_);
  return out;
}

GTElement GTElement::pow(const Scalar& exponent) const {
  // Fixed 4-bit window over the big-endian exponent.
  std::array<blst_fp12, 16> table;
  table[0] = *blst_fp12_one();
  for (std::size_t i = 1; i < table.size(); ++i) {
    blst_fp12_mul(&table[i], &table[i - 1], &value_);
  }
  const auto bytes = exponent.to_bytes();
  blst_fp12 acc = *blst_fp12_one();
  bool started = false;
  for (const auto byte : bytes) {
    for (const unsigned nibble : {unsigned(byte >> 4), unsigned(byte & 0x0f)}) {
      if (started) {
        for (int s = 0; s < 4; ++s) blst_fp12_cyclotomic_sqr(&acc, &acc);
      }
      if (nibble != 0) {
        blst_fp12_mul(&acc, &acc, &table[nibble]);
        started = true;
      }
    }
  }
  return GTElement(acc);
}

bool GTElement::is_identity() const { return blst_fp12_is_one(&value_); }

bool GTElement::operator==(const GTElement& rhs) const {
  return blst_fp12_is_equal(&value_, &rhs.value_);
}

GTElement pairing(const G0Element& a, const G0Element& b) {
  if (blst_p1_is_inf(&a.g1()) || blst_p2_is_inf(&b.g2())) return GTElement::identity();
  blst_p1_affine p;
  blst_p2_affine q;
  blst_p1_to_affine(&p, &a.g1());
  blst_p2_to_affine(&q, &b.g2());
  blst_fp12 loop;
  blst_miller_loop(&loop, &q, &p);
  blst_fp12 out;
  blst_final_exp(&out, &loop);
  return GTElement(out);
}

}  // namespace abehg::math
