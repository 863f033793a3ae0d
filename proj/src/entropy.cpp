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

#include "abehg/entropy.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <climits>

#include "abehg/codec.hpp"
#include "abehg/error.hpp"

namespace abehg {

void SystemEntropy::fill(std::span<std::uint8_t> out) {
  std::size_t offset = 0;
  while (offset < out.size()) {
    const std::size_t chunk = std::min<std::size_t>(out.size() - offset, INT_MAX);
    if (RAND_bytes(out.data() + offset, static_cast<int>(chunk)) != 1) {
      throw Error(Errc::entropy, "system entropy source failed");
    }
    offset += chunk;
  }
}

SeededEntropy::SeededEntropy(std::uint64_t seed) {
  std::array<std::uint8_t, 8> raw{};
  for (int i = 0; i < 8; ++i) raw[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  seed_ = sha256(raw);
}

SeededEntropy::SeededEntropy(std::string_view seed) : seed_(sha256(as_bytes(seed))) {}

void SeededEntropy::refill() {
  std::array<std::uint8_t, 40> input{};
  std::copy(seed_.begin(), seed_.end(), input.begin());
  for (int i = 0; i < 8; ++i) {
    input[32 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  }
  ++counter_;
  block_ = sha256(input);
  used_ = 0;
}

void SeededEntropy::fill(std::span<std::uint8_t> out) {
  for (auto& byte : out) {
    if (used_ == block_.size()) refill();
    byte = block_[used_++];
  }
}

void require_production_entropy(const Entropy& source) {
  if (source.deterministic()) {
    throw Error(Errc::entropy, "deterministic test entropy is not allowed here");
  }
}

}  // namespace abehg
