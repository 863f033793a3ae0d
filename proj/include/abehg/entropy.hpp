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
#include <cstdint>
#include <span>
#include <string_view>

namespace abehg {

/// Source of random bytes. Passed explicitly to every randomized operation.
class Entropy {
 public:
  virtual ~Entropy() = default;

  /// Fills `out` with random bytes; throws Error(Errc::entropy) on failure.
  virtual void fill(std::span<std::uint8_t> out) = 0;

  /// True for reproducible test sources. Service paths refuse these.
  virtual bool deterministic() const noexcept { return false; }
};

/// Operating-system CSPRNG (OpenSSL RAND_bytes).
class SystemEntropy final : public Entropy {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

/// Test-only reproducible stream: SHA-256(seed || counter) blocks.
class SeededEntropy final : public Entropy {
 public:
  explicit SeededEntropy(std::uint64_t seed);
  explicit SeededEntropy(std::string_view seed);

  void fill(std::span<std::uint8_t> out) override;
  bool deterministic() const noexcept override { return true; }

 private:
  void refill();

  std::array<std::uint8_t, 32> seed_{};
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> block_{};
  std::size_t used_ = block_.size();
};

/// Throws Error(Errc::entropy) when `source` is a deterministic test source.
void require_production_entropy(const Entropy& source);

}  // namespace abehg
