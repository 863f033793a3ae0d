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

// Cost of keygen, encrypt (seal) and decrypt (open) as a function of the
// number of attributes, plus a least-squares trend fit over the results.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "abehg/entropy.hpp"

namespace abehg::bench {

enum class Phase { keygen, encrypt, decrypt };

std::string_view to_string(Phase phase);
/// Throws Error(Errc::parse) for unknown names.
Phase parse_phase(std::string_view name);

struct BenchRow {
  Phase phase = Phase::keygen;
  unsigned attr_count = 0;
  unsigned trial = 0;
  double elapsed_us = 0;

  bool operator==(const BenchRow&) const = default;
};

struct BenchOptions {
  unsigned max_attrs = 10;
  unsigned trials = 20;
  std::size_t payload_bytes = 1024;
  /// Called at the start of each round; round 0 is the warm-up.
  std::function<void(unsigned round)> progress;
};

/// Measures attr_count = 1..max_attrs, each with an n-attribute key and an
/// n-leaf AND policy. One warm-up trial per count is discarded. Rows come
/// back sorted by (phase, attr_count, trial). Refuses deterministic entropy;
/// Errc::domain unless max_attrs >= 2 and trials >= 5.
std::vector<BenchRow> bench_run(const BenchOptions& options, Entropy& entropy);

inline constexpr std::string_view kCsvHeader = "phase,attr_count,trial,elapsed_us";

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);
/// Throws Error(Errc::parse) on a bad header or row.
std::vector<BenchRow> read_csv(std::istream& in);

struct TrendFit {
  Phase phase = Phase::keygen;
  double slope = 0;      // us per attribute
  double intercept = 0;  // us
  double r_squared = 0;  // in [0, 1]; 1 when the means are fitted exactly
  std::vector<unsigned> attr_counts;
  std::vector<double> means;
  std::vector<double> medians;
};

/// Ordinary least squares of mean elapsed time on attr_count, one fit per
/// phase present in rows. Errc::domain when a phase has a single count.
std::vector<TrendFit> fit_linear(const std::vector<BenchRow>& rows);

bool strictly_increasing(const std::vector<double>& values);

}  // namespace abehg::bench
