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

#include <doctest.h>

#include <sstream>

#include "abehg/bench.hpp"
#include "abehg/error.hpp"

using namespace abehg;
using namespace abehg::bench;

namespace {

std::vector<BenchRow> synthetic(auto&& elapsed) {
  std::vector<BenchRow> rows;
  for (auto phase : {Phase::keygen, Phase::encrypt, Phase::decrypt}) {
    for (unsigned n = 1; n <= 10; ++n) {
      for (unsigned t = 1; t <= 5; ++t) rows.push_back({phase, n, t, elapsed(n, t)});
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("exact linear fit") {
  const auto fits = fit_linear(synthetic([](unsigned n, unsigned) { return 100.0 * n; }));
  REQUIRE(fits.size() == 3);
  for (const auto& f : fits) {
    CHECK(f.slope == doctest::Approx(100));
    CHECK(f.intercept == doctest::Approx(0).epsilon(1e-9));
    CHECK(f.r_squared == doctest::Approx(1));
    CHECK(strictly_increasing(f.means));
  }
}

TEST_CASE("constant and noisy series") {
  const auto flat = fit_linear(synthetic([](unsigned, unsigned) { return 42.0; }));
  CHECK(flat[0].slope == doctest::Approx(0));
  CHECK(flat[0].intercept == doctest::Approx(42));
  CHECK_FALSE(strictly_increasing(flat[0].means));

  // Mean and median differ under an outlier trial.
  const auto noisy = fit_linear(synthetic([](unsigned n, unsigned t) { return t == 5 ? 1000.0 * n : 10.0 * n; }));
  CHECK(noisy[0].means[0] == doctest::Approx(208));
  CHECK(noisy[0].medians[0] == doctest::Approx(10));
  CHECK(noisy[0].r_squared >= 0.0);
  CHECK(noisy[0].r_squared <= 1.0);

  // Alternating means: a poor fit.
  const auto zigzag = fit_linear(synthetic([](unsigned n, unsigned) { return n % 2 ? 10.0 : 1000.0; }));
  CHECK(zigzag[0].r_squared < 0.2);
}

TEST_CASE("degenerate input") {
  std::vector<BenchRow> rows{{Phase::keygen, 3, 1, 5.0}, {Phase::keygen, 3, 2, 6.0}};
  CHECK_THROWS_AS(fit_linear(rows), Error);
  CHECK(fit_linear({}).empty());
}

TEST_CASE("csv round trip") {
  const auto rows = synthetic([](unsigned n, unsigned t) { return 12.5 * n + t; });
  std::stringstream ss;
  write_csv(ss, rows);
  CHECK(ss.str().starts_with("phase,attr_count,trial,elapsed_us\nkeygen,1,1,13.500\n"));
  CHECK(read_csv(ss) == rows);

  std::stringstream bad_header("a,b\n");
  CHECK_THROWS_AS(read_csv(bad_header), Error);
  std::stringstream bad_row("phase,attr_count,trial,elapsed_us\nkeygen,1,x,3\n");
  CHECK_THROWS_AS(read_csv(bad_row), Error);
  std::stringstream bad_phase("phase,attr_count,trial,elapsed_us\nsetup,1,1,3\n");
  CHECK_THROWS_AS(read_csv(bad_phase), Error);
}

TEST_CASE("bench_run shape") {
  SeededEntropy seeded(1);
  CHECK_THROWS_AS(bench_run({}, seeded), Error);
  SystemEntropy entropy;
  CHECK_THROWS_AS(bench_run({1, 5}, entropy), Error);
  CHECK_THROWS_AS(bench_run({3, 4}, entropy), Error);

  BenchOptions opts{3, 5, 256, {}};
  std::vector<unsigned> seen;
  opts.progress = [&](unsigned n) { seen.push_back(n); };
  const auto rows = bench_run(opts, entropy);
  CHECK(rows.size() == 3 * 3 * 5);
  CHECK(seen == std::vector<unsigned>{0, 1, 2, 3, 4, 5});
  CHECK(std::is_sorted(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.phase, a.attr_count, a.trial) < std::tie(b.phase, b.attr_count, b.trial);
  }));
  for (const auto& r : rows) {
    CHECK(r.elapsed_us > 0);
    CHECK(r.trial >= 1);
    CHECK(r.trial <= 5);
  }
}
