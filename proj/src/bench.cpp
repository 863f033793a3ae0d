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

#include "abehg/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "abehg/cpabe.hpp"
#include "abehg/envelope.hpp"
#include "abehg/error.hpp"

namespace abehg::bench {

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

std::string attr_name(unsigned i) { return "attr:" + std::to_string(i); }

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::keygen: return "keygen";
    case Phase::encrypt: return "encrypt";
    case Phase::decrypt: return "decrypt";
  }
  return "unknown";
}

Phase parse_phase(std::string_view name) {
  for (auto p : {Phase::keygen, Phase::encrypt, Phase::decrypt}) {
    if (to_string(p) == name) return p;
  }
  throw Error(Errc::parse, "unknown bench phase '" + std::string(name) + "'");
}

std::vector<BenchRow> bench_run(const BenchOptions& options, Entropy& entropy) {
  require_production_entropy(entropy);
  if (options.max_attrs < 2 || options.trials < 5) {
    throw Error(Errc::domain, "bench needs at least 2 attribute counts and 5 trials");
  }
  const auto keys = cpabe::setup(entropy);
  const auto& pk = keys.public_key;
  Bytes payload(options.payload_bytes);
  entropy.fill(payload);
  const envelope::Meta meta{"application/octet-stream", 0, "bench"};

  struct Workload {
    policy::AttributeSet attrs;
    policy::AccessTree tree;
  };
  std::vector<Workload> workloads;
  for (unsigned n = 1; n <= options.max_attrs; ++n) {
    policy::AttributeSet attrs;
    std::string policy_text;
    for (unsigned i = 1; i <= n; ++i) {
      attrs.insert(policy::Attribute::normalize(attr_name(i)));
      policy_text += attr_name(i) + " ";
    }
    if (n > 1) policy_text += std::to_string(n) + "of" + std::to_string(n);
    workloads.push_back({std::move(attrs), policy::parse_postfix(policy_text)});
  }

  // Attribute counts are interleaved within each round so slow periods on a
  // shared machine spread over all counts instead of inflating one. Round 0
  // warms caches and is dropped.
  std::vector<BenchRow> rows;
  rows.reserve(std::size_t{3} * options.max_attrs * options.trials);
  for (unsigned trial = 0; trial <= options.trials; ++trial) {
    if (options.progress) options.progress(trial);
    for (unsigned n = 1; n <= options.max_attrs; ++n) {
      const auto& w = workloads[n - 1];
      auto start = Clock::now();
      const auto sk = cpabe::keygen(pk, keys.master_key, w.attrs, entropy);
      const double t_keygen = micros_since(start);

      start = Clock::now();
      const auto env = envelope::seal(pk, w.tree, payload, meta, entropy);
      const double t_encrypt = micros_since(start);

      start = Clock::now();
      const auto opened = envelope::open(pk, sk, env);
      const double t_decrypt = micros_since(start);
      if (opened != payload) throw Error(Errc::io, "bench round trip mismatch");

      if (trial == 0) continue;
      rows.push_back({Phase::keygen, n, trial, t_keygen});
      rows.push_back({Phase::encrypt, n, trial, t_encrypt});
      rows.push_back({Phase::decrypt, n, trial, t_decrypt});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.phase, a.attr_count, a.trial) < std::tie(b.phase, b.attr_count, b.trial);
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kCsvHeader << '\n';
  char buf[64];
  for (const auto& r : rows) {
    const auto res = std::to_chars(buf, buf + sizeof buf, r.elapsed_us, std::chars_format::fixed, 3);
    out << to_string(r.phase) << ',' << r.attr_count << ',' << r.trial << ','
        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
}

std::vector<BenchRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(Errc::parse, "bench CSV must start with '" + std::string(kCsvHeader) + "'");
  }
  std::vector<BenchRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t comma; (comma = rest.find(',')) != std::string_view::npos; rest.remove_prefix(comma + 1)) {
      f.push_back(rest.substr(0, comma));
    }
    f.push_back(rest);
    const auto bad = [&] { return Error(Errc::parse, "bad bench CSV row at line " + std::to_string(line_no)); };
    if (f.size() != 4) throw bad();
    BenchRow r;
    r.phase = parse_phase(f[0]);
    const auto num = [&](std::string_view s, auto& v) {
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) throw bad();
    };
    num(f[1], r.attr_count);
    num(f[2], r.trial);
    num(f[3], r.elapsed_us);
    if (!(r.elapsed_us > 0) || r.attr_count == 0) throw bad();
    rows.push_back(r);
  }
  return rows;
}

std::vector<TrendFit> fit_linear(const std::vector<BenchRow>& rows) {
  std::map<Phase, std::map<unsigned, std::vector<double>>> grouped;
  for (const auto& r : rows) grouped[r.phase][r.attr_count].push_back(r.elapsed_us);

  std::vector<TrendFit> fits;
  for (const auto& [phase, by_count] : grouped) {
    if (by_count.size() < 2) {
      throw Error(Errc::domain, "fitting " + std::string(to_string(phase)) + " needs at least two attribute counts");
    }
    TrendFit fit;
    fit.phase = phase;
    for (const auto& [count, samples] : by_count) {
      double sum = 0;
      for (double s : samples) sum += s;
      fit.attr_counts.push_back(count);
      fit.means.push_back(sum / static_cast<double>(samples.size()));
      fit.medians.push_back(median(samples));
    }
    const auto n = static_cast<double>(fit.means.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < fit.means.size(); ++i) {
      mx += fit.attr_counts[i];
      my += fit.means[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < fit.means.size(); ++i) {
      const double dx = fit.attr_counts[i] - mx, dy = fit.means[i] - my;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < fit.means.size(); ++i) {
      const double e = fit.means[i] - (fit.intercept + fit.slope * fit.attr_counts[i]);
      ss_res += e * e;
    }
    // A flat series is fitted exactly by slope 0.
    fit.r_squared = syy == 0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    fits.push_back(std::move(fit));
  }
  return fits;
}

bool strictly_increasing(const std::vector<double>& values) {
  return std::adjacent_find(values.begin(), values.end(),
                            [](double a, double b) { return !(a < b); }) == values.end();
}

}  // namespace abehg::bench
