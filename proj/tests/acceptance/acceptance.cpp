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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "abehg/authz.hpp"
#include "abehg/bench.hpp"
#include "abehg/codec.hpp"
#include "abehg/cpabe.hpp"
#include "abehg/demo.hpp"
#include "abehg/envelope.hpp"
#include "abehg/error.hpp"
#include "abehg/resource.hpp"
#include "abehg/service.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace abehg;
using nlohmann::json;
using policy::AttributeSet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Failure with a reason; the first one recorded wins.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  Outcome done(std::string detail) const {
    return failure_.empty() ? Outcome{true, std::move(detail)} : Outcome{false, failure_};
  }

 private:
  std::string failure_;
};

std::optional<Errc> error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f s", s);
  return buf;
}

AttributeSet merged(const AttributeSet& a, const AttributeSet& b) {
  AttributeSet out = a;
  for (const auto& x : b) out.insert(x);
  return out;
}

const policy::AccessTree& tree_t() {
  static const auto tree = policy::parse_postfix(testing::kPolicyT);
  return tree;
}

Outcome attribute_table() {
  Check check;
  SystemEntropy entropy;
  const auto keys = cpabe::setup(entropy);
  const auto record = as_bytes("radiology report 0001");
  const auto env = envelope::seal(keys.public_key, tree_t(), record, {"text/plain", 0, "owner"}, entropy);
  std::string outcomes;
  for (std::size_t row = 0; row < testing::kUserTable.size(); ++row) {
    const auto attrs = testing::row_attrs(row);
    const bool expected = testing::kUserTable[row].satisfies;
    const bool evaluated = policy::satisfies(tree_t(), attrs);
    const auto sk = cpabe::keygen(keys.public_key, keys.master_key, attrs, entropy);
    bool opened = false;
    const auto err = error_of([&] { opened = envelope::open(keys.public_key, sk, env) == Bytes(record.begin(), record.end()); });
    const auto tag = "row " + std::to_string(row + 1);
    check.expect(evaluated == expected, tag + ": satisfies() disagrees with the table");
    check.expect(opened == expected, tag + ": open outcome disagrees with the table");
    if (!expected) check.expect(err == Errc::policy_not_satisfied, tag + ": refusal is not policy_not_satisfied");
    outcomes += opened ? "Y" : "N";
  }
  return check.done("outcomes " + outcomes);
}

Outcome parse_fidelity() {
  const auto postfix = policy::parse_postfix(testing::kPolicyT);
  const auto infix = policy::parse_infix(testing::kPolicyTBoolean);
  Check check;
  check.expect(postfix == infix, "postfix and boolean forms differ: " + policy::serialize_policy(postfix) +
                                     " vs " + policy::serialize_policy(infix));
  return check.done(policy::serialize_policy(postfix));
}

Outcome cpabe_properties() {
  Check check;
  SystemEntropy entropy;
  const auto keys = cpabe::setup(entropy);
  testing::TreeGenerator gen(0xA11CE, 8);
  int good = 0, bad = 0, draws = 0;
  while ((good < 100 || bad < 100) && draws < 100000) {
    ++draws;
    const auto tree = gen.tree(12);
    auto attrs = gen.attrs(0.5);
    if (attrs.empty()) continue;
    const bool oracle = testing::brute_force_satisfies(tree, attrs);
    check.expect(policy::satisfies(tree, attrs) == oracle, "satisfies() disagrees with the gate-subset oracle");
    if (oracle ? good >= 100 : bad >= 100) continue;

    const auto sk = cpabe::keygen(keys.public_key, keys.master_key, attrs, entropy);
    const auto m = math::GTElement::random(entropy);
    const auto ct = cpabe::encrypt_element(keys.public_key, m, tree, entropy);
    if (oracle) {
      ++good;
      bool same = false;
      const auto err = error_of([&] { same = cpabe::decrypt_element(keys.public_key, sk, ct) == m; });
      check.expect(!err && same, "satisfying fixture did not round-trip: " + policy::serialize_policy(tree));
    } else {
      ++bad;
      const auto err = error_of([&] { cpabe::decrypt_element(keys.public_key, sk, ct); });
      check.expect(err == Errc::policy_not_satisfied, "non-satisfying fixture was not refused: " +
                                                          policy::serialize_policy(tree));
    }
  }
  check.expect(good == 100 && bad == 100, "generator did not yield 100 fixtures of each kind");
  return check.done(std::to_string(good) + " round trips, " + std::to_string(bad) + " refusals");
}

Outcome collusion() {
  Check check;
  SystemEntropy entropy;
  const auto keys = cpabe::setup(entropy);
  // Minimal satisfying sets of T.
  const std::vector<std::vector<std::string>> covers = {
      {"Position: Doctor", "Department: Radiology", "University: AMU"},
      {"Position: Researcher", "Department: Radiology", "University: AMU"},
      {"Position: Professor", "Department: Radiology", "University: AMU"},
      {"Position: PhD", "University: AMU"},
      {"Position: Postdoc", "University: AMU"},
  };
  const std::vector<std::string> distractors = {"City: Aligarh", "College: JNMC", "Status: Temporary",
                                                "Year: 2022", "Position: Student"};
  std::mt19937_64 rng(0xC0111DE);
  int fixtures = 0, successes = 0;
  while (fixtures < 20) {
    const auto& cover = covers[rng() % covers.size()];
    const auto mask = 1 + rng() % ((1u << cover.size()) - 2);  // nonempty proper subset for A
    AttributeSet a, b;
    for (std::size_t i = 0; i < cover.size(); ++i) {
      ((mask >> i) & 1 ? a : b).insert(policy::Attribute::normalize(cover[i]));
    }
    for (const auto& d : distractors) {
      if (rng() % 2) a.insert(policy::Attribute::normalize(d));
      if (rng() % 2) b.insert(policy::Attribute::normalize(d));
    }
    if (testing::brute_force_satisfies(tree_t(), a) || testing::brute_force_satisfies(tree_t(), b) ||
        !testing::brute_force_satisfies(tree_t(), merged(a, b))) {
      check.expect(false, "collusion fixture violates its preconditions");
      continue;
    }
    ++fixtures;
    const auto ka = cpabe::keygen(keys.public_key, keys.master_key, a, entropy);
    const auto kb = cpabe::keygen(keys.public_key, keys.master_key, b, entropy);
    const auto m = math::GTElement::random(entropy);
    const auto ct = cpabe::encrypt_element(keys.public_key, m, tree_t(), entropy);

    // Naive merges: every component of both keys, under each key's d.
    std::vector<cpabe::PrivateKey> attempts = {ka, kb};
    for (const auto* base : {&ka, &kb}) {
      cpabe::PrivateKey mix = *base;
      mix.attrs = merged(a, b);
      mix.components.clear();
      for (const auto& attr : mix.attrs) {
        for (const auto* src : {&ka, &kb}) {
          const auto it = std::find_if(src->components.begin(), src->components.end(),
                                       [&](const auto& c) { return c.attribute == attr; });
          if (it != src->components.end()) {
            mix.components.push_back(*it);
            break;
          }
        }
      }
      attempts.push_back(std::move(mix));
    }
    for (const auto& key : attempts) {
      bool recovered = false;
      (void)error_of([&] { recovered = cpabe::decrypt_element(keys.public_key, key, ct) == m; });
      if (recovered) ++successes;
    }
  }
  check.expect(successes == 0, std::to_string(successes) + " colluding decryptions recovered the message");
  return check.done(std::to_string(fixtures) + " fixtures, 4 attempts each, 0 recoveries");
}

// Rewrites one byte of a base64url field.
void flip_b64(json& field, std::mt19937_64& rng) {
  auto bytes = base64url_decode(field.get<std::string>());
  bytes[rng() % bytes.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
  field = base64url_encode(bytes);
}

Outcome envelope_integrity() {
  Check check;
  SystemEntropy entropy;
  const auto keys = cpabe::setup(entropy);
  const auto sk = cpabe::keygen(keys.public_key, keys.master_key, AttributeSet::parse_list(testing::kS0), entropy);
  std::mt19937_64 rng(0x7A3BE5);
  const char* regions[] = {"header", "nonce", "body", "policy text"};
  int rejected = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Bytes record(64 + rng() % 512);
    entropy.fill(record);
    auto doc = json::parse(envelope::serialize_envelope(
        envelope::seal(keys.public_key, tree_t(), record, {"text/plain", trial, "owner"}, entropy)));
    switch (trial % 4) {
      case 0: {
        auto& header = doc["header"];
        const auto n = header["leaves"].size();
        const auto pick = rng() % (2 + 2 * n);
        if (pick == 0) flip_b64(header["c_tilde"], rng);
        else if (pick == 1) flip_b64(header["c"], rng);
        else flip_b64(header["leaves"][(pick - 2) / 2][(pick % 2) ? "cp" : "c"], rng);
        break;
      }
      case 1: flip_b64(doc["nonce"], rng); break;
      case 2: flip_b64(doc["body"], rng); break;
      case 3: {
        // Swap one letter for a different letter, so the text changes after normalization.
        auto text = doc["header"]["policy"].get<std::string>();
        std::size_t pos;
        do pos = rng() % text.size(); while (text[pos] < 'a' || text[pos] > 'z');
        text[pos] = static_cast<char>('a' + (text[pos] - 'a' + 1 + rng() % 25) % 26);
        doc["header"]["policy"] = text;
        break;
      }
    }
    bool opened = false;
    const auto err = error_of([&] {
      const auto env = envelope::deserialize_envelope(doc.dump());
      opened = !envelope::open(keys.public_key, sk, env).empty();
    });
    if (err && !opened) ++rejected;
    check.expect(err.has_value(), std::string("tampered ") + regions[trial % 4] + " opened in trial " +
                                      std::to_string(trial));
  }
  int intact = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Bytes record(1 + rng() % 4096);
    entropy.fill(record);
    const auto text = envelope::serialize_envelope(
        envelope::seal(keys.public_key, tree_t(), record, {"text/plain", trial, "owner"}, entropy));
    bool same = false;
    const auto err = error_of([&] {
      same = envelope::open(keys.public_key, sk, envelope::deserialize_envelope(text)) == record;
    });
    if (!err && same) ++intact;
  }
  check.expect(intact == 50, std::to_string(50 - intact) + " untampered envelopes failed to open");
  return check.done(std::to_string(rejected) + "/100 tampers rejected, " + std::to_string(intact) +
                    "/50 round trips");
}

Outcome oauth_lifecycle() {
  Check check;
  SystemEntropy entropy;
  authz::ManualClock clock(1'800'000'000);
  authz::AuthorizationServer as({3600, 86400, "svc-secret", 1000}, clock, entropy);
  const auto keys = cpabe::setup(entropy);
  resource::MemoryBackend storage;
  resource::LocalTokenValidator validator(as);
  resource::ResourceServer rs(validator, keys.public_key, keys.master_key, storage, clock, entropy);

  const auto creds = as.register_client(authz::Role::user, AttributeSet::parse_list(testing::kS0));
  const auto tok = as.issue_token(creds.client_id, creds.client_secret, {});
  auto info = as.introspect("svc-secret", tok.token);
  check.expect(info.active && info.client_id == creds.client_id, "fresh token is not active");
  check.expect(info.expires_at == clock.now() + 3600, "expiry is not issue time plus lifetime");

  clock.set(info.expires_at - 1);
  check.expect(as.introspect_trusted(tok.token).active, "token inactive one second before expiry");
  clock.set(info.expires_at);
  check.expect(!as.introspect_trusted(tok.token).active, "token still active at expiry");

  const auto rotated = as.refresh(tok.refresh_token);
  check.expect(rotated.token != tok.token && rotated.refresh_token != tok.refresh_token,
               "refresh did not mint a new pair");
  check.expect(as.introspect_trusted(rotated.token).active, "rotated token is not active");
  check.expect(!as.introspect_trusted(tok.token).active, "old token active after rotation");
  check.expect(error_of([&] { as.refresh(tok.refresh_token); }) == Errc::invalid_grant,
               "refresh token accepted twice");

  check.expect(error_of([&] { rs.issue_private_key(rotated.refresh_token); }) == Errc::unauthorized,
               "refresh token accepted as bearer");
  check.expect(!as.introspect_trusted(rotated.refresh_token).active, "refresh token introspects active");

  check.expect(error_of([&] { as.issue_token(creds.client_id, "wrong-secret", {}); }) == Errc::unauthorized,
               "wrong client secret accepted");
  check.expect(error_of([&] { as.introspect("wrong-secret", rotated.token); }) == Errc::unauthorized,
               "wrong service secret accepted");
  return check.done("active, expiry boundary, rotation, bearer misuse and bad secrets as expected");
}

Outcome protocol_replay() {
  namespace fs = std::filesystem;
  Check check;
  const auto dir = fs::temp_directory_path() / ("abehg-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  SystemEntropy entropy;
  {
    const auto keys = cpabe::setup(entropy);
    std::ofstream(dir / "a.gpk") << cpabe::serialize_artifact(keys.public_key);
    std::ofstream(dir / "a.msk") << cpabe::serialize_artifact(keys.master_key);
  }
  config::ServiceConfig cfg;
  cfg.port = 0;
  cfg.public_key = dir / "a.gpk";
  cfg.master_key = dir / "a.msk";
  cfg.storage_dir = dir / "records";
  cfg.service_secret = "acceptance-secret";
  authz::SystemClock clock;
  service::Service svc(service::Mode::all, cfg, entropy, clock);
  svc.start();

  demo::DemoOptions opts;
  opts.authz_url = opts.resource_url = svc.base_url();
  std::ostringstream log;
  const auto s0 = demo::run_demo(opts, entropy, log);
  check.expect(s0.success, "S0 demo failed at " + s0.failed_step);
  check.expect(s0.recovered == demo::sample_record(), "S0 plaintext is not byte-identical");

  opts.user_attrs = AttributeSet::parse_list(testing::kS1);
  const auto s1 = demo::run_demo(opts, entropy, log);
  bool fetched = false;
  for (const auto& step : s1.steps) fetched |= step.step == "DU-7" && step.ok;
  check.expect(!s1.success && s1.failed_step == "DU-8" && s1.error == Errc::policy_not_satisfied,
               "S1 did not stop at DU-8 with policy_not_satisfied");
  check.expect(fetched, "S1 did not reach the record");
  check.expect(s1.recovered.empty(), "S1 recovered plaintext");
  svc.stop();
  fs::remove_all(dir);
  return check.done("S0 recovered " + std::to_string(s0.recovered.size()) + " bytes; S1 refused at DU-8");
}

Outcome performance_trend() {
  Check check;
  SystemEntropy entropy;
  const auto rows = bench::bench_run({10, 20, 1024, {}}, entropy);
  std::string detail;
  for (const auto& fit : bench::fit_linear(rows)) {
    const auto name = std::string(bench::to_string(fit.phase));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s r2=%.3f ", name.c_str(), fit.r_squared);
    detail += buf;
    if (fit.phase == bench::Phase::encrypt) {
      check.expect(fit.r_squared >= 0.85, "encrypt fit r2 below 0.85");
    } else {
      check.expect(bench::strictly_increasing(fit.means), name + " means are not strictly increasing");
      check.expect(fit.r_squared >= 0.90, name + " fit r2 below 0.90");
    }
  }
  if (!detail.empty()) detail.pop_back();
  return check.done(detail);
}

struct Criterion {
  const char* name;
  double budget_s;
  Outcome (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"attribute table outcomes", 30, attribute_table},
      {"policy parse fidelity", 5, parse_fidelity},
      {"cpabe correctness", 300, cpabe_properties},
      {"collusion resistance", 60, collusion},
      {"envelope integrity", 60, envelope_integrity},
      {"oauth lifecycle", 60, oauth_lifecycle},
      {"end-to-end protocol replay", 60, protocol_replay},
      {"performance trend", 600, performance_trend},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.pass && elapsed > c.budget_s) {
      out = {false, "over time budget of " + seconds(c.budget_s)};
    }
    failures += !out.pass;
    std::printf("[%s] %d %s (%s): %s\n", out.pass ? "PASS" : "FAIL", index, c.name, seconds(elapsed).c_str(),
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
