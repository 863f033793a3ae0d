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

#include "abehg/demo.hpp"

#include <httplib.h>

#include <json.hpp>

#include "abehg/authz.hpp"
#include "abehg/cpabe.hpp"
#include "abehg/envelope.hpp"

namespace abehg::demo {

namespace {

using nlohmann::json;

// Thin JSON-over-HTTP client; non-2xx answers become Errors carrying the
// server's error code.
class Api {
 public:
  explicit Api(const std::string& base) : cli_(base) {
    cli_.set_connection_timeout(5);
    cli_.set_read_timeout(60);
    cli_.set_write_timeout(60);
  }

  json post(const std::string& path, const json& body, const std::string& bearer = {}) {
    return json::parse(check(cli_.Post(path, headers(bearer), body.dump(), "application/json")));
  }
  std::string put(const std::string& path, const std::string& body, const std::string& bearer) {
    return check(cli_.Put(path, headers(bearer), body, "application/json"));
  }
  std::string get(const std::string& path, const std::string& bearer = {}) {
    return check(cli_.Get(path, headers(bearer)));
  }

 private:
  static httplib::Headers headers(const std::string& bearer) {
    if (bearer.empty()) return {};
    return {{"Authorization", "Bearer " + bearer}};
  }

  static std::string check(const httplib::Result& res) {
    if (!res) throw Error(Errc::io, "request failed: " + httplib::to_string(res.error()));
    if (res->status >= 200 && res->status < 300) return res->body;
    const auto j = json::parse(res->body, nullptr, false);
    Errc code = Errc::io;
    std::string detail = "HTTP " + std::to_string(res->status);
    if (j.is_object() && j.contains("error") && j["error"].is_string()) {
      code = errc_from_name(j["error"].get<std::string>()).value_or(Errc::io);
      detail += " " + j["error"].get<std::string>();
      if (j.contains("error_description") && j["error_description"].is_string()) {
        detail += ": " + j["error_description"].get<std::string>();
      }
    }
    throw Error(code, detail);
  }

  httplib::Client cli_;
};

class Transcript {
 public:
  Transcript(DemoResult& result, std::ostream& out, bool json_lines)
      : result_(result), out_(out), json_(json_lines) {}

  // Runs one step; false once any step has failed.
  template <typename Fn>
  bool step(const char* label, Fn&& fn) {
    if (!result_.failed_step.empty()) return false;
    StepLog log{label, false, {}};
    try {
      log.detail = fn();
      log.ok = true;
    } catch (const Error& e) {
      log.detail = e.what();
      result_.error = e.code();
    } catch (const std::exception& e) {
      log.detail = e.what();
      result_.error = Errc::io;
    }
    if (!log.ok) result_.failed_step = label;
    emit(log);
    result_.steps.push_back(std::move(log));
    return result_.failed_step.empty();
  }

 private:
  void emit(const StepLog& log) {
    if (json_) {
      json j{{"step", log.step}, {"ok", log.ok}, {"detail", log.detail}};
      if (!log.ok && result_.error) j["error"] = errc_name(*result_.error);
      out_ << j.dump() << '\n';
    } else {
      out_ << '[' << log.step << "] " << (log.ok ? "" : "FAILED: ") << log.detail << '\n';
    }
    out_.flush();
  }

  DemoResult& result_;
  std::ostream& out_;
  bool json_;
};

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
  return out;
}

}  // namespace

int DemoResult::exit_code() const {
  if (success) return 0;
  if (error == Errc::policy_not_satisfied) return 3;
  return 1;
}

Bytes sample_record() {
  constexpr std::string_view text =
      "patient_id: 000-4711\n"
      "study: chest CT, contrast\n"
      "findings: no acute abnormality\n"
      "signed: radiology\n";
  return {text.begin(), text.end()};
}

DemoResult run_demo(const DemoOptions& options, Entropy& entropy, std::ostream& out) {
  DemoResult result;
  Transcript t(result, out, options.json);
  Api authz_api(options.authz_url);
  Api resource_api(options.resource_url);
  const Bytes record = options.record.empty() ? sample_record() : options.record;

  std::string owner_id, owner_token, user_id, user_secret, user_token, record_id;
  std::optional<cpabe::PublicKey> pk;
  std::optional<cpabe::PrivateKey> sk;
  std::string envelope_json;
  std::int64_t expires_in = 0;

  t.step("DO-1", [&] {
    const auto creds = authz_api.post("/oauth/register", {{"role", "owner"}});
    owner_id = creds.at("client_id");
    const auto tok = authz_api.post("/oauth/token", {{"grant_type", "client_credentials"},
                                                     {"client_id", owner_id},
                                                     {"client_secret", creds.at("client_secret")},
                                                     {"scope", "ehr.read ehr.write"}});
    owner_token = tok.at("access_token");
    return "owner registered as " + owner_id + ", scope '" + tok.at("scope").get<std::string>() + "'";
  });

  t.step("DO-2", [&] {
    pk = cpabe::deserialize_public_key(resource_api.get("/aa/public-key"));
    const auto tree = policy::parse_postfix(options.policy_text);
    const envelope::Meta meta{"text/plain", authz::SystemClock().now(), owner_id};
    envelope_json = envelope::serialize_envelope(envelope::seal(*pk, tree, record, meta, entropy));
    return "sealed " + std::to_string(record.size()) + " bytes under " +
           std::to_string(tree.leaf_count()) + "-leaf policy: " + policy::serialize_policy(tree);
  });

  t.step("DO-3", [&] {
    const json body{{"envelope", envelope_json}, {"policy", options.policy_text}};
    record_id = json::parse(resource_api.put("/records", body.dump(), owner_token)).at("record_id");
    return "uploaded record " + record_id;
  });

  t.step("AA", [&] {
    const auto creds = authz_api.post(
        "/oauth/register", {{"role", "user"}, {"attributes", options.user_attrs.to_strings()}});
    user_id = creds.at("client_id");
    user_secret = creds.at("client_secret");
    // Key issuance is authenticated like any other request; the token used
    // here is revoked straight away.
    const auto boot = authz_api.post("/oauth/token", {{"grant_type", "client_credentials"},
                                                      {"client_id", user_id},
                                                      {"client_secret", user_secret},
                                                      {"scope", "ehr.read"}});
    const std::string boot_token = boot.at("access_token");
    const auto key = resource_api.post("/aa/keys", json::object(), boot_token);
    authz_api.post("/oauth/revoke", {{"token", boot_token}});
    sk = cpabe::deserialize_private_key(key.at("private_key").dump());
    return "user " + user_id + " registered; private key over {" + join(sk->attrs.to_strings()) + "}";
  });

  json token_response;
  t.step("DU-5", [&] {
    token_response = authz_api.post("/oauth/token", {{"grant_type", "client_credentials"},
                                                     {"client_id", user_id},
                                                     {"client_secret", user_secret},
                                                     {"scope", "ehr.read"}});
    return "authorization grant (client credentials of " + user_id + ") accepted";
  });

  t.step("DU-6", [&] {
    if (token_response.at("token_type") != "Bearer") throw Error(Errc::malformed, "unexpected token type");
    const auto scope = authz::parse_scope(token_response.at("scope").get<std::string>());
    if (scope != authz::ScopeSet{std::string(authz::kScopeRead)}) {
      throw Error(Errc::invalid_scope, "unexpected token scope");
    }
    user_token = token_response.at("access_token");
    expires_in = token_response.at("expires_in");
    return "access token issued, scope 'ehr.read', expires in " + std::to_string(expires_in) + " s";
  });

  t.step("DU-7", [&] {
    const auto list = json::parse(resource_api.get("/records?owner=" + owner_id, user_token));
    for (const auto& r : list.at("records")) {
      if (r.at("record_id") == record_id) return "located record " + record_id + " (policy carried in its header)";
    }
    throw Error(Errc::not_found, "record " + record_id + " is not listed");
  });

  if (result.failed_step.empty() && options.before_fetch) options.before_fetch(expires_in);

  t.step("DU-8", [&] {
    const auto fetched = resource_api.get("/records/" + record_id, user_token);
    if (fetched != envelope_json) throw Error(Errc::malformed, "fetched envelope differs from upload");
    result.recovered = envelope::open(*pk, *sk, envelope::deserialize_envelope(fetched));
    if (result.recovered != record) throw Error(Errc::malformed, "recovered bytes differ from the record");
    return "fetched and opened record: " + std::to_string(result.recovered.size()) +
           " bytes, identical to the original";
  });

  result.success = result.failed_step.empty();
  return result;
}

}  // namespace abehg::demo
