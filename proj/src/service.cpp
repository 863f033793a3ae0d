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

#include "abehg/service.hpp"

#include <sys/socket.h>

#include <fstream>
#include <httplib.h>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace abehg::service {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path, const char* what) {
  if (path.empty()) throw MissingKeyMaterial(std::string(what) + " path is not configured");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingKeyMaterial(std::string("cannot read ") + what + " at " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_header("Cache-Control", "no-store");
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, Errc code, std::string_view detail) {
  const int status = http_status(code);
  if (status == 401) res.set_header("WWW-Authenticate", "Bearer");
  // Internal failures keep their detail out of the response.
  const std::string description = status == 500 ? "internal error" : std::string(detail);
  send_json(res, status,
            {{"error", status == 500 ? "internal_error" : std::string(errc_name(code))},
             {"error_description", description}});
}

// Runs a handler and converts exceptions into JSON error responses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const json::exception& e) {
      send_error(res, Errc::bad_request, "invalid JSON request");
    } catch (const std::exception& e) {
      send_error(res, Errc::io, e.what());
    }
  };
}

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view scheme = "bearer ";
  if (header.size() <= scheme.size()) return {};
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(header[i])) != scheme[i]) return {};
  }
  auto token = header.substr(scheme.size());
  while (!token.empty() && token.front() == ' ') token.erase(token.begin());
  return token;
}

// Accepts JSON bodies and, for OAuth endpoints, form-encoded ones.
json request_fields(const httplib::Request& req) {
  const auto type = req.get_header_value("Content-Type");
  if (type.starts_with("application/x-www-form-urlencoded")) {
    httplib::Params params;
    httplib::detail::parse_query_text(req.body, params);
    json j = json::object();
    for (const auto& [k, v] : params) j[k] = v;
    return j;
  }
  if (req.body.empty()) return json::object();
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::bad_request, "body must be a JSON object");
  return j;
}

std::string opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  if (!j.at(key).is_string()) throw Error(Errc::bad_request, std::string("'") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

json token_json(const authz::AccessToken& tok) {
  return {{"access_token", tok.token},
          {"token_type", "Bearer"},
          {"expires_in", tok.expires_in},
          {"refresh_token", tok.refresh_token},
          {"scope", authz::format_scope(tok.scope)}};
}

json info_json(const authz::TokenInfo& info) {
  if (!info.active) return {{"active", false}};
  return {{"active", true},
          {"client_id", info.client_id},
          {"scope", authz::format_scope(info.scope)},
          {"exp", info.expires_at},
          {"role", authz::to_string(info.role)},
          {"attributes", info.attributes.to_strings()}};
}

authz::TokenInfo info_from_json(const json& j) {
  authz::TokenInfo info;
  if (!j.is_object() || !j.value("active", false)) return info;
  info.active = true;
  info.client_id = j.at("client_id").get<std::string>();
  info.scope = authz::parse_scope(j.at("scope").get<std::string>());
  info.expires_at = j.at("exp").get<std::int64_t>();
  info.role = authz::parse_role(j.at("role").get<std::string>());
  info.attributes = policy::AttributeSet::from_strings(j.at("attributes").get<std::vector<std::string>>());
  return info;
}

// PUT bodies are either a bare envelope or {"envelope": <string|object>, "policy": "..."}.
struct RecordUpload {
  std::string envelope;
  std::optional<std::string> policy;
};

RecordUpload parse_upload(const std::string& body) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::bad_request, "body must be a JSON object");
  if (j.value("type", "") == "ehr.envelope") return {body, std::nullopt};
  if (!j.contains("envelope")) throw Error(Errc::bad_request, "missing 'envelope'");
  RecordUpload up;
  const auto& env = j.at("envelope");
  up.envelope = env.is_string() ? env.get<std::string>() : env.dump();
  if (j.contains("policy")) up.policy = opt_string(j, "policy");
  return up;
}

json summary_json(const resource::RecordSummary& s) {
  return {{"record_id", s.record_id},
          {"owner_client_id", s.owner_client_id},
          {"policy", s.policy_text},
          {"meta",
           {{"content_type", s.meta.content_type},
            {"created_at", s.meta.created_at},
            {"owner_id", s.meta.owner_id}}},
          {"created_at", s.created_at},
          {"updated_at", s.updated_at}};
}

void install_authz_routes(httplib::Server& svr, authz::AuthorizationServer& as) {
  svr.Post("/oauth/register", guarded([&as](const httplib::Request& req, httplib::Response& res) {
    const auto body = request_fields(req);
    const auto role = authz::parse_role(opt_string(body, "role"));
    policy::AttributeSet attrs;
    if (body.contains("attributes")) {
      const auto& a = body.at("attributes");
      if (a.is_string()) {
        attrs = policy::AttributeSet::parse_list(a.get<std::string>());
      } else if (a.is_array()) {
        attrs = policy::AttributeSet::from_strings(a.get<std::vector<std::string>>());
      } else {
        throw Error(Errc::bad_request, "'attributes' must be a list of strings");
      }
    }
    std::optional<std::string> external;
    if (auto ext = opt_string(body, "external_id"); !ext.empty()) external = std::move(ext);
    const auto creds = as.register_client(role, attrs, external);
    send_json(res, 201, {{"client_id", creds.client_id}, {"client_secret", creds.client_secret}});
  }));

  svr.Post("/oauth/token", guarded([&as](const httplib::Request& req, httplib::Response& res) {
    const auto body = request_fields(req);
    const auto grant = opt_string(body, "grant_type");
    if (grant == "client_credentials") {
      const auto tok = as.issue_token(opt_string(body, "client_id"), opt_string(body, "client_secret"),
                                      authz::parse_scope(opt_string(body, "scope")));
      send_json(res, 200, token_json(tok));
    } else if (grant == "refresh_token") {
      send_json(res, 200, token_json(as.refresh(opt_string(body, "refresh_token"))));
    } else {
      send_json(res, 400, {{"error", "unsupported_grant_type"}});
    }
  }));

  svr.Post("/oauth/introspect", guarded([&as](const httplib::Request& req, httplib::Response& res) {
    const auto body = request_fields(req);
    send_json(res, 200, info_json(as.introspect(bearer_token(req), opt_string(body, "token"))));
  }));

  svr.Post("/oauth/revoke", guarded([&as](const httplib::Request& req, httplib::Response& res) {
    as.revoke(opt_string(request_fields(req), "token"));
    send_json(res, 200, json::object());
  }));
}

void install_resource_routes(httplib::Server& svr, resource::ResourceServer& rs) {
  svr.Get("/aa/public-key", guarded([&rs](const httplib::Request&, httplib::Response& res) {
    res.set_content(cpabe::serialize_artifact(rs.public_key()), "application/json");
  }));

  svr.Post("/aa/keys", guarded([&rs](const httplib::Request& req, httplib::Response& res) {
    const auto body = request_fields(req);
    const auto key = rs.issue_private_key(bearer_token(req), opt_string(body, "client_id"));
    send_json(res, 200, {{"private_key", json::parse(key)}});
  }));

  svr.Put("/records", guarded([&rs](const httplib::Request& req, httplib::Response& res) {
    const auto up = parse_upload(req.body);
    const auto id = up.policy ? rs.put_record(bearer_token(req), up.envelope, *up.policy)
                              : rs.put_record(bearer_token(req), up.envelope);
    send_json(res, 201, {{"record_id", id}});
  }));

  svr.Get("/records", guarded([&rs](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string_view> owner;
    const auto owner_param = req.get_param_value("owner");
    if (req.has_param("owner")) owner = owner_param;
    json list = json::array();
    for (const auto& s : rs.list_records(bearer_token(req), owner)) list.push_back(summary_json(s));
    send_json(res, 200, {{"records", list}});
  }));

  svr.Get(R"(/records/([A-Za-z0-9_-]+))", guarded([&rs](const httplib::Request& req, httplib::Response& res) {
    res.set_content(rs.get_record(bearer_token(req), req.matches[1].str()), "application/json");
  }));

  svr.Put(R"(/records/([A-Za-z0-9_-]+))", guarded([&rs](const httplib::Request& req, httplib::Response& res) {
    const auto up = parse_upload(req.body);
    if (up.policy) {
      rs.update_record(bearer_token(req), req.matches[1].str(), up.envelope, *up.policy);
    } else {
      rs.update_record(bearer_token(req), req.matches[1].str(), up.envelope);
    }
    send_json(res, 200, json::object());
  }));

  svr.Delete(R"(/records/([A-Za-z0-9_-]+))", guarded([&rs](const httplib::Request& req, httplib::Response& res) {
    rs.delete_record(bearer_token(req), req.matches[1].str());
    send_json(res, 200, json::object());
  }));
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::authz: return "authz";
    case Mode::resource: return "resource";
    case Mode::all: return "all";
  }
  return "unknown";
}

int http_status(Errc code) {
  switch (code) {
    case Errc::unauthorized: return 401;
    case Errc::forbidden: return 403;
    case Errc::not_found: return 404;
    case Errc::conflict: return 409;
    case Errc::parse:
    case Errc::domain:
    case Errc::malformed:
    case Errc::version_mismatch:
    case Errc::group_mismatch:
    case Errc::oversize:
    case Errc::invalid_scope:
    case Errc::invalid_grant:
    case Errc::bad_request:
      return 400;
    default:
      return 500;
  }
}

HttpTokenValidator::HttpTokenValidator(std::string authz_url, std::string service_secret)
    : url_(std::move(authz_url)), secret_(std::move(service_secret)) {}

authz::TokenInfo HttpTokenValidator::validate(std::string_view bearer) {
  httplib::Client cli(url_);
  cli.set_connection_timeout(5);
  cli.set_read_timeout(10);
  cli.set_bearer_token_auth(secret_);
  const auto res = cli.Post("/oauth/introspect", json{{"token", bearer}}.dump(), "application/json");
  if (!res) throw Error(Errc::io, "introspection request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw Error(Errc::io, "introspection refused with status " + std::to_string(res->status));
  }
  try {
    return info_from_json(json::parse(res->body));
  } catch (const json::exception&) {
    throw Error(Errc::io, "malformed introspection response");
  }
}

struct Service::Impl {
  Impl(Mode m, config::ServiceConfig c, Entropy& e, const authz::Clock& k)
      : mode(m), cfg(std::move(c)), entropy(e), clock(k) {}

  Mode mode;
  config::ServiceConfig cfg;
  Entropy& entropy;
  const authz::Clock& clock;

  std::unique_ptr<authz::AuthorizationServer> as;
  std::unique_ptr<resource::TokenValidator> validator;
  std::unique_ptr<resource::StorageBackend> storage;
  std::unique_ptr<resource::ResourceServer> rs;

  httplib::Server svr;
  int port = -1;
  std::thread worker;
};

Service::Service(Mode mode, config::ServiceConfig cfg, Entropy& entropy, const authz::Clock& clock)
    : impl_(std::make_unique<Impl>(mode, std::move(cfg), entropy, clock)) {
  require_production_entropy(entropy);
  auto& im = *impl_;

  if (mode != Mode::resource) {
    if (mode == Mode::authz && im.cfg.service_secret.empty()) {
      throw Error(Errc::config, "serve-authz needs service_secret for resource servers to introspect");
    }
    im.as = std::make_unique<authz::AuthorizationServer>(
        authz::AuthzConfig{im.cfg.token_lifetime, im.cfg.refresh_lifetime, im.cfg.service_secret,
                           im.cfg.pbkdf2_iterations},
        clock, entropy);
  }
  if (mode != Mode::authz) {
    if (mode == Mode::resource) {
      if (im.cfg.authz_url.empty() || im.cfg.service_secret.empty()) {
        throw Error(Errc::config, "serve-resource needs authz_url and service_secret");
      }
      im.validator = std::make_unique<HttpTokenValidator>(im.cfg.authz_url, im.cfg.service_secret);
    } else {
      im.validator = std::make_unique<resource::LocalTokenValidator>(*im.as);
    }
    const auto pk = cpabe::deserialize_public_key(read_file(im.cfg.public_key, "public key"));
    const auto msk = cpabe::deserialize_master_key(read_file(im.cfg.master_key, "master key"));
    if (im.cfg.storage_dir.empty()) {
      im.storage = std::make_unique<resource::MemoryBackend>();
    } else {
      im.storage = std::make_unique<resource::DirectoryBackend>(im.cfg.storage_dir);
    }
    // Envelope JSON is about 4/3 of the record plus the header.
    resource::ResourceConfig rc{im.cfg.max_record_bytes / 3 * 4 + (std::size_t{1} << 20)};
    im.rs = std::make_unique<resource::ResourceServer>(*im.validator, pk, msk, *im.storage, clock,
                                                       entropy, rc);
  }

  // Exclusive binding so a second instance on the same port fails loudly.
  im.svr.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  im.svr.set_payload_max_length(im.cfg.max_record_bytes / 3 * 4 + (std::size_t{2} << 20));
  const int threads = im.cfg.threads;
  im.svr.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };

  im.svr.Get("/healthz", [mode](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}, {"mode", to_string(mode)}});
  });
  if (im.as) install_authz_routes(im.svr, *im.as);
  if (im.rs) install_resource_routes(im.svr, *im.rs);
}

Service::~Service() {
  stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

int Service::bind() {
  auto& im = *impl_;
  if (im.port >= 0) return im.port;
  if (im.cfg.port == 0) {
    im.port = im.svr.bind_to_any_port(im.cfg.host);
  } else if (im.svr.bind_to_port(im.cfg.host, im.cfg.port)) {
    im.port = im.cfg.port;
  }
  if (im.port <= 0) {
    im.port = -1;
    throw StartupError("cannot listen on " + im.cfg.host + ":" + std::to_string(im.cfg.port));
  }
  return im.port;
}

void Service::run() {
  bind();
  impl_->svr.listen_after_bind();
}

void Service::start() {
  bind();
  impl_->worker = std::thread([this] { impl_->svr.listen_after_bind(); });
  impl_->svr.wait_until_ready();
}

void Service::stop() { impl_->svr.stop(); }

int Service::port() const { return impl_->port; }

std::string Service::base_url() const {
  const auto& host = impl_->cfg.host == "0.0.0.0" ? std::string("127.0.0.1") : impl_->cfg.host;
  return "http://" + host + ":" + std::to_string(impl_->port);
}

authz::AuthorizationServer* Service::authorization_server() { return impl_->as.get(); }
resource::ResourceServer* Service::resource_server() { return impl_->rs.get(); }

}  // namespace abehg::service
