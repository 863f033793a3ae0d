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

// HTTP/1.1 + JSON front end for the authorization and resource servers.

#include <memory>
#include <string>
#include <string_view>

#include "abehg/authz.hpp"
#include "abehg/config.hpp"
#include "abehg/error.hpp"
#include "abehg/resource.hpp"

namespace abehg::service {

enum class Mode { authz, resource, all };

std::string_view to_string(Mode mode);

/// The public or master key file is absent or unreadable.
class MissingKeyMaterial final : public Error {
 public:
  explicit MissingKeyMaterial(const std::string& what) : Error(Errc::not_found, what) {}
};

/// Listening socket could not be bound.
class StartupError final : public Error {
 public:
  explicit StartupError(const std::string& what) : Error(Errc::io, what) {}
};

/// Introspects over HTTP against a separately hosted authorization server.
class HttpTokenValidator final : public resource::TokenValidator {
 public:
  HttpTokenValidator(std::string authz_url, std::string service_secret);
  authz::TokenInfo validate(std::string_view bearer) override;

 private:
  std::string url_;
  std::string secret_;
};

/// HTTP status for an error code.
int http_status(Errc code);

class Service {
 public:
  /// Loads keys and storage and wires routes. Refuses deterministic entropy.
  Service(Mode mode, config::ServiceConfig cfg, Entropy& entropy, const authz::Clock& clock);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the configured address; returns the port. Throws StartupError.
  int bind();
  /// Serves until stop(). Binds first if needed.
  void run();
  /// bind() plus run() on a background thread.
  void start();
  void stop();

  int port() const;
  std::string base_url() const;

  authz::AuthorizationServer* authorization_server();
  resource::ResourceServer* resource_server();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace abehg::service
