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

// abehg: command-line front end for the CPABE toolkit and the EHR services.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage or configuration error,
// 3 policy not satisfied, 4 key material missing, 5 service startup failure.

#include <fcntl.h>
#include <pthread.h>
#include <signal.h>
#include <sys/stat.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "abehg/bench.hpp"
#include "abehg/config.hpp"
#include "abehg/cpabe.hpp"
#include "abehg/demo.hpp"
#include "abehg/envelope.hpp"
#include "abehg/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace abehg;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kUsage = 2, kPolicy = 3, kMissingKey = 4, kStartup = 5 };

// Usage problems detected after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool g_json = false;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reads a key file; absence is its own exit code.
std::string read_key(const fs::path& path, const char* what) {
  if (!fs::exists(path)) throw service::MissingKeyMaterial(std::string(what) + " not found: " + path.string());
  return read_file(path);
}

void write_file(const fs::path& path, std::string_view bytes, bool secret = false) {
  const auto tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, secret ? 0600 : 0644);
  if (fd < 0) throw Error(Errc::io, "cannot write " + path.string());
  if (secret) ::fchmod(fd, 0600);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n <= 0) {
      ::close(fd);
      ::unlink(tmp.c_str());
      throw Error(Errc::io, "cannot write " + path.string());
    }
    done += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  if (std::rename(tmp.c_str(), path.string().c_str()) != 0) {
    ::unlink(tmp.c_str());
    throw Error(Errc::io, "cannot replace " + path.string());
  }
}

void report(const json& j, const std::string& text) {
  if (g_json) {
    std::cout << j.dump() << '\n';
  } else if (!text.empty()) {
    std::cout << text << '\n';
  }
}

config::ServiceConfig service_config(const std::optional<std::string>& flag) {
  const auto path = config::resolve_config_path(flag);
  if (!path) throw Error(Errc::config, "no config given; pass --config or set ABEHG_CONFIG");
  return config::load_config(*path);
}

int cmd_setup(const fs::path& out_pk, const fs::path& out_msk, bool force) {
  if (!force && (fs::exists(out_pk) || fs::exists(out_msk))) {
    throw UsageError("refusing to overwrite existing key files (use --force)");
  }
  SystemEntropy entropy;
  const auto keys = cpabe::setup(entropy);
  write_file(out_pk, cpabe::serialize_artifact(keys.public_key));
  write_file(out_msk, cpabe::serialize_artifact(keys.master_key), true);
  report({{"ok", true}, {"public_key", out_pk.string()}, {"master_key", out_msk.string()}},
         "wrote " + out_pk.string() + " and " + out_msk.string());
  return kOk;
}

int cmd_keygen(const fs::path& pk_path, const fs::path& msk_path, const std::string& attrs_csv,
               const fs::path& out) {
  const auto attrs = policy::AttributeSet::parse_list(attrs_csv);
  if (attrs.empty()) throw UsageError("--attrs must name at least one attribute");
  const auto pk = cpabe::deserialize_public_key(read_key(pk_path, "public key"));
  const auto msk = cpabe::deserialize_master_key(read_key(msk_path, "master key"));
  cpabe::validate_pair(pk, msk);
  SystemEntropy entropy;
  const auto sk = cpabe::keygen(pk, msk, attrs, entropy);
  write_file(out, cpabe::serialize_artifact(sk), true);
  report({{"ok", true}, {"key", out.string()}, {"attributes", attrs.to_strings()}},
         "wrote " + out.string() + " for " + std::to_string(attrs.size()) + " attribute(s)");
  return kOk;
}

int cmd_enc(const fs::path& pk_path, const std::string& policy_text, const fs::path& in,
            const fs::path& out, const std::string& content_type, const std::string& owner) {
  const auto tree = policy::parse_postfix(policy_text);
  const auto pk = cpabe::deserialize_public_key(read_key(pk_path, "public key"));
  const auto data = read_file(in);
  SystemEntropy entropy;
  const envelope::Meta meta{content_type, authz::SystemClock().now(), owner};
  const auto env = envelope::seal(pk, tree, as_bytes(data), meta, entropy);
  write_file(out, envelope::serialize_envelope(env));
  report({{"ok", true}, {"out", out.string()}, {"policy", policy::serialize_policy(tree)}},
         "sealed " + std::to_string(data.size()) + " bytes into " + out.string());
  return kOk;
}

int cmd_dec(const fs::path& pk_path, const fs::path& key_path, const fs::path& in, const fs::path& out) {
  const auto pk = cpabe::deserialize_public_key(read_key(pk_path, "public key"));
  const auto sk = cpabe::deserialize_private_key(read_key(key_path, "private key"));
  const auto env = envelope::deserialize_envelope(read_file(in));
  const auto plain = envelope::open(pk, sk, env);
  write_file(out, to_string(plain));
  report({{"ok", true}, {"out", out.string()}, {"bytes", plain.size()}},
         "opened " + std::to_string(plain.size()) + " bytes into " + out.string());
  return kOk;
}

// Blocks SIGINT/SIGTERM in every thread; a watcher thread turns them into stop().
class SignalStop {
 public:
  SignalStop() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
  }

  void watch(service::Service& svc) {
    watcher_ = std::thread([this, &svc] {
      int sig = 0;
      sigwait(&set_, &sig);
      if (!done_) std::cerr << "shutting down\n";
      svc.stop();
    });
  }

  ~SignalStop() {
    if (watcher_.joinable()) {
      done_ = true;
      pthread_kill(watcher_.native_handle(), SIGTERM);
      watcher_.join();
    }
  }

 private:
  sigset_t set_{};
  std::thread watcher_;
  std::atomic<bool> done_{false};
};

int cmd_serve(service::Mode mode, const std::optional<std::string>& config_flag) {
  auto cfg = service_config(config_flag);
  SignalStop signals;
  SystemEntropy entropy;
  authz::SystemClock clock;
  service::Service svc(mode, cfg, entropy, clock);
  svc.bind();
  report({{"listening", svc.base_url()}, {"mode", service::to_string(mode)}},
         "abehg " + std::string(service::to_string(mode)) + " listening on " + svc.base_url());
  std::cout.flush();
  signals.watch(svc);
  svc.run();
  return kOk;
}

struct DemoArgs {
  std::optional<std::string> config;
  std::string attrs{demo::kDefaultAttributes};
  std::string policy{demo::kDefaultPolicy};
  std::string authz_url, resource_url;
  std::string in;
  bool wait_expiry = false;
  bool self_host = false;
};

int cmd_demo(const DemoArgs& args) {
  demo::DemoOptions opts;
  opts.json = g_json;
  opts.policy_text = args.policy;
  opts.user_attrs = policy::AttributeSet::parse_list(args.attrs);
  if (opts.user_attrs.empty()) throw UsageError("--attrs must name at least one attribute");
  policy::parse_postfix(opts.policy_text);
  if (!args.in.empty()) {
    const auto data = read_file(args.in);
    opts.record.assign(data.begin(), data.end());
  }

  std::optional<config::ServiceConfig> cfg;
  if (args.config || std::getenv(std::string(config::kConfigEnv).c_str())) cfg = service_config(args.config);

  SystemEntropy entropy;
  authz::SystemClock clock;
  std::unique_ptr<service::Service> hosted;
  fs::path scratch;
  if (args.self_host) {
    auto host_cfg = cfg.value_or(config::ServiceConfig{});
    host_cfg.host = "127.0.0.1";
    host_cfg.port = 0;
    if (!cfg) {
      // Throwaway authority for a self-contained run.
      scratch = fs::temp_directory_path() / ("abehg-demo-" + std::to_string(::getpid()));
      fs::create_directories(scratch);
      const auto keys = cpabe::setup(entropy);
      host_cfg.public_key = scratch / "demo.gpk";
      host_cfg.master_key = scratch / "demo.msk";
      write_file(host_cfg.public_key, cpabe::serialize_artifact(keys.public_key));
      write_file(host_cfg.master_key, cpabe::serialize_artifact(keys.master_key), true);
    }
    hosted = std::make_unique<service::Service>(service::Mode::all, host_cfg, entropy, clock);
    hosted->start();
    opts.authz_url = opts.resource_url = hosted->base_url();
  } else {
    const auto from_bind = cfg ? "http://" + cfg->host + ":" + std::to_string(cfg->port) : std::string();
    opts.authz_url = !args.authz_url.empty() ? args.authz_url
                     : cfg && !cfg->authz_url.empty() ? cfg->authz_url
                                                      : from_bind;
    opts.resource_url = !args.resource_url.empty() ? args.resource_url
                        : cfg && !cfg->resource_url.empty() ? cfg->resource_url
                                                            : from_bind;
    if (opts.authz_url.empty() || opts.resource_url.empty()) {
      throw UsageError("demo needs --config, --authz-url/--resource-url or --self-host");
    }
  }
  if (args.wait_expiry) {
    opts.before_fetch = [](std::int64_t expires_in) {
      if (!g_json) std::cout << "waiting " << expires_in + 1 << " s for the access token to expire\n";
      std::this_thread::sleep_for(std::chrono::seconds(expires_in + 1));
    };
  }

  const auto result = demo::run_demo(opts, entropy, std::cout);
  if (hosted) hosted->stop();
  hosted.reset();
  if (!scratch.empty()) fs::remove_all(scratch);
  if (!result.success) {
    std::cerr << "demo failed at step " << result.failed_step << '\n';
  } else if (!g_json) {
    std::cout << "demo complete: recovered record is byte-identical\n";
  }
  return result.exit_code();
}

int cmd_bench(unsigned max_attrs, unsigned trials, std::size_t payload, const std::string& out) {
  SystemEntropy entropy;
  bench::BenchOptions opts{max_attrs, trials, payload, {}};
  opts.progress = [trials](unsigned round) {
    if (g_json) return;
    if (round == 0) std::cerr << "warm-up round\n";
    else std::cerr << "round " << round << "/" << trials << "\n";
  };
  const auto rows = bench::bench_run(opts, entropy);
  if (out.empty() || out == "-") {
    bench::write_csv(std::cout, rows);
  } else {
    std::ostringstream ss;
    bench::write_csv(ss, rows);
    write_file(out, ss.str());
    report({{"ok", true}, {"out", out}, {"rows", rows.size()}},
           "wrote " + std::to_string(rows.size()) + " rows to " + out);
  }
  return kOk;
}

int cmd_fit(const std::string& in) {
  std::vector<bench::BenchRow> rows;
  if (in.empty() || in == "-") {
    rows = bench::read_csv(std::cin);
  } else {
    std::istringstream ss(read_file(in));
    rows = bench::read_csv(ss);
  }
  for (const auto& fit : bench::fit_linear(rows)) {
    json j{{"phase", bench::to_string(fit.phase)},
           {"slope_us", fit.slope},
           {"intercept_us", fit.intercept},
           {"r_squared", fit.r_squared},
           {"attr_counts", fit.attr_counts},
           {"mean_us", fit.means},
           {"median_us", fit.medians},
           {"mean_strictly_increasing", bench::strictly_increasing(fit.means)}};
    char line[160];
    std::snprintf(line, sizeof line, "%-8s slope %10.1f us/attr  intercept %10.1f us  r^2 %.4f",
                  std::string(bench::to_string(fit.phase)).c_str(), fit.slope, fit.intercept, fit.r_squared);
    report(j, line);
  }
  return kOk;
}

int exit_for(const Error& e) {
  if (dynamic_cast<const service::MissingKeyMaterial*>(&e)) return kMissingKey;
  if (dynamic_cast<const service::StartupError*>(&e)) return kStartup;
  switch (e.code()) {
    case Errc::policy_not_satisfied: return kPolicy;
    case Errc::parse:
    case Errc::config:
    case Errc::domain: return kUsage;
    default: return kRuntime;
  }
}

void print_error(int code, std::string_view kind, std::string_view what) {
  if (g_json) {
    std::cerr << json{{"ok", false}, {"error", kind}, {"message", what}, {"exit", code}}.dump() << '\n';
  } else {
    std::cerr << "abehg: " << what << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPABE toolkit with an OAuth 2.0 layer for EHR sharing", "abehg"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "Machine-readable JSON output");

  std::function<int()> action;

  std::string pk, msk, out, key, in, attrs, policy_text, content_type = "application/octet-stream", owner;
  bool force = false;

  auto* setup = app.add_subcommand("setup", "Create a public key and a master secret key");
  setup->add_option("--out-pk", out, "Public key output (.gpk)")->required();
  setup->add_option("--out-msk", msk, "Master key output (.msk, written 0600)")->required();
  setup->add_flag("--force", force, "Overwrite existing files");
  setup->callback([&] { action = [&] { return cmd_setup(out, msk, force); }; });

  auto* keygen = app.add_subcommand("keygen", "Issue a private key for an attribute set");
  keygen->add_option("--pk", pk, "Public key")->required();
  keygen->add_option("--msk", msk, "Master key")->required();
  keygen->add_option("--attrs", attrs, "Comma-separated attributes")->required();
  keygen->add_option("--out", out, "Private key output (.prk)")->required();
  keygen->callback([&] { action = [&] { return cmd_keygen(pk, msk, attrs, out); }; });

  auto* enc = app.add_subcommand("enc", "Seal a file under a postfix policy");
  enc->add_option("--pk", pk, "Public key")->required();
  enc->add_option("--policy", policy_text, "Postfix policy, e.g. \"a b 2of2\"")->required();
  enc->add_option("--in", in, "Plaintext input")->required();
  enc->add_option("--out", out, "Envelope output (.ehrx)")->required();
  enc->add_option("--content-type", content_type, "Recorded content type");
  enc->add_option("--owner", owner, "Recorded owner id");
  enc->callback([&] { action = [&] { return cmd_enc(pk, policy_text, in, out, content_type, owner); }; });

  auto* dec = app.add_subcommand("dec", "Open an envelope with a private key");
  dec->add_option("--pk", pk, "Public key")->required();
  dec->add_option("--key", key, "Private key")->required();
  dec->add_option("--in", in, "Envelope input")->required();
  dec->add_option("--out", out, "Plaintext output")->required();
  dec->callback([&] { action = [&] { return cmd_dec(pk, key, in, out); }; });

  std::optional<std::string> config_path;
  for (auto [name, mode] : {std::pair{"serve-authz", service::Mode::authz},
                            std::pair{"serve-resource", service::Mode::resource},
                            std::pair{"serve-all", service::Mode::all}}) {
    auto* serve = app.add_subcommand(name, std::string("Run the ") + std::string(service::to_string(mode)) + " service");
    serve->add_option("--config", config_path, "Config file (falls back to $ABEHG_CONFIG)");
    serve->callback([&, mode] { action = [&, mode] { return cmd_serve(mode, config_path); }; });
  }

  DemoArgs demo_args;
  auto* demo_cmd = app.add_subcommand("demo", "Replay the owner/user protocol against running services");
  demo_cmd->add_option("--config", demo_args.config, "Config file (falls back to $ABEHG_CONFIG)");
  demo_cmd->add_option("--attrs", demo_args.attrs, "Data user attributes");
  demo_cmd->add_option("--policy", demo_args.policy, "Record policy (postfix)");
  demo_cmd->add_option("--in", demo_args.in, "Record file (defaults to a sample record)");
  demo_cmd->add_option("--authz-url", demo_args.authz_url, "Authorization server base URL");
  demo_cmd->add_option("--resource-url", demo_args.resource_url, "Resource server base URL");
  demo_cmd->add_flag("--wait-expiry", demo_args.wait_expiry, "Let the access token expire before the fetch");
  demo_cmd->add_flag("--self-host", demo_args.self_host, "Start an in-process server for the run");
  demo_cmd->callback([&] { action = [&] { return cmd_demo(demo_args); }; });

  unsigned max_attrs = 10, trials = 20;
  std::size_t payload = 1024;
  auto* bench_cmd = app.add_subcommand("bench", "Time keygen/encrypt/decrypt against attribute count");
  bench_cmd->add_option("--max-attrs", max_attrs, "Largest attribute count")->check(CLI::Range(2u, 1000u));
  bench_cmd->add_option("--trials", trials, "Trials per attribute count")->check(CLI::Range(5u, 100000u));
  bench_cmd->add_option("--payload", payload, "Sealed payload bytes");
  bench_cmd->add_option("--out", out, "CSV output (default stdout)");
  bench_cmd->callback([&] { action = [&] { return cmd_bench(max_attrs, trials, payload, out); }; });

  auto* fit = app.add_subcommand("fit", "Least-squares trend per phase from bench CSV");
  fit->add_option("--in", in, "CSV input (default stdin)");
  fit->callback([&] { action = [&] { return cmd_fit(in); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    print_error(kUsage, "usage", e.what());
    return kUsage;
  } catch (const Error& e) {
    const int rc = exit_for(e);
    print_error(rc, errc_name(e.code()), e.what());
    return rc;
  } catch (const std::exception& e) {
    print_error(kRuntime, "internal", e.what());
    return kRuntime;
  }
}
