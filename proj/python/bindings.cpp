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

// Python bindings: policies, the CPABE suite as JSON artifacts, envelopes and trend fits.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "abehg/bench.hpp"
#include "abehg/cpabe.hpp"
#include "abehg/envelope.hpp"
#include "abehg/error.hpp"
#include "abehg/policy.hpp"

namespace py = pybind11;
using namespace abehg;

namespace {

policy::AttributeSet to_attrs(const std::vector<std::string>& attrs) {
  return policy::AttributeSet::from_strings(attrs);
}

}  // namespace

PYBIND11_MODULE(_abehg, m) {
  m.doc() = "CPABE toolkit bindings";

  // Module-owned exception types; the handles stay valid for the module's lifetime.
  static const py::handle error = py::exception<Error>(m, "Error").release();
  static const py::handle parse_error = py::exception<Error>(m, "ParseError", error).release();
  static const py::handle not_satisfied = py::exception<Error>(m, "PolicyNotSatisfiedError", error).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::handle target = e.code() == Errc::parse                  ? parse_error
                           : e.code() == Errc::policy_not_satisfied ? not_satisfied
                                                                    : error;
      py::object exc = target(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      PyErr_SetObject(target.ptr(), exc.ptr());
    }
  });

  m.def("normalize_attribute", [](std::string_view raw) { return policy::Attribute::normalize(raw).text(); },
        py::arg("raw"));
  m.def("parse_policy",
        [](std::string_view text) { return policy::serialize_policy(policy::parse_postfix(text)); },
        py::arg("text"), "Canonical postfix form of a postfix policy.");
  m.def("parse_infix",
        [](std::string_view text) { return policy::serialize_policy(policy::parse_infix(text)); },
        py::arg("text"), "Canonical postfix form of a boolean policy.");
  m.def("satisfies",
        [](std::string_view policy_text, const std::vector<std::string>& attrs) {
          return policy::satisfies(policy::parse_postfix(policy_text), to_attrs(attrs));
        },
        py::arg("policy"), py::arg("attributes"));

  m.def("setup", [] {
    SystemEntropy entropy;
    const auto keys = cpabe::setup(entropy);
    return py::make_tuple(cpabe::serialize_artifact(keys.public_key),
                          cpabe::serialize_artifact(keys.master_key));
  }, "Returns (public_key_json, master_key_json).");

  m.def("keygen",
        [](std::string_view pk, std::string_view msk, const std::vector<std::string>& attrs) {
          SystemEntropy entropy;
          return cpabe::serialize_artifact(cpabe::keygen(cpabe::deserialize_public_key(pk),
                                                         cpabe::deserialize_master_key(msk),
                                                         to_attrs(attrs), entropy));
        },
        py::arg("public_key"), py::arg("master_key"), py::arg("attributes"));

  m.def("seal",
        [](std::string_view pk, std::string_view policy_text, const py::bytes& data,
           std::string content_type, std::int64_t created_at, std::string owner_id) {
          SystemEntropy entropy;
          const auto plain = std::string(data);
          const auto env = envelope::seal(cpabe::deserialize_public_key(pk), policy::parse_postfix(policy_text),
                                          as_bytes(plain), {std::move(content_type), created_at, std::move(owner_id)},
                                          entropy);
          return envelope::serialize_envelope(env);
        },
        py::arg("public_key"), py::arg("policy"), py::arg("data"),
        py::arg("content_type") = "application/octet-stream", py::arg("created_at") = 0,
        py::arg("owner_id") = "");

  m.def("open_envelope",
        [](std::string_view pk, std::string_view key, std::string_view env) {
          const auto plain = envelope::open(cpabe::deserialize_public_key(pk), cpabe::deserialize_private_key(key),
                                            envelope::deserialize_envelope(env));
          return py::bytes(reinterpret_cast<const char*>(plain.data()), plain.size());
        },
        py::arg("public_key"), py::arg("private_key"), py::arg("envelope"));

  m.def("fit_linear",
        [](const std::vector<std::tuple<std::string, unsigned, unsigned, double>>& rows) {
          std::vector<bench::BenchRow> parsed;
          for (const auto& [phase, count, trial, us] : rows) {
            parsed.push_back({bench::parse_phase(phase), count, trial, us});
          }
          py::list out;
          for (const auto& f : bench::fit_linear(parsed)) {
            py::dict d;
            d["phase"] = std::string(bench::to_string(f.phase));
            d["slope"] = f.slope;
            d["intercept"] = f.intercept;
            d["r_squared"] = f.r_squared;
            d["attr_counts"] = f.attr_counts;
            d["means"] = f.means;
            d["medians"] = f.medians;
            out.append(std::move(d));
          }
          return out;
        },
        py::arg("rows"), "Rows are (phase, attr_count, trial, elapsed_us) tuples.");
}
