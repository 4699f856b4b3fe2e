// Copyright 2026 The Redaction Lab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REDLAB_TOOLS_SCENARIOS_HPP
#define REDLAB_TOOLS_SCENARIOS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "manifest.hpp"

namespace redlab::cli {

struct RunContext {
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  bool check = false;
  std::ostream* log = nullptr;
};

struct Outcome {
  bool passed = true;
  Json metrics = Json::object();
  std::vector<std::string> outputs;
};

/// A scenario validates its parameter block up front (throwing ConfigError)
/// and returns the resolved parameters plus a runner bound to them.
struct Prepared {
  Json resolved;
  std::function<Outcome(const RunContext&)> run;
};

struct RedactFlags {
  std::string method = "data";
  bool multi = false;
};

struct SelfcheckFlags {
  bool inject_gradient_fault = false;
};

Prepared prepare_theorem_check(const Json& block);
Prepared prepare_deletion(const Json& block);
Prepared prepare_redact(const Json& block, const RedactFlags& flags);
Prepared prepare_dynamics(const Json& block, bool sweep);
Prepared prepare_scores(const Json& block);
Prepared prepare_gradcheck(const Json& block);
Prepared prepare_selfcheck(const SelfcheckFlags& flags);

}  // namespace redlab::cli

#endif  // REDLAB_TOOLS_SCENARIOS_HPP
