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

// redlab_cli: command-line driver for the redaction experiments.
//
// Exit codes: 0 success, 1 runtime failure or failed --check, 2 bad config or usage.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "redlab/hash.hpp"
#include "scenarios.hpp"

namespace {

namespace fs = std::filesystem;
using redlab::cli::ConfigError;
using redlab::cli::Json;

constexpr std::uint64_t kDefaultSeed = 1;

const std::vector<std::string> kBlocks = {"theorem_check", "deletion", "redact",
                                          "dynamics",      "scores",   "gradcheck"};

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  Json j;
  try {
    j = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (k != "seed" && std::find(kBlocks.begin(), kBlocks.end(), k) == kBlocks.end()) {
      throw ConfigError("unknown top-level key '" + k + "'");
    }
  }
  if (j.contains("seed") && !(j["seed"].is_number_unsigned() || j["seed"].is_number_integer())) {
    throw ConfigError("'seed' must be a nonnegative integer");
  }
  if (j.contains("seed") && j["seed"].get<std::int64_t>() < 0) {
    throw ConfigError("'seed' must be a nonnegative integer");
  }
  return j;
}

fs::path output_dir(const std::string& flag) {
  fs::path dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv("REDLAB_OUT_DIR");
    dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("redlab_out");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output directory " + dir.string() + " cannot be created");
  }
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream os(probe);
    if (!os) throw ConfigError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
  return dir;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Redaction experiments for label-smoothed generative models"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::string out_flag;
  bool check = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed_flag, "random seed (overrides the config)");
  app.add_option("--out", out_flag, "output directory (default $REDLAB_OUT_DIR or ./redlab_out)");
  app.add_flag("--check", check, "exit 1 when the scenario's pass condition fails");

  redlab::cli::RedactFlags redact_flags;
  redlab::cli::SelfcheckFlags self_flags;
  bool sweep = false;

  auto* theorem = app.add_subcommand("theorem-check", "exact minimax solve on a discrete instance");
  auto* deletion = app.add_subcommand("deletion-vs-redaction", "Gaussian deletion counterexample");
  auto* redact = app.add_subcommand("redact", "redact a pre-trained toy GAN");
  redact->add_option("--method", redact_flags.method, "data | validity | classifier")
      ->check(CLI::IsMember({"data", "validity", "classifier"}));
  redact->add_flag("--multi", redact_flags.multi, "redact the union of two modes");
  auto* dynamics = app.add_subcommand("dynamics", "invalidity dynamics under a query budget");
  dynamics->add_flag("--sweep", sweep, "sweep T at a fixed total budget");
  auto* scores = app.add_subcommand("scores", "per-sample redaction scores");
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference backprop checks");
  auto* selfcheck = app.add_subcommand("selfcheck", "internal invariant checks");
  selfcheck->add_flag("--inject-gradient-fault", self_flags.inject_gradient_fault)
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  redlab::cli::Prepared prepared;
  std::string scenario;
  redlab::cli::RunContext ctx;
  Json config;
  try {
    config = load_config(config_path);
    const auto block = [&](const char* name) {
      return config.contains(name) ? config[name] : Json(nullptr);
    };
    ctx.seed = seed_flag ? *seed_flag
                         : (config.contains("seed") ? config["seed"].get<std::uint64_t>() : kDefaultSeed);
    if (theorem->parsed()) {
      scenario = "theorem-check";
      prepared = redlab::cli::prepare_theorem_check(block("theorem_check"));
    } else if (deletion->parsed()) {
      scenario = "deletion-vs-redaction";
      prepared = redlab::cli::prepare_deletion(block("deletion"));
    } else if (redact->parsed()) {
      scenario = "redact";
      prepared = redlab::cli::prepare_redact(block("redact"), redact_flags);
    } else if (dynamics->parsed()) {
      scenario = "dynamics";
      prepared = redlab::cli::prepare_dynamics(block("dynamics"), sweep);
    } else if (scores->parsed()) {
      scenario = "scores";
      prepared = redlab::cli::prepare_scores(block("scores"));
    } else if (gradcheck->parsed()) {
      scenario = "gradcheck";
      prepared = redlab::cli::prepare_gradcheck(block("gradcheck"));
    } else {
      scenario = "selfcheck";
      prepared = redlab::cli::prepare_selfcheck(self_flags);
    }
    ctx.out_dir = output_dir(out_flag);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  ctx.check = check;
  ctx.log = &std::cerr;

  const Json manifest = {{"scenario", scenario}, {"seed", ctx.seed}, {"params", prepared.resolved}};
  const std::string hash = redlab::hex64(redlab::fnv1a64(manifest.dump()));

  redlab::cli::Outcome outcome;
  try {
    outcome = prepared.run(ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const Json summary = {{"scenario", scenario},
                        {"manifest_hash", hash},
                        {"seed", ctx.seed},
                        {"passed", outcome.passed},
                        {"check", check},
                        {"metrics", outcome.metrics},
                        {"outputs", outcome.outputs},
                        {"manifest", manifest}};
  {
    std::ofstream os(ctx.out_dir / "summary.json");
    os << summary.dump(2) << "\n";
    if (!os) {
      std::cerr << "error: cannot write summary.json\n";
      return 1;
    }
  }
  std::cout << summary.dump(2) << std::endl;

  if (scenario == "selfcheck" && !outcome.passed) return 1;
  if (check && !outcome.passed) return 1;
  return 0;
}
