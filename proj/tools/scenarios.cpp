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

#include "scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "redlab.hpp"

namespace redlab::cli {
namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const RunContext& ctx, Outcome& o, const std::string& name) {
  const fs::path p = ctx.out_dir / name;
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  o.outputs.push_back(name);
  return os;
}

// JSON has no infinity; map non-finite values to null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

SmoothingParams read_smoothing(Block& b, double ap, double am, double lam) {
  const double a_plus = b.number("alpha_plus", ap);
  const double a_minus = b.number("alpha_minus", am);
  const double lambda = b.number("lambda", lam);
  const double tau = b.number("tau", 0.5);
  try {
    return SmoothingParams::make(a_plus, a_minus, lambda, tau);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Json smoothing_json(const SmoothingParams& p) {
  return {{"alpha_plus", p.alpha_plus()},
          {"alpha_minus", p.alpha_minus()},
          {"lambda", p.lambda()},
          {"tau", p.tau()}};
}

// --- theorem-check ----------------------------------------------------------------------

struct TheoremParams {
  std::vector<double> p_data;
  std::vector<std::size_t> omega;
  SmoothingParams smoothing = SmoothingParams::make(0.9, 0.1, 0.8);
  MinimaxConfig solver;
  double tolerance = 1e-3;
};

}  // namespace

Prepared prepare_theorem_check(const Json& block) {
  Block b(block, "theorem_check");
  TheoremParams p;
  p.p_data = b.numbers("p_data", {0.4, 0.3, 0.2, 0.1});
  for (auto i : b.integers("omega", {3})) {
    if (i < 0) b.fail("omega", "a list of nonnegative atom indices");
    p.omega.push_back(static_cast<std::size_t>(i));
  }
  p.smoothing = read_smoothing(b, 0.9, 0.1, 0.8);
  p.solver.step_size = b.number("step_size", 0.5);
  p.solver.max_iters = static_cast<std::size_t>(b.integer("max_iters", 10000, 1));
  p.solver.tol = b.number("tol", 1e-10);
  p.tolerance = b.number("tv_tolerance", 1e-3);
  b.finish();
  if (!(p.solver.step_size > 0.0)) b.fail("step_size", "positive");
  DiscreteDistribution data = DiscreteDistribution::uniform(1);
  DiscreteSpec spec = DiscreteSpec::empty();
  try {
    data = DiscreteDistribution::from_probs(p.p_data);
    spec = DiscreteSpec::explicit_set(p.omega);
    spec.check_support(data.size());
    (void)restrict(data, spec);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("theorem_check: ") + e.what());
  }

  Json resolved = {{"p_data", p.p_data},
                   {"omega", p.omega},
                   {"smoothing", smoothing_json(p.smoothing)},
                   {"step_size", p.solver.step_size},
                   {"max_iters", p.solver.max_iters},
                   {"tol", p.solver.tol},
                   {"tv_tolerance", p.tolerance}};
  return {resolved, [p, data, spec](const RunContext& ctx) {
            Outcome o;
            const auto t0 = std::chrono::steady_clock::now();
            const MinimaxResult r = solve_minimax(data, spec, p.smoothing, p.solver);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const double tv = total_variation(r.p_g_star, r.target);
            {
              auto os = open_output(ctx, o, "minimax_trace.csv");
              write_minimax_trace(os, r);
            }
            {
              auto os = open_output(ctx, o, "solution.csv");
              CsvWriter csv(os, {"atom", "p_data", "target", "p_g_star", "d_star", "in_omega"});
              for (std::size_t i = 0; i < data.size(); ++i) {
                csv.row(i, data[i], r.target[i], r.p_g_star[i], r.d_star[i], spec.contains(i) ? 1 : 0);
              }
            }
            o.passed = tv <= p.tolerance;
            o.metrics = {{"tv_to_target", tv},
                         {"mass_on_omega", invalidity(r.p_g_star, spec)},
                         {"iterations", r.iterations},
                         {"converged", r.converged},
                         {"seconds", secs}};
            return o;
          }};
}

// --- deletion-vs-redaction --------------------------------------------------------------

Prepared prepare_deletion(const Json& block) {
  Block b(block, "deletion");
  const auto n = static_cast<std::size_t>(b.integer("n", 80, 10));
  const double threshold = b.number("threshold", 1.5);
  const double bound = b.number("omega_bound", 1.5);
  const auto seeds = static_cast<std::size_t>(b.integer("seeds", 10, 1));
  const auto points = static_cast<std::size_t>(b.integer("grid_points", 401, 2));
  const double min_mass = b.number("min_deletion_mass", 0.01);
  b.finish();
  if (!(threshold > 0.0)) b.fail("threshold", "positive");
  if (!(bound > 0.0)) b.fail("omega_bound", "positive");

  Json resolved = {{"n", n},         {"threshold", threshold},   {"omega_bound", bound},
                   {"seeds", seeds}, {"grid_points", points}, {"min_deletion_mass", min_mass}};
  return {resolved, [=](const RunContext& ctx) {
            Outcome o;
            auto os = open_output(ctx, o, "deletion.csv");
            CsvWriter csv(os, {"seed", "n_kept", "deleted_mean", "deleted_variance",
                               "deleted_mass_on_omega", "redacted_mass_on_omega"});
            double min_deleted = std::numeric_limits<double>::infinity();
            double max_redacted = 0.0;
            for (std::size_t s = 0; s < seeds; ++s) {
              const auto r = deletion_vs_redaction_demo(n, threshold, ctx.seed + s, bound);
              csv.row(ctx.seed + s, r.n_kept, r.deleted_model.mean, r.deleted_model.variance,
                      r.deleted_model_mass_on_omega, r.redacted_density_mass_on_omega);
              min_deleted = std::min(min_deleted, r.deleted_model_mass_on_omega);
              max_redacted = std::max(max_redacted, r.redacted_density_mass_on_omega);
              if (s == 0) {
                auto dens = open_output(ctx, o, "density.csv");
                write_deletion_csv(dens, r, -4.0, 4.0, points);
              }
            }
            o.passed = max_redacted == 0.0 && min_deleted > min_mass;
            o.metrics = {{"min_deleted_mass_on_omega", min_deleted},
                         {"max_redacted_mass_on_omega", max_redacted}};
            return o;
          }};
}

// --- toy GAN scenarios --------------------------------------------------------------------

namespace {

struct ToyParams {
  toy::Profile profile;
  toy::ModeMixture mix;
  int redaction_epochs = 3;
  SmoothingParams smoothing = SmoothingParams::make(0.9, 0.05, 0.8);
  double classifier_width = 0.2;
  std::vector<std::size_t> modes{0};
  std::size_t bins = kDefaultBins;
  bool record_wall_time = true;
  std::string pretrained_checkpoint;
  bool save_checkpoints = false;
  double min_reduction = 10.0;
  double max_quality_change = 0.1;
};

ToyParams read_toy(Block& b, const std::vector<std::int64_t>& default_modes, double min_reduction) {
  ToyParams p;
  p.profile.n_data = static_cast<std::size_t>(b.integer("n_data", 20000, 1));
  p.mix.sigma = b.number("sigma", 0.15);
  p.profile.pretrain.epochs = static_cast<int>(b.integer("pretrain_epochs", 20, 0));
  p.profile.pretrain.learning_rate = b.number("learning_rate", 1e-3);
  p.profile.pretrain.batch_size = static_cast<int>(b.integer("batch_size", 64, 1));
  p.profile.pretrain.k_g = static_cast<int>(b.integer("pretrain_k_g", 1, 1));
  p.profile.arch.latent_dim = static_cast<int>(b.integer("latent_dim", 8, 1));
  std::vector<int> hidden;
  for (auto h : b.integers("hidden", {64, 64})) {
    if (h < 1) b.fail("hidden", "a list of positive layer widths");
    hidden.push_back(static_cast<int>(h));
  }
  p.profile.arch.hidden = hidden;
  p.profile.arch.d_slope = b.number("d_slope", 8.0);
  p.profile.arch.g_slope = b.number("g_slope", 4.0);
  p.redaction_epochs = static_cast<int>(b.integer("epochs", 3, 1));
  p.profile.queries_per_round = static_cast<int>(b.integer("queries_per_round", 400, 1));
  p.smoothing = read_smoothing(b, 0.9, 0.05, 0.8);
  p.classifier_width = b.number("classifier_width", 0.2);
  p.modes.clear();
  for (auto m : b.integers("modes", default_modes)) {
    if (m < 0 || m >= static_cast<std::int64_t>(p.mix.modes())) {
      b.fail("modes", "a list of mode indices in [0, " + std::to_string(p.mix.modes() - 1) + "]");
    }
    p.modes.push_back(static_cast<std::size_t>(m));
  }
  if (p.modes.empty()) b.fail("modes", "nonempty");
  p.profile.eval_samples = static_cast<std::size_t>(b.integer("eval_samples", 20000, 1));
  p.bins = static_cast<std::size_t>(b.integer("bins", 64, 1));
  p.record_wall_time = b.boolean("record_wall_time", true);
  p.pretrained_checkpoint = b.text("pretrained_checkpoint", "");
  p.save_checkpoints = b.boolean("save_checkpoints", false);
  p.min_reduction = b.number("min_reduction", min_reduction);
  p.max_quality_change = b.number("max_quality_change", 0.1);
  if (!(p.mix.sigma > 0.0)) b.fail("sigma", "positive");
  if (!(p.profile.pretrain.learning_rate > 0.0)) b.fail("learning_rate", "positive");
  if (!(p.classifier_width > 0.0)) b.fail("classifier_width", "positive");
  if (!p.pretrained_checkpoint.empty() && !fs::exists(p.pretrained_checkpoint)) {
    b.fail("pretrained_checkpoint", "an existing file");
  }
  return p;
}

Json toy_json(const ToyParams& p) {
  return {{"n_data", p.profile.n_data},
          {"sigma", p.mix.sigma},
          {"pretrain_epochs", p.profile.pretrain.epochs},
          {"learning_rate", p.profile.pretrain.learning_rate},
          {"batch_size", p.profile.pretrain.batch_size},
          {"pretrain_k_g", p.profile.pretrain.k_g},
          {"latent_dim", p.profile.arch.latent_dim},
          {"hidden", p.profile.arch.hidden},
          {"d_slope", p.profile.arch.d_slope},
          {"g_slope", p.profile.arch.g_slope},
          {"epochs", p.redaction_epochs},
          {"queries_per_round", p.profile.queries_per_round},
          {"smoothing", smoothing_json(p.smoothing)},
          {"classifier_width", p.classifier_width},
          {"modes", p.modes},
          {"eval_samples", p.profile.eval_samples},
          {"bins", p.bins},
          {"record_wall_time", p.record_wall_time},
          {"pretrained_checkpoint", p.pretrained_checkpoint},
          {"save_checkpoints", p.save_checkpoints},
          {"min_reduction", p.min_reduction},
          {"max_quality_change", p.max_quality_change}};
}

struct ToyRun {
  Samples data;
  GanModel pretrained;
  PointSpec classifier_spec = PointSpec::empty();
  PointSpec validity_spec = PointSpec::empty();
};

ToyRun build_toy(const ToyParams& p, const RunContext& ctx, Outcome& o) {
  ToyRun t;
  std::mt19937_64 rng(ctx.seed);
  t.data = p.mix.sample(p.profile.n_data, rng).x;
  if (!p.pretrained_checkpoint.empty()) {
    t.pretrained = load_checkpoint(p.pretrained_checkpoint);
  } else {
    TrainConfig cfg = p.profile.pretrain;
    cfg.seed = ctx.seed;
    if (ctx.log) *ctx.log << "pre-training on " << p.profile.n_data << " samples\n";
    t.pretrained = pretrain(t.data, cfg, p.profile.arch);
  }
  std::vector<PointSpec> cls, val;
  for (auto m : p.modes) {
    cls.push_back(toy::mode_classifier_spec(p.mix, m, p.smoothing.tau(), p.classifier_width));
    val.push_back(toy::mode_validity_spec(p.mix, m, p.smoothing.tau(), p.classifier_width));
  }
  t.classifier_spec = combine_specs(cls);
  t.validity_spec = combine_specs(val);
  if (p.save_checkpoints) {
    save_checkpoint((ctx.out_dir / "pretrained.ckpt").string(), t.pretrained);
    o.outputs.push_back("pretrained.ckpt");
  }
  return t;
}

RedactionRunConfig run_config(const ToyParams& p, std::uint64_t seed) {
  RedactionRunConfig rc;
  rc.smoothing = p.smoothing;
  rc.train = p.profile.redaction(seed, p.redaction_epochs);
  rc.train.batch_size = p.profile.pretrain.batch_size;
  rc.rounds = p.redaction_epochs;
  rc.queries_per_round = p.profile.queries_per_round;
  return rc;
}

}  // namespace

Prepared prepare_redact(const Json& block, const RedactFlags& flags) {
  Block b(block, "redact");
  const std::vector<std::int64_t> modes =
      flags.multi ? std::vector<std::int64_t>{0, 3} : std::vector<std::int64_t>{0};
  ToyParams p = read_toy(b, modes, flags.multi ? 2.0 : 10.0);
  if (flags.multi && !block.contains("epochs")) p.redaction_epochs = 1;
  b.finish();
  Json resolved = toy_json(p);
  resolved["method"] = flags.method;
  resolved["multi"] = flags.multi;
  const std::string method = flags.method;

  return {resolved, [p, method](const RunContext& ctx) {
            Outcome o;
            const ToyRun t = build_toy(p, ctx, o);
            const PointSpec& omega = t.classifier_spec;
            const auto eval = [&](const GanModel& m) {
              return evaluate(m, t.data, omega, p.profile.eval_samples, 7, p.bins);
            };
            const MetricsReport base = eval(t.pretrained);

            auto wide = open_output(ctx, o, "metrics.csv");
            auto longf = open_output(ctx, o, "metrics_long.csv");
            CsvWriter csv(wide, {"round", "invalidity", "quality_tv", "query_count", "wall_time"});
            MetricsLog log(longf);
            const std::string& run_id = method;
            const auto t0 = std::chrono::steady_clock::now();
            const auto record = [&](std::size_t round, const MetricsReport& r, std::uint64_t q) {
              const double wall =
                  p.record_wall_time
                      ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                      : 0.0;
              csv.row(round, r.invalidity, r.quality_tv, q, wall);
              log.add(run_id, round, "invalidity", r.invalidity, r.n_samples, r.seed);
              log.add(run_id, round, "quality_tv", r.quality_tv, r.n_samples, r.seed);
              wide.flush();
            };
            record(0, base, 0);
            const RoundObserver observer = [&](const RoundReport& rr) {
              record(rr.round, eval(rr.model), rr.query_count);
              if (ctx.log) *ctx.log << "round " << rr.round << " pool " << rr.pool_size << "\n";
            };

            const RedactionRunConfig rc = run_config(p, ctx.seed);
            GanModel out;
            std::uint64_t queries = 0;
            if (method == "data") {
              out = redact_data_based(t.pretrained, t.data, toy::select(t.data, omega, true), rc,
                                      observer);
            } else if (method == "validity") {
              const auto valid = std::get<ValiditySet<PointView>>(t.validity_spec.variant()).valid;
              auto res = redact_validity_based(t.pretrained, t.data, valid, rc, observer,
                                               &std::cerr);
              queries = res.query_count;
              out = std::move(res.model);
            } else {
              out = redact_classifier_based(
                  t.pretrained, t.data, std::get<ClassifierSet<PointView>>(omega.variant()), rc,
                  observer);
            }
            if (p.save_checkpoints) {
              save_checkpoint((ctx.out_dir / "redacted.ckpt").string(), out);
              o.outputs.push_back("redacted.ckpt");
            }
            const MetricsReport fin = eval(out);
            const double red = fin.invalidity > 0.0 ? base.invalidity / fin.invalidity
                                                    : std::numeric_limits<double>::infinity();
            const double dq = fin.quality_tv - base.quality_tv;
            o.passed = red >= p.min_reduction && dq <= p.max_quality_change;
            o.metrics = {{"pretrained_invalidity", base.invalidity},
                         {"pretrained_quality_tv", base.quality_tv},
                         {"final_invalidity", fin.invalidity},
                         {"final_quality_tv", fin.quality_tv},
                         {"reduction", num(red)},
                         {"quality_change", dq},
                         {"query_count", queries}};
            return o;
          }};
}

Prepared prepare_scores(const Json& block) {
  Block b(block, "scores");
  ToyParams p = read_toy(b, {0}, 0.0);
  b.finish();
  Json resolved = toy_json(p);
  return {resolved, [p](const RunContext& ctx) {
            Outcome o;
            const ToyRun t = build_toy(p, ctx, o);
            const PointSpec& omega = t.classifier_spec;
            const GanModel out = redact_data_based(
                t.pretrained, t.data, toy::select(t.data, omega, true), run_config(p, ctx.seed));
            const Samples in_omega = toy::select(t.data, omega, true);
            const auto table = redaction_scores(t.pretrained, out, in_omega);
            {
              auto os = open_output(ctx, o, "scores.csv");
              table.write_csv(os);
            }
            // Mode-level averages over all data samples.
            const auto all = redaction_scores(t.pretrained, out, t.data);
            {
              auto os = open_output(ctx, o, "mode_scores.csv");
              CsvWriter csv(os, {"mode", "n", "mean_d0", "mean_rs"});
              for (std::size_t k = 0; k < p.mix.modes(); ++k) {
                const auto [lo, hi] = p.mix.region(k);
                double s0 = 0.0, srs = 0.0;
                std::size_t n = 0;
                for (const auto& e : all.entries) {
                  const double x = t.data(0, static_cast<Eigen::Index>(e.id));
                  if (x >= lo && x < hi) {
                    s0 += e.d0;
                    srs += e.rs;
                    ++n;
                  }
                }
                const double dn = n > 0 ? static_cast<double>(n) : 1.0;
                csv.row(k, n, s0 / dn, srs / dn);
              }
            }
            const Regression reg = difficulty_regression(table);
            o.passed = reg.slope > 0.0;
            o.metrics = {{"omega_samples", in_omega.cols()},
                         {"slope", reg.slope},
                         {"intercept", reg.intercept},
                         {"r_squared", reg.r_squared}};
            return o;
          }};
}

// --- dynamics -----------------------------------------------------------------------------

Prepared prepare_dynamics(const Json& block, bool sweep) {
  Block b(block, "dynamics");
  const std::string kind = b.text("kind", "tanh", {"tanh", "saturating"});
  const double ce = b.number("c_easy", 0.9), te = b.number("tau_easy", 500.0);
  const double ch = b.number("c_hard", 0.5), th = b.number("tau_hard", 400.0);
  const double me = b.number("m_easy", 0.2), mh = b.number("m_hard", 0.1);
  const double t_round = b.number("T", 100.0);
  const auto rounds = static_cast<std::size_t>(b.integer("rounds", 10000, 0));
  const double budget = b.number("budget", 1e5);
  const auto ts = b.numbers("sweep_T", {10, 20, 50, 100, 200, 500, 1000, 2000, 5000});
  const double final_tol = b.number("final_tolerance", 1e-6);
  b.finish();
  const auto k = kind == "tanh" ? XiCurve::Kind::Tanh : XiCurve::Kind::Saturating;
  const auto setup = [&] {
    try {
      return std::pair{XiFamily::make(XiCurve::make(k, ce, te), XiCurve::make(k, ch, th)),
                       DynamicsState::initial(me, mh)};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("dynamics: ") + e.what());
    }
  }();
  const XiFamily xi = setup.first;
  const DynamicsState s0 = setup.second;
  if (!(t_round >= 0.0)) b.fail("T", "nonnegative");
  if (!(budget > 0.0)) b.fail("budget", "positive");
  for (double t : ts) {
    if (!(t > 0.0)) b.fail("sweep_T", "a list of positive values");
  }

  Json resolved = {{"kind", kind},     {"c_easy", ce}, {"tau_easy", te},          {"c_hard", ch},
                   {"tau_hard", th},   {"m_easy", me}, {"m_hard", mh},            {"T", t_round},
                   {"rounds", rounds}, {"budget", budget}, {"sweep_T", ts},       {"sweep", sweep},
                   {"final_tolerance", final_tol}};
  return {resolved, [=](const RunContext& ctx) {
            Outcome o;
            Json roots = Json::object();
            bool roots_ok = true;
            const auto root = [&](const char* name, auto&& fn) {
              try {
                const OptimalT r = fn();
                roots[name] = {{"T", r.t}, {"residual", r.residual}, {"objective", r.objective},
                               {"rounds", r.rounds}};
                roots_ok = roots_ok && r.residual <= 1e-10;
              } catch (const RootNotFound& e) {
                roots[name] = {{"error", e.what()}};
                roots_ok = false;
              }
            };
            root("lower", [&] { return optimal_T_lower(xi.easy(), budget); });
            root("upper", [&] { return optimal_T_upper(xi, budget); });
            o.metrics["optimal_T"] = roots;

            if (sweep) {
              const auto rows = budget_sweep(s0, xi, budget, ts);
              auto os = open_output(ctx, o, "sweep.csv");
              write_sweep_csv(os, rows);
              bool bounded = true;
              for (const auto& r : rows) {
                bounded = bounded && r.lower_bound <= r.final_invalidity * (1 + 1e-12) &&
                          r.final_invalidity <= r.upper_bound * (1 + 1e-12);
              }
              o.metrics["sweep_within_bounds"] = bounded;
              o.passed = bounded && roots_ok;
            } else {
              const auto traj = simulate(s0, xi, t_round, rounds);
              const RatioBounds rb = ratio_bounds(xi, t_round);
              auto os = open_output(ctx, o, "trajectory.csv");
              CsvWriter csv(os, {"round", "m_easy", "m_hard", "invalidity", "lower_bound", "upper_bound"});
              bool monotone = true;
              for (std::size_t i = 0; i < traj.size(); ++i) {
                const double r = static_cast<double>(i);
                csv.row(i, traj[i].m_easy, traj[i].m_hard, traj[i].invalidity(),
                        s0.invalidity() * std::pow(rb.lower, r), s0.invalidity() * std::pow(rb.upper, r));
                if (i > 0) monotone = monotone && traj[i].invalidity() <= traj[i - 1].invalidity();
              }
              const double fin = traj.back().invalidity();
              o.metrics["final_invalidity"] = fin;
              o.metrics["monotone"] = monotone;
              o.passed = monotone && fin <= final_tol && roots_ok;
            }
            return o;
          }};
}

// --- gradcheck / selfcheck -----------------------------------------------------------------

namespace {

struct ArchCase {
  std::string name;
  std::vector<int> dims;
  Activation act;
  OutputSquash squash;
  bool log_loss;
};

std::vector<ArchCase> suite_architectures() {
  const toy::Profile prof;
  return {{"linear", {4, 3}, Activation::Identity, OutputSquash::Identity, false},
          {"tanh_3layer", {2, 8, 8, 3}, Activation::Tanh, OutputSquash::Tanh, false},
          {"leaky_sigmoid_logd", {1, 16, 16, 1}, Activation::LeakyRelu, OutputSquash::Sigmoid, true},
          {"toy_generator", prof.arch.generator_dims(), Activation::Tanh, OutputSquash::Identity, false},
          {"toy_discriminator", prof.arch.discriminator_dims(), Activation::Tanh, OutputSquash::Sigmoid,
           true}};
}

double check_arch(const ArchCase& a, std::uint64_t seed, const GradCheckOptions& opts) {
  std::mt19937_64 rng(seed);
  MlpNetwork net(a.dims, a.act, a.squash);
  net.init_uniform(rng);
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::MatrixXd x(net.input_dim(), 6), up(net.output_dim(), 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = n01(rng);
  for (Eigen::Index i = 0; i < up.size(); ++i) up(i) = n01(rng);
  if (!a.log_loss) return backprop_check(net, x, up, opts);
  return backprop_check(
      net, x,
      [](const Eigen::MatrixXd& d) {
        return std::make_pair(d.array().log().sum(),
                              Eigen::MatrixXd(d.unaryExpr([](double v) { return 1.0 / v; })));
      },
      opts);
}

}  // namespace

Prepared prepare_gradcheck(const Json& block) {
  Block b(block, "gradcheck");
  const double step = b.number("step", 1e-5);
  const double tol = b.number("tolerance", 1e-4);
  b.finish();
  if (!(step > 0.0)) b.fail("step", "positive");
  Json resolved = {{"step", step}, {"tolerance", tol}};
  return {resolved, [=](const RunContext& ctx) {
            Outcome o;
            GradCheckOptions opts;
            opts.step = step;
            auto os = open_output(ctx, o, "gradcheck.csv");
            CsvWriter csv(os, {"architecture", "params", "worst_relative_error"});
            double worst = 0.0;
            for (const auto& a : suite_architectures()) {
              const double e = check_arch(a, ctx.seed, opts);
              std::size_t params = 0;
              for (std::size_t l = 0; l + 1 < a.dims.size(); ++l) {
                params += static_cast<std::size_t>(a.dims[l + 1]) * (a.dims[l] + 1);
              }
              csv.row(a.name, params, e);
              worst = std::max(worst, e);
            }
            o.passed = worst <= tol;
            o.metrics = {{"worst_relative_error", worst}};
            return o;
          }};
}

Prepared prepare_selfcheck(const SelfcheckFlags& flags) {
  Json resolved = Json::object();
  return {resolved, [flags](const RunContext& ctx) {
            Outcome o;
            std::ostream& log = std::cout;
            const auto verdict = [&](const std::string& name, bool ok, const std::string& detail) {
              log << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
              o.metrics[name] = {{"passed", ok}, {"detail", detail}};
              o.passed = o.passed && ok;
            };

            {  // Fenchel identity over a parameter and argument grid.
              double worst = 0.0;
              for (double ap : {0.6, 0.8, 0.95, 1.0}) {
                for (double am : {0.0, 0.1, 0.3}) {
                  const auto p = SmoothingParams::make(ap, am, 0.5);
                  for (int k = 0; k <= 200; ++k) {
                    const double u = 0.1 + 9.9 * k / 200.0;
                    const double s = phi_prime(u, p);
                    worst = std::max(worst, std::abs(phi_conjugate(s, p) + phi(u, p) - u * s));
                  }
                }
              }
              verdict("fenchel_identity", worst <= 1e-9, "worst residual " + CsvWriter::format(worst));
            }
            {
              GradCheckOptions opts;
              if (flags.inject_gradient_fault) {
                opts.analytic_hook = [](std::span<double> g) {
                  if (!g.empty()) g[0] += 0.5;
                };
              }
              double worst = 0.0;
              for (const auto& a : suite_architectures()) worst = std::max(worst, check_arch(a, 1, opts));
              verdict("backprop_check", worst <= 1e-4, "worst relative error " + CsvWriter::format(worst));
            }
            {
              double lowest = std::numeric_limits<double>::infinity();
              std::size_t points = 0;
              for (int i = 0; i <= 4; ++i) {
                for (int j = 0; j <= 4; ++j) {
                  for (int k = 1; k <= 9; ++k) {
                    const double am = 0.1 * i, ap = std::min(1.0, 0.6 + 0.1 * j), lam = 0.1 * k;
                    lowest = std::min(lowest, psi_gap(SmoothingParams::make(ap, am, lam)));
                    ++points;
                  }
                }
              }
              verdict("psi_gap_grid", lowest >= -1e-9,
                      std::to_string(points) + " grid points, minimum " + CsvWriter::format(lowest));
              o.metrics["psi_gap_grid"]["grid_size"] = points;
            }
            {
              Samples data(1, 300);
              std::mt19937_64 rng(3);
              std::normal_distribution<double> g(0.0, 1.5);
              for (Eigen::Index j = 0; j < data.cols(); ++j) data(0, j) = g(rng);
              GanArchitecture arch;
              arch.latent_dim = 2;
              arch.hidden = {8};
              const GanModel m = GanModel::init(arch, 1);
              bool exact = true;
              for (auto [t, r] : {std::pair{1, 1}, std::pair{40, 3}, std::pair{200, 2}}) {
                RedactionRunConfig rc;
                rc.train.epochs = 1;
                rc.train.k_g = 1;
                rc.rounds = r;
                rc.queries_per_round = t;
                const auto res = redact_validity_based(
                    m, data, [](PointView x) { return x[0] < 2.0; }, rc, {}, nullptr);
                exact = exact && res.query_count == 300u + static_cast<std::uint64_t>(t * r);
              }
              verdict("query_accounting", exact, "|X| + T*R over 3 settings");
            }
            return o;
          }};
}

}  // namespace redlab::cli
