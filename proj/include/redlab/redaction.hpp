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

#ifndef REDLAB_REDACTION_HPP
#define REDLAB_REDACTION_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iostream>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "redlab/divergence.hpp"
#include "redlab/gan.hpp"

namespace redlab {

struct RedactionRunConfig {
  SmoothingParams smoothing = SmoothingParams::make(0.9, 0.05, 0.8);
  /// `epochs` is the training budget of the data- and classifier-based runs.
  TrainConfig train;
  GeneratorObjective objective = GeneratorObjective::NonSaturating;
  /// Validity-based rounds (R) and queries per round (T).
  int rounds = 1;
  int queries_per_round = 1;
  /// Classifier-based: generator draws screened per epoch for the pool.
  std::size_t pool_draws = 500;

  LabelTargets targets() const { return {smoothing.alpha_plus(), smoothing.alpha_minus()}; }

  void validate_validity() const {
    if (rounds < 1 || queries_per_round < 1) {
      throw std::invalid_argument("validity-based redaction needs R >= 1 and T >= 1");
    }
  }
};

/// Append-only set of points that failed the validity check when added.
class InvalidPool {
 public:
  explicit InvalidPool(int dim) : samples_(dim, 0) {}

  /// Adds x if v(x) is false and returns whether it was added.
  template <class Valid>
  bool offer(PointView x, const Valid& valid) {
    if (valid(x)) return false;
    push(x);
    return true;
  }

  /// Adds x, which the caller has already found invalid.
  void push(PointView x) {
    if (static_cast<Eigen::Index>(x.size()) != samples_.rows()) {
      throw std::invalid_argument("invalid pool: dimension mismatch");
    }
    if (used_ == samples_.cols()) samples_.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(16, 2 * used_));
    for (std::size_t r = 0; r < x.size(); ++r) samples_(static_cast<Eigen::Index>(r), used_) = x[r];
    ++used_;
  }

  std::size_t size() const { return static_cast<std::size_t>(used_); }
  bool empty() const { return used_ == 0; }
  Samples samples() const { return samples_.leftCols(used_); }

 private:
  Samples samples_;
  Eigen::Index used_ = 0;
};

struct RoundReport {
  std::size_t round = 0;  ///< 1-based
  std::uint64_t query_count = 0;
  std::size_t pool_size = 0;
  const GanModel& model;
};

using RoundObserver = std::function<void(const RoundReport&)>;

namespace detail {

inline Samples columns_where(const Samples& x, const std::function<bool(PointView)>& keep) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (keep(column(x, j))) idx.push_back(j);
  }
  Samples out(x.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = x.col(idx[i]);
  return out;
}

inline void notify(const RoundObserver& obs, std::size_t round, std::uint64_t queries,
                   std::size_t pool, const GanModel& m) {
  if (obs) obs(RoundReport{round, queries, pool, m});
}

}  // namespace detail

/// Data-based redaction: real batches come from data minus the given
/// Omega samples, fake slots mix G with a uniform draw from Omega.
inline GanModel redact_data_based(GanModel model, const Samples& data,
                                  const Samples& omega_samples, const RedactionRunConfig& cfg,
                                  const RoundObserver& observer = {}) {
  cfg.train.validate();
  if (omega_samples.cols() == 0) throw std::invalid_argument("data-based redaction: empty Omega");
  if (omega_samples.rows() != data.rows()) {
    throw std::invalid_argument("data-based redaction: dimension mismatch");
  }
  std::set<std::vector<double>> omega;
  for (Eigen::Index j = 0; j < omega_samples.cols(); ++j) {
    const auto c = column(omega_samples, j);
    omega.emplace(c.begin(), c.end());
  }
  const Samples real = detail::columns_where(
      data, [&](PointView x) { return !omega.contains(std::vector<double>(x.begin(), x.end())); });
  if (real.cols() == 0) throw std::invalid_argument("data-based redaction: empty real set");

  model.reset_optimizers();
  EpochOptions opt;
  opt.targets = cfg.targets();
  opt.objective = cfg.objective;
  opt.lambda = cfg.smoothing.lambda();
  opt.pool = &omega_samples;
  for (int e = 0; e < cfg.train.epochs; ++e) {
    train_epoch(model, real, cfg.train, opt);
    detail::notify(observer, static_cast<std::size_t>(e + 1), 0, omega.size(), model);
  }
  return model;
}

struct ValidityRedactionResult {
  GanModel model;
  std::uint64_t query_count = 0;
  std::vector<double> invalidity_per_round;  ///< invalid fraction of the T queried samples
  std::size_t pool_size = 0;
};

/// Validity-based redaction: R rounds, each querying v on T fresh
/// generator samples, growing the invalid pool and training one epoch.
inline ValidityRedactionResult redact_validity_based(
    GanModel model, const Samples& data, const std::function<bool(PointView)>& validity,
    const RedactionRunConfig& cfg, const RoundObserver& observer = {},
    std::ostream* warnings = &std::cerr) {
  cfg.train.validate();
  cfg.validate_validity();
  if (!validity) throw std::invalid_argument("validity-based redaction: empty validity function");
  ValidityRedactionResult res;
  std::uint64_t queries = 0;
  const auto v = [&](PointView x) {
    ++queries;
    return validity(x);
  };

  InvalidPool pool(static_cast<int>(data.rows()));
  std::vector<Eigen::Index> real_idx;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (!pool.offer(column(data, j), v)) real_idx.push_back(j);
  }
  if (real_idx.empty()) throw std::invalid_argument("validity-based redaction: empty real set");
  Samples real(data.rows(), static_cast<Eigen::Index>(real_idx.size()));
  for (std::size_t i = 0; i < real_idx.size(); ++i) {
    real.col(static_cast<Eigen::Index>(i)) = data.col(real_idx[i]);
  }

  model.reset_optimizers();
  EpochOptions opt;
  opt.targets = cfg.targets();
  opt.objective = cfg.objective;
  opt.lambda = cfg.smoothing.lambda();
  for (int r = 0; r < cfg.rounds; ++r) {
    const Samples drawn = generate(model, static_cast<std::size_t>(cfg.queries_per_round), model.rng);
    std::size_t invalid = 0;
    for (Eigen::Index j = 0; j < drawn.cols(); ++j) {
      if (pool.offer(column(drawn, j), v)) ++invalid;
    }
    res.invalidity_per_round.push_back(static_cast<double>(invalid) /
                                       static_cast<double>(drawn.cols()));
    if (pool.empty()) {
      if (warnings != nullptr) {
        *warnings << "warning: round " << r + 1 << " has no invalid samples; skipping training\n";
      }
    } else {
      const Samples omega = pool.samples();
      opt.pool = &omega;
      train_epoch(model, real, cfg.train, opt);
      opt.pool = nullptr;
    }
    detail::notify(observer, static_cast<std::size_t>(r + 1), queries, pool.size(), model);
  }
  res.query_count = queries;
  res.pool_size = pool.size();
  res.model = std::move(model);
  return res;
}

/// Classifier-based redaction: guided discriminator in both steps, real
/// batches from {f >= tau}, pool of data-invalid and freshly generated
/// invalid samples.
inline GanModel redact_classifier_based(GanModel model, const Samples& data,
                                        const ClassifierSet<PointView>& classifier,
                                        const RedactionRunConfig& cfg,
                                        const RoundObserver& observer = {}) {
  cfg.train.validate();
  if (!(classifier.tau > 0.0 && classifier.tau < 1.0)) {
    throw std::invalid_argument("classifier-based redaction: tau must lie in (0, 1)");
  }
  if (!classifier.score || !classifier.gradient) {
    throw std::invalid_argument("classifier-based redaction needs a score and its gradient");
  }
  const auto flagged = [&](PointView x) {
    const double f = classifier.score(x);
    if (!(f >= 0.0 && f <= 1.0)) throw std::domain_error("classifier score outside [0, 1]");
    return f < classifier.tau;
  };
  const Samples real = detail::columns_where(data, [&](PointView x) { return !flagged(x); });
  const Samples data_invalid = detail::columns_where(data, flagged);
  if (real.cols() == 0) throw std::invalid_argument("classifier-based redaction: empty real set");

  model.reset_optimizers();
  const Guide guide{classifier, cfg.smoothing.alpha_minus()};
  EpochOptions opt;
  opt.targets = cfg.targets();
  opt.objective = cfg.objective;
  opt.lambda = cfg.smoothing.lambda();
  opt.guide = &guide;
  for (int e = 0; e < cfg.train.epochs; ++e) {
    Samples pool = data_invalid;
    if (cfg.pool_draws > 0) {
      const Samples gen_invalid =
          detail::columns_where(generate(model, cfg.pool_draws, model.rng), flagged);
      pool.conservativeResize(Eigen::NoChange, data_invalid.cols() + gen_invalid.cols());
      pool.rightCols(gen_invalid.cols()) = gen_invalid;
    }
    opt.pool = &pool;
    train_epoch(model, real, cfg.train, opt);
    opt.pool = nullptr;
    detail::notify(observer, static_cast<std::size_t>(e + 1), 0,
                   static_cast<std::size_t>(pool.cols()), model);
  }
  return model;
}

/// Generator-only variant: D stays frozen and G is trained against the
/// guided, frozen discriminator for `generator_steps` Adam updates.
inline GanModel adversarial_variant(GanModel model, const ClassifierSet<PointView>& classifier,
                                    const RedactionRunConfig& cfg, int generator_steps) {
  cfg.train.validate();
  if (generator_steps < 0) throw std::invalid_argument("adversarial variant: negative step count");
  if (!classifier.score || !classifier.gradient) {
    throw std::invalid_argument("adversarial variant needs a classifier score and gradient");
  }
  model.reset_optimizers();
  const Guide guide{classifier, cfg.smoothing.alpha_minus()};
  EpochOptions opt;
  opt.targets = cfg.targets();
  opt.objective = cfg.objective;
  opt.guide = &guide;
  opt.update_discriminator = false;
  const AdamConfig adam = cfg.train.adam();
  for (int s = 0; s < generator_steps; ++s) {
    const double loss = generator_step(model, cfg.train.batch_size, adam, opt);
    detail::check_finite(loss, "generator", 0, static_cast<std::size_t>(s));
  }
  return model;
}

// --- Unions of redaction sets -----------------------------------------------------

/// Union of same-kind redaction sets: index union, pointwise min of
/// validity functions, pointwise min of classifier scores under one tau.
template <class Point>
RedactionSpec<Point> combine_specs(const std::vector<RedactionSpec<Point>>& specs) {
  if (specs.empty()) throw std::invalid_argument("combine_specs: no sets given");
  const auto& first = specs.front();
  for (const auto& s : specs) {
    if (s.variant().index() != first.variant().index()) {
      throw std::invalid_argument("combine_specs: cannot mix set descriptions");
    }
  }
  if (first.is_explicit()) {
    std::set<std::size_t> all;
    for (const auto& s : specs) {
      const auto& idx = std::get<ExplicitSet>(s.variant()).indices;
      all.insert(idx.begin(), idx.end());
    }
    return RedactionSpec<Point>::explicit_set({all.begin(), all.end()});
  }
  if (first.is_validity()) {
    std::vector<std::function<bool(Point)>> parts;
    for (const auto& s : specs) parts.push_back(std::get<ValiditySet<Point>>(s.variant()).valid);
    return RedactionSpec<Point>::validity([parts](Point x) {
      return std::all_of(parts.begin(), parts.end(), [&](const auto& v) { return v(x); });
    });
  }
  std::vector<ClassifierSet<Point>> parts;
  for (const auto& s : specs) parts.push_back(std::get<ClassifierSet<Point>>(s.variant()));
  const double tau = parts.front().tau;
  bool all_grad = true;
  for (const auto& p : parts) {
    if (p.tau != tau) throw std::invalid_argument("combine_specs: classifiers use different tau");
    all_grad = all_grad && static_cast<bool>(p.gradient);
  }
  const auto argmin = [parts](Point x) {
    std::size_t best = 0;
    double lo = parts[0].score(x);
    for (std::size_t k = 1; k < parts.size(); ++k) {
      const double f = parts[k].score(x);
      if (f < lo) {
        lo = f;
        best = k;
      }
    }
    return std::pair{best, lo};
  };
  std::function<void(Point, std::span<double>)> grad;
  if (all_grad) {
    grad = [parts, argmin](Point x, std::span<double> g) { parts[argmin(x).first].gradient(x, g); };
  }
  return RedactionSpec<Point>::classifier([argmin](Point x) { return argmin(x).second; }, tau,
                                          std::move(grad));
}

}  // namespace redlab

#endif  // REDLAB_REDACTION_HPP
