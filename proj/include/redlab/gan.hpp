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

#ifndef REDLAB_GAN_HPP
#define REDLAB_GAN_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "redlab/distributions.hpp"
#include "redlab/mlp.hpp"

namespace redlab {

/// Optimization settings shared by pre-training and redaction. Defaults are
/// the usual DCGAN values: Adam(2e-4, 0.5, 0.999), batch 64, K_D = 1, K_G = 5.
struct TrainConfig {
  double learning_rate = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  int batch_size = 64;
  int k_d = 1;
  int k_g = 5;
  int epochs = 200;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be positive");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
      throw std::invalid_argument("train: Adam betas must lie strictly inside (0, 1)");
    }
    if (batch_size <= 0 || k_d <= 0 || k_g <= 0 || epochs < 0) {
      throw std::invalid_argument("train: batch size, K_D, K_G must be positive");
    }
  }

  AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, 1e-8}; }
};

struct GanArchitecture {
  int data_dim = 1;
  int latent_dim = 8;
  std::vector<int> hidden = {64, 64};
  Activation activation = Activation::Tanh;
  OutputSquash generator_output = OutputSquash::Identity;
  /// Steep first-layer init for D over [input_lo, input_hi]; 0 keeps the
  /// plain uniform init. Same for G over the latent box when g_slope > 0.
  double d_slope = 0.0;
  double input_lo = -4.5;
  double input_hi = 4.5;
  double g_slope = 0.0;

  std::vector<int> generator_dims() const {
    std::vector<int> d{latent_dim};
    d.insert(d.end(), hidden.begin(), hidden.end());
    d.push_back(data_dim);
    return d;
  }
  std::vector<int> discriminator_dims() const {
    std::vector<int> d{data_dim};
    d.insert(d.end(), hidden.begin(), hidden.end());
    d.push_back(1);
    return d;
  }
};

/// Soft targets for real and fake samples.
struct LabelTargets {
  double real = 0.9;
  double fake = 0.1;
};

/// The generator either maximizes log D on its samples (non-saturating,
/// the usual practical choice) or minimizes the fake half of the objective
/// directly (minimax).
enum class GeneratorObjective : std::uint8_t { NonSaturating = 0, Minimax = 1 };

struct UpdateCounters {
  std::uint64_t d_updates = 0;
  std::uint64_t g_updates = 0;
  friend bool operator==(const UpdateCounters&, const UpdateCounters&) = default;
};

/// Generator and discriminator together with their optimizer state and RNG.
struct GanModel {
  MlpNetwork generator;
  MlpNetwork discriminator;
  AdamState g_opt;
  AdamState d_opt;
  int latent_dim = 8;
  std::uint64_t seed = 0;
  std::mt19937_64 rng;
  UpdateCounters counters;
  std::vector<double> d_loss_trace;  ///< mean discriminator loss per epoch
  std::vector<double> g_loss_trace;  ///< mean generator loss per epoch

  static GanModel init(const GanArchitecture& arch, std::uint64_t seed) {
    GanModel m;
    m.generator = MlpNetwork(arch.generator_dims(), arch.activation, arch.generator_output);
    m.discriminator =
        MlpNetwork(arch.discriminator_dims(), arch.activation, OutputSquash::Sigmoid);
    m.latent_dim = arch.latent_dim;
    m.seed = seed;
    m.rng.seed(seed);
    m.generator.init_uniform(m.rng);
    m.discriminator.init_uniform(m.rng);
    if (arch.d_slope > 0.0) {
      m.discriminator.spread_first_layer(m.rng, arch.input_lo, arch.input_hi, arch.d_slope);
    }
    if (arch.g_slope > 0.0) m.generator.spread_first_layer(m.rng, -2.0, 2.0, arch.g_slope);
    m.reset_optimizers();
    return m;
  }

  void reset_optimizers() {
    g_opt = AdamState(generator.num_params());
    d_opt = AdamState(discriminator.num_params());
  }

  int data_dim() const { return generator.output_dim(); }
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- Sampling ---------------------------------------------------------------------

inline Eigen::MatrixXd sample_latents(int latent_dim, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(latent_dim, static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = normal(rng);
  return z;
}

inline Samples generate_from_latents(const GanModel& m, const Eigen::MatrixXd& z) {
  return m.generator.forward(z);
}

/// n samples of G(z), z ~ N(0, I), drawn with the caller's RNG.
inline Samples generate(const GanModel& m, std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw std::invalid_argument("generate: n must be >= 1");
  return generate_from_latents(m, sample_latents(m.latent_dim, n, rng));
}

/// Discriminator probabilities D(x), one per column.
inline Eigen::VectorXd discriminate(const GanModel& m, const Samples& x) {
  return m.discriminator.forward(x).row(0).transpose();
}

// --- Guided losses ------------------------------------------------------------------

/// Classifier guide around D: for f(x) < tau the output becomes
/// a- + (D(x) - a-) f(x).
struct Guide {
  ClassifierSet<PointView> classifier;
  double alpha_minus = 0.05;
};

struct SampleLoss {
  double loss = 0.0;
  double d_logit = 0.0;  ///< d loss / d logit
  double d_score = 0.0;  ///< d loss / d f(x); zero on the unguided branch
};

namespace detail {

constexpr double kProbClamp = 1e-12;

/// Binary cross-entropy of (optionally guided) D against a soft target.
inline SampleLoss soft_bce(double logit, double target, const Guide* guide,
                           std::optional<double> score) {
  SampleLoss out;
  if (guide == nullptr || !score || *score >= guide->classifier.tau) {
    out.loss = target * softplus(-logit) + (1.0 - target) * softplus(logit);
    out.d_logit = stable_sigmoid(logit) - target;
    return out;
  }
  const double f = *score;
  const double d = stable_sigmoid(logit);
  const double am = guide->alpha_minus;
  const double raw = am + (d - am) * f;
  const double g = std::clamp(raw, kProbClamp, 1.0 - kProbClamp);
  const bool clamped = g != raw;
  out.loss = -(target * std::log(g) + (1.0 - target) * std::log1p(-g));
  const double dl_dg = clamped ? 0.0 : -target / g + (1.0 - target) / (1.0 - g);
  out.d_logit = dl_dg * f * d * (1.0 - d);
  out.d_score = dl_dg * (d - am);
  return out;
}

inline std::vector<std::optional<double>> scores_of(const Samples& x, const Guide* guide) {
  std::vector<std::optional<double>> s(static_cast<std::size_t>(x.cols()));
  if (guide == nullptr) return s;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double f = guide->classifier.score(column(x, j));
    if (!(f >= 0.0 && f <= 1.0)) {
      throw std::domain_error("classifier score outside [0, 1]");
    }
    s[static_cast<std::size_t>(j)] = f;
  }
  return s;
}

}  // namespace detail

/// Mean BCE of D on the real batch (target real) plus mean BCE on the fake
/// batch (target fake), i.e. minus the smoothed objective. Parameter
/// gradients are accumulated into grad.
inline double discriminator_loss(const MlpNetwork& d, const Samples& real,
                                 const Samples& fake, const LabelTargets& targets,
                                 const Guide* guide, std::vector<double>& grad) {
  double total = 0.0;
  const auto half = [&](const Samples& x, double target) {
    if (x.cols() == 0) return;
    const auto cache = d.forward_cached(x);
    const auto scores = detail::scores_of(x, guide);
    const double inv_n = 1.0 / static_cast<double>(x.cols());
    Eigen::MatrixXd g_logit(1, x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const SampleLoss s = detail::soft_bce(cache.pre.back()(0, j), target, guide,
                                            scores[static_cast<std::size_t>(j)]);
      total += s.loss * inv_n;
      g_logit(0, j) = s.d_logit * inv_n;
    }
    d.backward(cache, g_logit, grad);
  };
  half(real, targets.real);
  half(fake, targets.fake);
  return total;
}

struct GeneratorOutputLoss {
  double loss = 0.0;
  Samples grad_x;  ///< d loss / d x, same shape as x
};

/// Generator loss on already generated points x and its gradient with
/// respect to x, flowing through D and (when guided) through the classifier.
inline GeneratorOutputLoss generator_output_loss(const MlpNetwork& d, const Samples& x,
                                                 const Guide* guide,
                                                 GeneratorObjective objective,
                                                 const LabelTargets& targets) {
  const auto cache = d.forward_cached(x);
  const auto scores = detail::scores_of(x, guide);
  const double inv_n = 1.0 / static_cast<double>(x.cols());
  // Non-saturating: minimize BCE against 1. Minimax: minimize the fake
  // term of the objective, i.e. maximize BCE against the fake target.
  const double target = objective == GeneratorObjective::NonSaturating ? 1.0 : targets.fake;
  const double sign = objective == GeneratorObjective::NonSaturating ? 1.0 : -1.0;
  GeneratorOutputLoss out;
  Eigen::MatrixXd g_logit(1, x.cols());
  Eigen::VectorXd d_score(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const SampleLoss s = detail::soft_bce(cache.pre.back()(0, j), target, guide,
                                          scores[static_cast<std::size_t>(j)]);
    out.loss += sign * s.loss * inv_n;
    g_logit(0, j) = sign * s.d_logit * inv_n;
    d_score(j) = sign * s.d_score * inv_n;
  }
  std::vector<double> unused(d.num_params(), 0.0);
  out.grad_x = d.backward(cache, g_logit, unused);
  if (guide != nullptr) {
    if (!guide->classifier.gradient) {
      throw std::invalid_argument("guided generator loss needs a classifier gradient");
    }
    std::vector<double> gf(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (d_score(j) == 0.0) continue;
      guide->classifier.gradient(column(x, j), gf);
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        out.grad_x(r, j) += d_score(j) * gf[static_cast<std::size_t>(r)];
      }
    }
  }
  return out;
}

// --- Training ---------------------------------------------------------------------

/// How one epoch builds its batches and which losses it optimizes.
struct EpochOptions {
  LabelTargets targets;
  const Guide* guide = nullptr;
  GeneratorObjective objective = GeneratorObjective::NonSaturating;
  bool update_discriminator = true;
  /// Each fake slot is a generator sample with probability lambda and a
  /// uniform draw from pool otherwise. With no pool every slot is generated.
  double lambda = 1.0;
  const Samples* pool = nullptr;
};

struct EpochStats {
  double d_loss = 0.0;
  double g_loss = 0.0;
  std::size_t batches = 0;
};

namespace detail {

inline Samples fake_batch(GanModel& m, Eigen::Index size, const EpochOptions& opt) {
  const bool use_pool = opt.pool != nullptr && opt.pool->cols() > 0 && opt.lambda < 1.0;
  std::vector<Eigen::Index> pool_index(static_cast<std::size_t>(size), -1);
  Eigen::Index n_gen = size;
  if (use_pool) {
    std::bernoulli_distribution from_generator(opt.lambda);
    std::uniform_int_distribution<Eigen::Index> pick(0, opt.pool->cols() - 1);
    n_gen = 0;
    for (auto& idx : pool_index) {
      if (from_generator(m.rng)) {
        ++n_gen;
      } else {
        idx = pick(m.rng);
      }
    }
  }
  Samples gen;
  if (n_gen > 0) gen = generate(m, static_cast<std::size_t>(n_gen), m.rng);
  Samples out(m.data_dim(), size);
  Eigen::Index next_gen = 0;
  for (Eigen::Index j = 0; j < size; ++j) {
    const Eigen::Index idx = pool_index[static_cast<std::size_t>(j)];
    if (idx < 0) {
      out.col(j) = gen.col(next_gen++);
    } else {
      out.col(j) = opt.pool->col(idx);
    }
  }
  return out;
}

inline void check_finite(double v, const char* what, std::size_t epoch, std::size_t batch) {
  if (!std::isfinite(v)) {
    throw TrainingDiverged(std::string(what) + " loss is not finite at epoch " +
                           std::to_string(epoch) + ", batch " + std::to_string(batch));
  }
}

}  // namespace detail

/// One discriminator update on (real, freshly built fake batch).
inline double discriminator_step(GanModel& m, const Samples& real, const AdamConfig& adam,
                                 const EpochOptions& opt) {
  const Samples fake = detail::fake_batch(m, real.cols(), opt);
  std::vector<double> grad(m.discriminator.num_params(), 0.0);
  const double loss = discriminator_loss(m.discriminator, real, fake, opt.targets, opt.guide, grad);
  adam_step(m.discriminator.params(), grad, m.d_opt, adam);
  ++m.counters.d_updates;
  return loss;
}

/// One generator update on a batch of fresh latents.
inline double generator_step(GanModel& m, Eigen::Index batch, const AdamConfig& adam,
                             const EpochOptions& opt) {
  const Eigen::MatrixXd z = sample_latents(m.latent_dim, static_cast<std::size_t>(batch), m.rng);
  const auto cache = m.generator.forward_cached(z);
  const GeneratorOutputLoss l =
      generator_output_loss(m.discriminator, cache.output, opt.guide, opt.objective, opt.targets);
  std::vector<double> grad(m.generator.num_params(), 0.0);
  m.generator.backward(cache, m.generator.output_grad_to_pre(cache, l.grad_x), grad);
  adam_step(m.generator.params(), grad, m.g_opt, adam);
  ++m.counters.g_updates;
  return l.loss;
}

/// One pass over the real set in shuffled minibatches; K_D discriminator
/// updates then K_G generator updates per minibatch.
inline EpochStats train_epoch(GanModel& m, const Samples& real, const TrainConfig& cfg,
                              const EpochOptions& opt) {
  cfg.validate();
  if (real.cols() == 0) throw std::invalid_argument("train_epoch: empty real set");
  if (real.rows() != m.data_dim()) throw std::invalid_argument("train_epoch: dimension mismatch");
  const AdamConfig adam = cfg.adam();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(real.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), m.rng);

  EpochStats stats;
  const Eigen::Index b = cfg.batch_size;
  const std::size_t epoch = m.d_loss_trace.size();
  for (Eigen::Index start = 0; start < real.cols(); start += b) {
    const Eigen::Index size = std::min(b, real.cols() - start);
    Samples batch(real.rows(), size);
    for (Eigen::Index j = 0; j < size; ++j) {
      batch.col(j) = real.col(order[static_cast<std::size_t>(start + j)]);
    }
    double d_loss = 0.0;
    if (opt.update_discriminator) {
      for (int k = 0; k < cfg.k_d; ++k) d_loss += discriminator_step(m, batch, adam, opt);
      d_loss /= cfg.k_d;
    }
    double g_loss = 0.0;
    for (int k = 0; k < cfg.k_g; ++k) g_loss += generator_step(m, size, adam, opt);
    g_loss /= cfg.k_g;
    detail::check_finite(d_loss, "discriminator", epoch, stats.batches);
    detail::check_finite(g_loss, "generator", epoch, stats.batches);
    stats.d_loss += d_loss;
    stats.g_loss += g_loss;
    ++stats.batches;
  }
  stats.d_loss /= static_cast<double>(stats.batches);
  stats.g_loss /= static_cast<double>(stats.batches);
  m.d_loss_trace.push_back(stats.d_loss);
  m.g_loss_trace.push_back(stats.g_loss);
  return stats;
}

/// Label-smoothed GAN training from scratch.
inline GanModel pretrain(const Samples& data, const TrainConfig& cfg,
                         const GanArchitecture& arch = {},
                         const LabelTargets& targets = {0.9, 0.1}) {
  cfg.validate();
  if (data.cols() == 0) throw std::invalid_argument("pretrain: empty data set");
  if (data.rows() != arch.data_dim) {
    throw std::invalid_argument("pretrain: data dimension does not match architecture");
  }
  GanModel m = GanModel::init(arch, cfg.seed);
  EpochOptions opt;
  opt.targets = targets;
  for (int e = 0; e < cfg.epochs; ++e) train_epoch(m, data, cfg, opt);
  return m;
}

}  // namespace redlab

#endif  // REDLAB_GAN_HPP
