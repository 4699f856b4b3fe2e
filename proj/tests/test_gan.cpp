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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "redlab/evaluation.hpp"
#include "redlab/gan.hpp"
#include "redlab/toy.hpp"

namespace redlab {
namespace {

Samples small_data(std::uint64_t seed, std::size_t n = 256) {
  std::mt19937_64 rng(seed);
  return toy::two_mode_mixture().sample(n, rng).x;
}

GanArchitecture small_arch() {
  GanArchitecture a;
  a.latent_dim = 4;
  a.hidden = {16, 16};
  return a;
}

TEST(Gan, TrainingIsDeterministic) {
  const Samples data = small_data(3);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 17;
  const GanModel a = pretrain(data, cfg, small_arch());
  const GanModel b = pretrain(data, cfg, small_arch());
  EXPECT_TRUE(a.generator == b.generator);
  EXPECT_TRUE(a.discriminator == b.discriminator);
  EXPECT_EQ(a.g_opt, b.g_opt);
  EXPECT_EQ(a.d_loss_trace, b.d_loss_trace);
  cfg.seed = 18;
  const GanModel c = pretrain(data, cfg, small_arch());
  EXPECT_FALSE(a.generator == c.generator);
}

TEST(Gan, UpdateCountersFollowSchedule) {
  const Samples data = small_data(4, 640);
  TrainConfig cfg;
  cfg.k_g = 5;
  cfg.k_d = 2;
  GanModel m = GanModel::init(small_arch(), 1);
  train_epoch(m, data, cfg, EpochOptions{});
  EXPECT_EQ(m.counters.d_updates, 20u);
  EXPECT_EQ(m.counters.g_updates, 50u);
  EXPECT_EQ(m.d_loss_trace.size(), 1u);
  EpochOptions frozen;
  frozen.update_discriminator = false;
  const auto d_before = m.discriminator;
  train_epoch(m, data, cfg, frozen);
  EXPECT_EQ(m.counters.d_updates, 20u);
  EXPECT_EQ(m.counters.g_updates, 100u);
  EXPECT_TRUE(m.discriminator == d_before);
}

TEST(Gan, GenerateShapeAndRange) {
  GanModel m = GanModel::init(small_arch(), 2);
  std::mt19937_64 rng(5);
  const Samples x = generate(m, 7, rng);
  EXPECT_EQ(x.rows(), 1);
  EXPECT_EQ(x.cols(), 7);
  EXPECT_THROW(generate(m, 0, rng), std::invalid_argument);
  const Eigen::VectorXd d = discriminate(m, small_data(6));
  for (double v : d) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Gan, ZeroGeneratorWeightsEmitOutputBias) {
  GanModel m = GanModel::init(small_arch(), 3);
  std::fill(m.generator.params().begin(), m.generator.params().end(), 0.0);
  m.generator.bias(m.generator.num_layers() - 1)(0) = 1.25;
  std::mt19937_64 rng(1);
  const Samples x = generate(m, 50, rng);
  for (Eigen::Index j = 0; j < x.cols(); ++j) EXPECT_EQ(x(0, j), 1.25);
}

TEST(Gan, EmpiricalInvalidityWithinBinomialBand) {
  // Linear generator G(z) = z, so P(G(z) > 1) is the normal tail.
  GanArchitecture arch;
  arch.latent_dim = 1;
  arch.hidden = {};
  arch.activation = Activation::Identity;
  GanModel m = GanModel::init(arch, 1);
  m.generator.weight(0)(0, 0) = 1.0;
  m.generator.bias(0)(0) = 0.0;
  const auto omega = PointSpec::validity([](PointView x) { return x[0] <= 1.0; });
  const double p = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
  const std::size_t n = 50000;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const double est = empirical_invalidity(m, omega, n, seed);
    EXPECT_LE(std::abs(est - p), 3.0 * std::sqrt(p * (1 - p) / n)) << seed;
  }
}

TEST(Gan, NonFiniteLossRaises) {
  Samples data = small_data(7, 128);
  data(0, 5) = std::numeric_limits<double>::quiet_NaN();
  GanModel m = GanModel::init(small_arch(), 4);
  TrainConfig cfg;
  EXPECT_THROW(train_epoch(m, data, cfg, EpochOptions{}), TrainingDiverged);
}

TEST(Gan, ConfigValidation) {
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.adam_beta2 = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_THROW(pretrain(Samples(2, 10), TrainConfig{}, small_arch()), std::invalid_argument);
}

TEST(Gan, DiscriminatorLossGradientMatchesFiniteDifference) {
  GanModel m = GanModel::init(small_arch(), 9);
  const Samples real = small_data(8, 6);
  std::mt19937_64 rng(2);
  const Samples fake = generate(m, 6, rng);
  const LabelTargets t{0.9, 0.1};
  std::vector<double> grad(m.discriminator.num_params(), 0.0);
  discriminator_loss(m.discriminator, real, fake, t, nullptr, grad);
  MlpNetwork probe = m.discriminator;
  std::vector<double> scratch(probe.num_params());
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.num_params(); i += 7) {
    const double saved = probe.params()[i];
    probe.params()[i] = saved + h;
    const double up = discriminator_loss(probe, real, fake, t, nullptr, scratch);
    probe.params()[i] = saved - h;
    const double down = discriminator_loss(probe, real, fake, t, nullptr, scratch);
    probe.params()[i] = saved;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-6}));
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(Gan, TwoModePretrainingQuality) {
  std::vector<double> tv;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    std::mt19937_64 rng(seed);
    const Samples data = toy::two_mode_mixture().sample(2000, rng).x;
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.learning_rate = 2e-4;
    cfg.k_g = 1;
    cfg.seed = seed;
    const GanModel m = pretrain(data, cfg);
    std::mt19937_64 eval(99);
    tv.push_back(histogram_tv(generate(m, 20000, eval), data));
  }
  std::sort(tv.begin(), tv.end());
  EXPECT_LE(tv[1], 0.15) << tv[0] << " " << tv[1] << " " << tv[2];
}

}  // namespace
}  // namespace redlab
