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
#include <chrono>
#include <limits>
#include <numeric>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "redlab/exact_solver.hpp"

namespace redlab {
namespace {

SmoothingParams params(double ap = 0.9, double am = 0.1, double lam = 0.5, double tau = 0.5) {
  return SmoothingParams::make(ap, am, lam, tau);
}

// Per-atom maximizer of the smoothed integrand on a uniform D grid.
double grid_argmax(double real, double fake, const SmoothingParams& p, int points = 100000) {
  double best = -std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int k = 1; k < points; ++k) {
    const double d = static_cast<double>(k) / points;
    const double v = real * (p.alpha_plus() * std::log(d) + (1 - p.alpha_plus()) * std::log1p(-d)) +
                     fake * (p.alpha_minus() * std::log(d) + (1 - p.alpha_minus()) * std::log1p(-d));
    if (v > best) {
      best = v;
      arg = d;
    }
  }
  return arg;
}

DiscreteDistribution random_dist(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  for (auto& x : w) x = e(rng);
  return DiscreteDistribution::from_weights(w);
}

TEST(DiscriminatorTable, RejectsOutOfRange) {
  EXPECT_THROW(DiscriminatorTable({0.5, 1.2}), std::invalid_argument);
  EXPECT_THROW(DiscriminatorTable({-0.1}), std::invalid_argument);
}

TEST(LossValue, HalfEverywhere) {
  const auto p = DiscreteDistribution::from_probs({0.4, 0.3, 0.2, 0.1});
  const auto q = DiscreteDistribution::uniform(4);
  const DiscriminatorTable d({0.5, 0.5, 0.5, 0.5});
  EXPECT_NEAR(loss_value(p, q, d, params()), 2.0 * std::log(0.5), 1e-15);
}

TEST(LossValue, NoSmoothingIsPlainObjective) {
  const auto p = DiscreteDistribution::from_probs({0.4, 0.3, 0.2, 0.1});
  const auto q = DiscreteDistribution::from_probs({0.1, 0.2, 0.3, 0.4});
  const std::vector<double> dv{0.7, 0.6, 0.3, 0.2};
  double plain = 0.0;
  for (int i = 0; i < 4; ++i) plain += p[i] * std::log(dv[i]) + q[i] * std::log(1 - dv[i]);
  EXPECT_NEAR(loss_value(p, q, DiscriminatorTable(dv), params(1.0, 0.0)), plain, 1e-15);
}

TEST(LossValue, ResummationOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  const auto prm = params(0.85, 0.15, 0.6);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_dist(rng, 4);
    const auto q = random_dist(rng, 4);
    std::vector<double> dv(4);
    for (auto& x : dv) x = u(rng);
    long double want = 0.0L;
    for (int i = 0; i < 4; ++i) {
      const long double d = dv[i];
      want += p[i] * (0.85L * std::log(d) + 0.15L * std::log(1 - d));
      want += q[i] * (0.15L * std::log(d) + 0.85L * std::log(1 - d));
    }
    EXPECT_NEAR(loss_value(p, q, DiscriminatorTable(dv), prm), static_cast<double>(want), 1e-12);
  }
}

TEST(LossValue, LogOfZeroOnMassedAtom) {
  const auto p = DiscreteDistribution::from_probs({1.0, 0.0});
  const auto q = DiscreteDistribution::from_probs({0.0, 1.0});
  EXPECT_THROW(loss_value(p, q, DiscriminatorTable({0.0, 0.5}), params()), std::domain_error);
  EXPECT_THROW(loss_value(p, q, DiscriminatorTable({1.0, 0.5}), params()), std::domain_error);
  // Zero-weight atoms never reach the log.
  EXPECT_NO_THROW(loss_value(p, q, DiscriminatorTable({1.0, 0.0}), params(1.0, 0.0)));
}

TEST(OptimalDiscriminator, LimitsAndNeutralAtoms) {
  const auto prm = params(0.9, 0.1, 0.5);
  const auto real = DiscreteDistribution::from_probs({1.0, 0.0, 0.0});
  const auto g = DiscreteDistribution::from_probs({0.0, 1.0, 0.0});
  const auto w = DiscreteDistribution::from_probs({0.0, 1.0, 0.0});
  const auto d = optimal_discriminator(real, g, w, prm);
  EXPECT_DOUBLE_EQ(d[0], 0.9);
  EXPECT_DOUBLE_EQ(d[1], 0.1);
  EXPECT_DOUBLE_EQ(d[2], 0.5);
  ASSERT_EQ(d.neutral_atoms().size(), 1u);
  EXPECT_EQ(d.neutral_atoms()[0], 2u);
}

TEST(OptimalDiscriminator, GridOracleFourAtoms) {
  const auto prm = params(0.9, 0.1, 0.5);
  const auto data = DiscreteDistribution::from_probs({0.4, 0.3, 0.2, 0.1});
  const auto spec = DiscreteSpec::explicit_set({3});
  const auto r = restrict(data, spec);
  const auto g = DiscreteDistribution::uniform(4);
  const auto w = uniform_on(spec, 4);
  const auto d = optimal_discriminator(r, g, w, prm);
  for (std::size_t i = 0; i < 4; ++i) {
    const double fake = 0.5 * g[i] + 0.5 * w[i];
    EXPECT_NEAR(d[i], grid_argmax(r[i], fake, prm), 1e-4) << i;
    EXPECT_GE(d[i], prm.alpha_minus());
    EXPECT_LE(d[i], prm.alpha_plus());
  }
}

TEST(OptimalDiscriminator, BeatsPerturbedTables) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 0.05);
  const auto prm = params(0.8, 0.2, 0.7);
  const auto r = random_dist(rng, 6);
  const auto g = random_dist(rng, 6);
  const auto w = random_dist(rng, 6);
  const auto fake = fake_mixture(g, w, prm.lambda());
  const auto d = optimal_discriminator(r, g, w, prm);
  const double best = loss_value(r, fake, d, prm);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(d.values());
    for (auto& x : v) x = std::clamp(x + noise(rng), 1e-6, 1 - 1e-6);
    EXPECT_GE(best, loss_value(r, fake, DiscriminatorTable(v), prm));
  }
}

TEST(OptimalDiscriminator, MaxValueIsDivergencePlusOffset) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ap(0.55, 1.0), am(0.0, 0.45), l(0.05, 0.95);
  for (int t = 0; t < 200; ++t) {
    const auto prm = params(ap(rng), am(rng), l(rng));
    const auto r = random_dist(rng, 5);
    const auto g = random_dist(rng, 5);
    const auto w = random_dist(rng, 5);
    const auto fake = fake_mixture(g, w, prm.lambda());
    const double max_l = loss_value(r, fake, optimal_discriminator(r, g, w, prm), prm);
    const auto m = mixture_coefficients(prm);
    std::vector<double> pv(5), qv(5);
    for (std::size_t i = 0; i < 5; ++i) {
      pv[i] = m.beta[0] * r[i] + m.beta[1] * g[i] + m.beta[2] * w[i];
      qv[i] = m.gamma[0] * r[i] + m.gamma[1] * g[i] + m.gamma[2] * w[i];
    }
    const double div = f_divergence(DiscreteDistribution::from_weights(pv),
                                    DiscreteDistribution::from_weights(qv), prm);
    EXPECT_NEAR(max_l - prm.offset(), div, 1e-9);
  }
}

TEST(Guide, Branches) {
  const auto prm = params(0.9, 0.1, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(guide_value(0.8, 0.5, prm), 0.8);
  EXPECT_DOUBLE_EQ(guide_value(0.8, 0.0, prm), 0.1);
  EXPECT_DOUBLE_EQ(guide_value(0.3, 0.0, prm), 0.1);
  EXPECT_NEAR(guide_value(0.8, 0.2, prm), 0.24, 1e-15);
  const DiscriminatorTable d({0.8, 0.8, 0.8});
  const std::vector<double> f{0.9, 0.2, 0.0};
  const auto out = guide(d, f, prm);
  EXPECT_DOUBLE_EQ(out[0], 0.8);
  EXPECT_NEAR(out[1], 0.24, 1e-15);
  EXPECT_DOUBLE_EQ(out[2], 0.1);
  const std::vector<double> bad{0.5, 1.5, 0.2};
  EXPECT_THROW(guide(d, bad, prm), std::domain_error);
}

TEST(OptimalGuidedDiscriminator, AllValidAllFlagged) {
  std::mt19937_64 rng(51);
  const auto prm = params(0.9, 0.05, 0.8, 0.5);
  const auto r = random_dist(rng, 5), g = random_dist(rng, 5), w = random_dist(rng, 5);
  const std::vector<double> hi(5, 0.9), lo(5, 0.1);
  EXPECT_EQ(optimal_guided_discriminator(r, g, w, hi, prm).values(),
            optimal_discriminator(r, g, w, prm).values());
  const auto flagged = optimal_guided_discriminator(r, g, w, lo, prm);
  for (double v : flagged.values()) EXPECT_EQ(v, 0.05);
}

TEST(OptimalGuidedDiscriminator, FeasibleAndConsistent) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ap(0.55, 1.0), am(0.0, 0.45), l(0.05, 0.95), u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const auto prm = params(ap(rng), am(rng), l(rng), std::clamp(u(rng), 0.05, 0.95));
    const auto r = random_dist(rng, 6), g = random_dist(rng, 6), w = random_dist(rng, 6);
    std::vector<double> f(6);
    for (auto& x : f) x = u(rng);
    const auto dg = optimal_guided_discriminator(r, g, w, f, prm);
    const auto plain = optimal_discriminator(r, g, w, prm);
    const auto wrapped = guide(dg, f, prm);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_GE(dg[i], 0.0);
      EXPECT_LE(dg[i], 1.0);
      if (f[i] >= prm.tau()) {
        EXPECT_NEAR(wrapped[i], plain[i], 1e-12);
      } else {
        EXPECT_NEAR(wrapped[i], prm.alpha_minus(), 1e-15);
      }
    }
  }
}

TEST(SolveMinimax, EmptyOmegaRecoversData) {
  const auto data = DiscreteDistribution::from_probs({0.4, 0.3, 0.2, 0.1});
  const auto res = solve_minimax(data, DiscreteSpec::empty(), params(0.9, 0.1, 0.8));
  EXPECT_LE(total_variation(res.p_g_star, data), 1e-3);
}

TEST(SolveMinimax, FourAtomInstance) {
  const auto data = DiscreteDistribution::from_probs({0.4, 0.3, 0.2, 0.1});
  const auto spec = DiscreteSpec::explicit_set({3});
  const auto res = solve_minimax(data, spec, params(0.9, 0.1, 0.8));
  const auto want = DiscreteDistribution::from_probs({4.0 / 9, 3.0 / 9, 2.0 / 9, 0.0});
  EXPECT_LE(total_variation(res.p_g_star, want), 1e-3);
  EXPECT_LE(res.p_g_star[3], 1e-6);
  EXPECT_TRUE(res.converged);
}

TEST(SolveMinimax, RandomSixteenAtomInstances) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const auto data = random_dist(rng, 16);
    std::vector<std::size_t> idx(16);
    std::iota(idx.begin(), idx.end(), 0u);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto spec = DiscreteSpec::explicit_set({idx.begin(), idx.begin() + 4});
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = solve_minimax(data, spec, params(0.9, 0.1, 0.8));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LE(total_variation(res.p_g_star, restrict(data, spec)), 1e-3) << seed;
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(res.p_g_star[idx[i]], 1e-6);
    EXPECT_LT(secs, 1.0);
  }
}

TEST(SolveMinimax, ObjectiveTraceNonIncreasing) {
  std::mt19937_64 rng(77);
  const auto data = random_dist(rng, 8);
  const auto res = solve_minimax(data, DiscreteSpec::explicit_set({1, 6}), params(0.9, 0.1, 0.6));
  for (std::size_t i = 2; i < res.objective_trace.size(); ++i) {
    EXPECT_LE(res.objective_trace[i], res.objective_trace[i - 1] + 1e-9) << i;
  }
}

TEST(SolveMinimax, NonConvergenceIsFlagged) {
  const auto data = DiscreteDistribution::from_probs({0.4, 0.3, 0.2, 0.1});
  MinimaxConfig cfg;
  cfg.max_iters = 3;
  const auto res = solve_minimax(data, DiscreteSpec::explicit_set({3}), params(), cfg);
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.iterations, 3u);
  EXPECT_EQ(res.objective_trace.size(), 3u);
}

TEST(SolveMinimax, TraceCsv) {
  const auto data = DiscreteDistribution::from_probs({0.5, 0.5});
  MinimaxConfig cfg;
  cfg.max_iters = 2;
  const auto res = solve_minimax(data, DiscreteSpec::explicit_set({1}), params(), cfg);
  std::ostringstream os;
  write_minimax_trace(os, res);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "iteration,objective,tv_to_target");
}

}  // namespace
}  // namespace redlab
