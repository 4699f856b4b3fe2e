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

#include <cmath>
#include <random>
#include <vector>

#include "redlab/divergence.hpp"

namespace redlab {
namespace {

// Unsimplified generator and conjugate in long double; an independent
// evaluation path from the cancellation-free forms in the library.
long double offset_ld(long double a) {
  return a * std::log(a) + (2 - a) * std::log(2 - a) - 2 * std::log(2.0L);
}
long double phi_ld(long double u, long double a) {
  return a * u * std::log(a * u) - (a * u - a + 2) * std::log(a * u - a + 2) +
         (2 - a) * std::log(2 - a) - offset_ld(a);
}
long double conj_ld(long double t, long double a) {
  return -(2 - a) * std::log(1 - std::exp(t / a)) + offset_ld(a);
}

SmoothingParams params(double ap = 0.9, double am = 0.1, double lam = 0.8) {
  return SmoothingParams::make(ap, am, lam);
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n, bool allow_zero) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution zero(0.2);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) {
    x = allow_zero && zero(rng) ? 0.0 : e(rng);
    s += x;
  }
  if (s == 0.0) {
    w[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : w) x /= s;
  return w;
}

TEST(SmoothingParams, RejectsBoundaryValues) {
  EXPECT_THROW(SmoothingParams::make(0.5, 0.1, 0.5), std::invalid_argument);
  EXPECT_THROW(SmoothingParams::make(1.01, 0.1, 0.5), std::invalid_argument);
  EXPECT_THROW(SmoothingParams::make(0.9, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(SmoothingParams::make(0.9, -0.1, 0.5), std::invalid_argument);
  EXPECT_THROW(SmoothingParams::make(0.9, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(SmoothingParams::make(0.9, 0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(SmoothingParams::make(0.9, 0.1, 0.5, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(SmoothingParams::make(1.0, 0.0, 0.5));
}

TEST(SmoothingParams, DerivedAlphaInRange) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ap(0.5000001, 1.0), am(0.0, 0.4999999), l(0.01, 0.99);
  for (int i = 0; i < 200; ++i) {
    const auto p = SmoothingParams::make(ap(rng), am(rng), l(rng));
    EXPECT_GT(p.alpha(), 0.5);
    EXPECT_LT(p.alpha(), 1.5);
  }
}

TEST(Phi, VanishesAtOne) {
  for (double ap : {0.51, 0.7, 0.9, 1.0}) {
    for (double am : {0.0, 0.1, 0.3, 0.49}) {
      EXPECT_LE(std::abs(phi(1.0, params(ap, am))), 1e-12);
    }
  }
}

TEST(Phi, ConvexitySpotCheck) {
  const auto p = params(0.9, 0.1);
  EXPECT_GE(phi(0.5, p) + phi(1.5, p), 2.0 * phi(1.0, p));
}

TEST(Phi, MatchesExtendedPrecisionOracle) {
  const auto p = params(0.95, 0.05);
  // 40-digit evaluation of the unsimplified closed form.
  EXPECT_NEAR(phi(2.0, p), -0.52324814376454783652, 1e-14);
  for (double u : {0.01, 0.3, 0.999, 1.001, 2.5, 40.0}) {
    EXPECT_NEAR(phi(u, p), static_cast<double>(phi_ld(u, p.alpha())), 1e-12) << u;
  }
}

TEST(Phi, RejectsNonPositive) {
  EXPECT_THROW(phi(0.0, params()), std::domain_error);
  EXPECT_THROW(phi(-1.0, params()), std::domain_error);
  EXPECT_THROW(phi_prime(0.0, params()), std::domain_error);
}

TEST(Phi, RightLimitAtZero) {
  const auto p = params(0.8, 0.2);
  EXPECT_NEAR(phi(1e-12, p), phi_at_zero(p), 1e-9);
}

TEST(Phi, SecondDerivativePositive) {
  for (double am : {0.0, 0.2, 0.45}) {
    const auto p = params(0.9, am);
    const double a = p.alpha();
    for (double u : {0.1, 0.5, 1.0, 3.0, 10.0}) {
      const double h = 1e-4 * u;
      const double fd = (phi(u + h, p) - 2.0 * phi(u, p) + phi(u - h, p)) / (h * h);
      const double exact = a * (2.0 - a) / (u * (a * u - a + 2.0));
      EXPECT_GT(exact, 0.0);
      EXPECT_NEAR(fd / exact, 1.0, 1e-4) << "u=" << u;
    }
  }
}

TEST(PhiPrime, ValueAtOne) {
  const auto p = params(0.9, 0.1);
  EXPECT_DOUBLE_EQ(phi_prime(1.0, p), p.alpha() * std::log(p.alpha() / 2.0));
}

TEST(PhiPrime, CentralDifference) {
  const auto p = params(0.9, 0.1);
  const double h = 1e-5;
  for (double u : {0.5, 1.0, 2.0}) {
    const double fd = (phi(u + h, p) - phi(u - h, p)) / (2.0 * h);
    EXPECT_NEAR(fd, phi_prime(u, p), 1e-6);
  }
}

TEST(PhiPrime, MonotoneAndNegative) {
  const auto p = params(0.9, 0.1);
  EXPECT_GT(phi_prime(2.0, p), phi_prime(0.5, p));
  for (double u : {0.01, 1.0, 100.0}) EXPECT_LT(phi_prime(u, p), 0.0);
}

TEST(PhiConjugate, FenchelIdentity) {
  const auto p = params(0.9, 0.1);
  for (double u : {0.25, 1.0, 4.0}) {
    const double t = phi_prime(u, p);
    EXPECT_NEAR(phi_conjugate(t, p), u * t - phi(u, p), 1e-9);
  }
  const double t1 = phi_prime(1.0, p);
  EXPECT_NEAR(phi_conjugate(t1, p), t1, 1e-12);
}

TEST(PhiConjugate, FenchelIdentityDenseSweep) {
  for (double am : {0.0, 0.05, 0.25, 0.45}) {
    const auto p = params(0.95, am);
    for (int k = 0; k <= 400; ++k) {
      const double u = 0.1 * std::pow(100.0, k / 400.0);
      const double t = phi_prime(u, p);
      EXPECT_NEAR(phi_conjugate(t, p) + phi(u, p), u * t, 1e-9) << u;
    }
  }
}

TEST(PhiConjugate, MatchesExtendedPrecisionOracle) {
  const auto p = params(0.95, 0.05);
  EXPECT_NEAR(phi_conjugate(-1.0, p), -0.92761921573280872781, 1e-14);
  for (double t : {-5.0, -0.3, -1e-3}) {
    EXPECT_NEAR(phi_conjugate(t, p), static_cast<double>(conj_ld(t, p.alpha())), 1e-9) << t;
  }
}

TEST(PhiConjugate, RejectsNonNegative) {
  EXPECT_THROW(phi_conjugate(0.0, params()), std::domain_error);
  EXPECT_THROW(phi_conjugate(0.5, params()), std::domain_error);
}

TEST(FDivergence, ZeroOnIdenticalArguments) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto p = DiscreteDistribution::from_probs(random_simplex(rng, 7, true));
    EXPECT_NEAR(f_divergence(p, p, params()), 0.0, 1e-14);
  }
}

TEST(FDivergence, NonNegativeOnRandomPairs) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto p = DiscreteDistribution::from_probs(random_simplex(rng, 6, true));
    const auto q = DiscreteDistribution::from_probs(random_simplex(rng, 6, false));
    EXPECT_GE(f_divergence(p, q, params()), -1e-15);
  }
}

TEST(FDivergence, VariationalBound) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> tdist(-6.0, -0.01);
  const auto prm = params(0.9, 0.1);
  for (int i = 0; i < 100; ++i) {
    const auto pv = random_simplex(rng, 5, false);
    const auto qv = random_simplex(rng, 5, false);
    const auto p = DiscreteDistribution::from_probs(pv);
    const auto q = DiscreteDistribution::from_probs(qv);
    const double div = f_divergence(p, q, prm);
    double lower = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      const double t = tdist(rng);
      lower += pv[k] * t - qv[k] * phi_conjugate(t, prm);
    }
    EXPECT_LE(lower, div + 1e-12);
    double tight = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      const double t = phi_prime(pv[k] / qv[k], prm);
      tight += pv[k] * t - qv[k] * phi_conjugate(t, prm);
    }
    EXPECT_NEAR(tight, div, 1e-6);
  }
}

TEST(FDivergence, Errors) {
  const auto p = DiscreteDistribution::from_probs({0.5, 0.5});
  const auto q = DiscreteDistribution::from_probs({1.0, 0.0});
  const auto r = DiscreteDistribution::from_probs({0.2, 0.3, 0.5});
  EXPECT_THROW(f_divergence(p, q, params()), std::domain_error);
  EXPECT_THROW(f_divergence(p, r, params()), std::invalid_argument);
  // 0 log 0 convention where both vanish.
  EXPECT_NO_THROW(f_divergence(q, q, params()));
}

TEST(MixtureCoefficients, NoSmoothing) {
  const auto m = mixture_coefficients(params(1.0, 0.0, 0.3));
  EXPECT_DOUBLE_EQ(m.beta[0], 1.0);
  EXPECT_DOUBLE_EQ(m.beta[1], 0.0);
  EXPECT_DOUBLE_EQ(m.beta[2], 0.0);
}

TEST(MixtureCoefficients, DirectSubstitution) {
  const auto m = mixture_coefficients(params(0.9, 0.1, 0.5));
  EXPECT_NEAR(m.beta[0], 0.9, 1e-15);
  EXPECT_NEAR(m.beta[1], 0.05, 1e-15);
  EXPECT_NEAR(m.beta[2], 0.05, 1e-15);
  EXPECT_NEAR(m.gamma[0], 0.1, 1e-15);
  EXPECT_NEAR(m.gamma[1], 0.45, 1e-15);
  EXPECT_NEAR(m.gamma[2], 0.45, 1e-15);
}

TEST(MixtureCoefficients, SumsAndOrderingOnRandomParams) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ap(0.51, 1.0), am(0.0, 0.49), l(0.01, 0.99);
  for (int i = 0; i < 50; ++i) {
    const auto m = mixture_coefficients(params(ap(rng), am(rng), l(rng)));
    EXPECT_NEAR(m.beta[0] + m.beta[1] + m.beta[2], 1.0, 1e-12);
    EXPECT_NEAR(m.gamma[0] + m.gamma[1] + m.gamma[2], 1.0, 1e-12);
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(m.beta[k], 0.0);
      EXPECT_GE(m.gamma[k], 0.0);
    }
    EXPECT_TRUE(m.ordering_holds());
  }
}

TEST(PsiGap, VanishesAtDegenerateBoundary) {
  const auto p = SmoothingParams::unchecked_for_testing(0.5 + 1e-9, 0.5 - 1e-9, 0.5);
  // 40-digit value: 3.6968e-9.
  EXPECT_NEAR(psi_gap(p), 0.0, 1e-6);
  EXPECT_NEAR(psi_gap(p), 3.696784971e-9, 1e-11);
}

TEST(PsiGap, PositiveInInterior) {
  const double g = psi_gap(params(0.9, 0.1, 0.8));
  EXPECT_GT(g, 0.0);
  EXPECT_NEAR(g, 9.3317205810933294, 1e-9);
}

TEST(PsiGap, GridSweepNonNegative) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 4; ++i) {
    for (int j = 0; j <= 4; ++j) {
      for (int k = 1; k <= 9; ++k) {
        const double am = 0.1 * i;
        const double ap = 0.6 + 0.1 * j;
        const double g = psi_gap(params(ap, am, 0.1 * k));
        worst = std::min(worst, g);
        EXPECT_GE(g, -1e-9) << ap << " " << am << " " << 0.1 * k;
      }
    }
  }
  EXPECT_GT(worst, 0.0);
}

TEST(PsiGap, InfiniteWithoutNegativeSmoothing) {
  EXPECT_TRUE(std::isinf(psi_gap(params(0.9, 0.0, 0.5))));
}

}  // namespace
}  // namespace redlab
