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
#include <sstream>
#include <vector>

#include "redlab/dynamics.hpp"

namespace redlab {
namespace {

using Kind = XiCurve::Kind;

XiFamily default_family() {
  return XiFamily::make(XiCurve::make(Kind::Tanh, 0.9, 500.0),
                        XiCurve::make(Kind::Tanh, 0.5, 400.0));
}

TEST(Dynamics, SingleStepExample) {
  // At T = 100 the easy curve reads 0.5 and the hard curve 0.25.
  const double tau = 100.0 / std::atanh(0.5);
  const auto xi = XiFamily::make(XiCurve::make(Kind::Tanh, 1.0, tau),
                                 XiCurve::make(Kind::Tanh, 0.5, tau));
  const auto s = step(DynamicsState::initial(0.1, 0.05), xi, 100.0);
  EXPECT_NEAR(s.m_easy, 0.1 * (1.0 - 0.5 * 2.0 / 3.0), 1e-12);
  EXPECT_NEAR(s.m_hard, 0.05 * (1.0 - 0.25 / 3.0), 1e-12);
  EXPECT_NEAR(s.m_easy, 0.0667, 1e-4);
  EXPECT_NEAR(s.m_hard, 0.0458, 1e-4);
}

TEST(Dynamics, ZeroQueriesIsIdentity) {
  const auto s0 = DynamicsState::initial(0.3, 0.1);
  const auto s = step(s0, default_family(), 0.0);
  EXPECT_EQ(s.m_easy, s0.m_easy);
  EXPECT_EQ(s.m_hard, s0.m_hard);
}

TEST(Dynamics, NoHardMassDecaysAtEasyRate) {
  const auto xi = default_family();
  auto s = DynamicsState::initial(0.2, 0.0);
  for (int r = 0; r < 10; ++r) {
    const auto next = step(s, xi, 50.0);
    EXPECT_NEAR(next.m_easy, s.m_easy * (1.0 - xi.easy().value(50.0)), 1e-15);
    EXPECT_EQ(next.m_hard, 0.0);
    s = next;
  }
}

TEST(Dynamics, LongRunDrivesInvalidityToZero) {
  const auto traj = simulate(DynamicsState::initial(0.2, 0.1), default_family(), 100.0, 10000);
  EXPECT_LE(traj.back().invalidity(), 1e-6);
}

TEST(Dynamics, RatioStaysInsideBounds) {
  const auto xi = default_family();
  for (double t : {1.0, 10.0, 100.0, 500.0, 2000.0}) {
    const auto b = ratio_bounds(xi, t);
    EXPECT_LE(b.lower, b.upper);
    const auto traj = simulate(DynamicsState::initial(0.25, 0.05), xi, t, 200);
    for (std::size_t i = 1; i < traj.size(); ++i) {
      const double prev = traj[i - 1].invalidity();
      if (prev < 1e-250) break;
      const double ratio = traj[i].invalidity() / prev;
      EXPECT_GE(ratio, b.lower - 1e-12) << "T=" << t << " r=" << i;
      EXPECT_LE(ratio, b.upper + 1e-12) << "T=" << t << " r=" << i;
    }
  }
}

TEST(Dynamics, StateValidation) {
  EXPECT_THROW(DynamicsState::make(-0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(DynamicsState::make(0.7, 0.6), std::invalid_argument);
  EXPECT_THROW(DynamicsState::initial(0.1, 0.2), std::invalid_argument);
  EXPECT_THROW(step(DynamicsState::make(0.1, 0.0), default_family(), -1.0),
               std::invalid_argument);
}

TEST(XiFamily, Validation) {
  EXPECT_THROW(XiCurve::make(Kind::Tanh, 1.5, 10.0), std::invalid_argument);
  EXPECT_THROW(XiCurve::make(Kind::Tanh, 0.5, 0.0), std::invalid_argument);
  // Hard curve faster at the origin.
  EXPECT_THROW(XiFamily::make(XiCurve::make(Kind::Tanh, 0.5, 500.0),
                              XiCurve::make(Kind::Tanh, 0.9, 500.0)),
               std::invalid_argument);
  // Steeper start but the hard curve keeps rising longer: crossing derivatives.
  EXPECT_THROW(XiFamily::make(XiCurve::make(Kind::Tanh, 0.9, 300.0),
                              XiCurve::make(Kind::Tanh, 0.8, 600.0)),
               std::invalid_argument);
  EXPECT_THROW(XiFamily::make(XiCurve::make(Kind::Tanh, 0.9, 500.0),
                              XiCurve::make(Kind::Saturating, 0.5, 400.0)),
               std::invalid_argument);
}

TEST(XiFamily, DefaultEasyDerivativeDominates) {
  const auto xi = default_family();
  for (int k = 0; k <= 10000; ++k) {
    const double t = 0.5 * k;
    EXPECT_GT(xi.easy().derivative(t), xi.hard().derivative(t)) << t;
  }
}

TEST(XiConditions, CurvesPassBadCurvesFail) {
  for (Kind k : {Kind::Tanh, Kind::Saturating}) {
    const auto c = XiCurve::make(k, 0.7, 300.0);
    EXPECT_TRUE(check_xi_conditions([&](double t) { return c.value(t); }, 2000.0).ok());
  }
  const auto convex = check_xi_conditions([](double t) { return t * t * 1e-6; }, 100.0);
  EXPECT_TRUE(convex.zero_at_origin);
  EXPECT_TRUE(convex.increasing);
  EXPECT_FALSE(convex.concave);
  EXPECT_FALSE(check_xi_conditions([](double t) { return 0.1 + t * 1e-3; }, 10.0).zero_at_origin);
  EXPECT_FALSE(check_xi_conditions([](double t) { return -t; }, 10.0).increasing);
}

TEST(OptimalT, LowerRootMatchesReference) {
  const auto r = optimal_T_lower(XiCurve::make(Kind::Tanh, 0.9, 500.0), 1e5);
  EXPECT_NEAR(r.t, 547.77600907801084571, 1e-6);
  EXPECT_NEAR(r.objective, -0.0023174109320927577, 1e-12);
  EXPECT_LE(r.residual, 1e-10);
  EXPECT_NEAR(r.rounds, 1e5 / r.t, 1e-9);
}

TEST(OptimalT, UpperRootMatchesReference) {
  const auto r = optimal_T_upper(default_family(), 1e5);
  EXPECT_NEAR(r.t, 107.56100864005601425, 1e-6);
  EXPECT_NEAR(r.objective, -0.00075256826104041277, 1e-12);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(OptimalT, RootsBeatDenseGrid) {
  const auto xi = default_family();
  const auto lower = lower_curve(xi.easy());
  const auto upper = upper_curve(xi);
  const double tl = optimal_T_lower(xi.easy(), 1e5).t;
  const double tu = optimal_T_upper(xi, 1e5).t;
  for (int k = 1; k <= 10000; ++k) {
    const double t = 0.5 * k;
    EXPECT_LE(decay_objective(lower, tl), decay_objective(lower, t) + 1e-15) << t;
    EXPECT_LE(decay_objective(upper, tu), decay_objective(upper, t) + 1e-15) << t;
  }
}

TEST(OptimalT, TwinFamilyHalvesTheCurve) {
  const auto c = XiCurve::make(Kind::Tanh, 0.8, 250.0);
  const auto upper = upper_curve(XiFamily::twin(c));
  for (double t : {1.0, 50.0, 250.0, 1000.0}) {
    EXPECT_NEAR(upper(t).value, 0.5 * c.value(t), 1e-15);
    EXPECT_NEAR(upper(t).slope, 0.5 * c.derivative(t), 1e-15);
  }
}

TEST(OptimalT, SaturatingCurveHasNoRoot) {
  const auto c = XiCurve::make(Kind::Saturating, 0.9, 500.0);
  EXPECT_THROW(optimal_T_lower(c, 1e5), RootNotFound);
  try {
    optimal_T_lower(c, 1e5);
  } catch (const RootNotFound& e) {
    EXPECT_LT(e.lo, e.hi);
    EXPECT_NE(std::string(e.what()).find("no stationary point"), std::string::npos);
  }
}

TEST(BudgetSweep, RowsAndCsv) {
  const auto xi = default_family();
  const auto s0 = DynamicsState::initial(0.2, 0.1);
  const auto rows = budget_sweep(s0, xi, 1000.0, {10.0, 100.0, 300.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].rounds, 100u);
  EXPECT_EQ(rows[2].rounds, 3u);
  for (const auto& r : rows) {
    EXPECT_LE(r.lower_bound, r.final_invalidity + 1e-15);
    EXPECT_LE(r.final_invalidity, r.upper_bound + 1e-15);
  }
  std::ostringstream os;
  write_sweep_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "T,R,final_invalidity,lower_bound,upper_bound");
  EXPECT_THROW(budget_sweep(s0, xi, 100.0, {0.0}), std::invalid_argument);
}

}  // namespace
}  // namespace redlab
