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

#ifndef REDLAB_DYNAMICS_HPP
#define REDLAB_DYNAMICS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "redlab/csv.hpp"

namespace redlab {

/// One per-round improvement curve xi(T): the fraction of invalid mass
/// removed from a sample class when T validity queries are spent in a round.
///
/// Saturating: xi = c (1 - exp(-T / tau0)).
/// Tanh:       xi = c tanh(T / tau0).
///
/// Both satisfy xi(0) = 0, xi' > 0 and xi'' < 0 on T > 0. Only the tanh
/// curve gives an interior optimum of the per-query decay rate
/// log(1 - xi(T)) / T; for the saturating curve the rate is monotone in T
/// and the optimal-T search reports that no root exists.
struct XiCurve {
  enum class Kind { Saturating, Tanh };

  Kind kind = Kind::Tanh;
  double c = 0.9;
  double tau0 = 500.0;

  static XiCurve make(Kind kind, double c, double tau0) {
    if (!(c > 0.0 && c <= 1.0)) {
      throw std::invalid_argument("xi curve: c must lie in (0, 1]");
    }
    if (!(tau0 > 0.0)) throw std::invalid_argument("xi curve: tau0 must be positive");
    return {kind, c, tau0};
  }

  double value(double t) const {
    const double x = t / tau0;
    return kind == Kind::Saturating ? -c * std::expm1(-x) : c * std::tanh(x);
  }

  double derivative(double t) const {
    const double x = t / tau0;
    if (kind == Kind::Saturating) return c / tau0 * std::exp(-x);
    const double s = 1.0 / std::cosh(x);
    return c / tau0 * s * s;
  }

  double second_derivative(double t) const {
    const double x = t / tau0;
    if (kind == Kind::Saturating) return -c / (tau0 * tau0) * std::exp(-x);
    const double s = 1.0 / std::cosh(x);
    return -2.0 * c / (tau0 * tau0) * s * s * std::tanh(x);
  }
};

/// Easy and hard curves. Construction enforces xi_easy' > xi_hard' for all
/// T >= 0; for two curves of the same kind this holds exactly when
/// c_e / tau_e > c_h / tau_h and tau_e >= tau_h.
class XiFamily {
 public:
  static XiFamily make(XiCurve easy, XiCurve hard) {
    if (easy.kind != hard.kind) {
      throw std::invalid_argument("xi family: easy and hard curves must share a kind");
    }
    if (!(easy.c / easy.tau0 > hard.c / hard.tau0)) {
      throw std::invalid_argument(
          "xi family: need c_easy/tau_easy > c_hard/tau_hard");
    }
    if (!(easy.tau0 >= hard.tau0)) {
      throw std::invalid_argument("xi family: need tau_easy >= tau_hard");
    }
    return XiFamily(easy, hard);
  }

  /// Both curves identical; allowed only for algebraic checks of the
  /// upper-bound objective.
  static XiFamily twin(XiCurve curve) { return XiFamily(curve, curve); }

  const XiCurve& easy() const { return easy_; }
  const XiCurve& hard() const { return hard_; }

 private:
  XiFamily(XiCurve e, XiCurve h) : easy_(e), hard_(h) {}

  XiCurve easy_;
  XiCurve hard_;
};

struct XiConditionReport {
  bool zero_at_origin = false;
  bool increasing = false;
  bool concave = false;
  bool ok() const { return zero_at_origin && increasing && concave; }
};

/// Finite-difference check of xi(0) = 0, xi' > 0, xi'' < 0 on (0, t_max]
/// for an arbitrary curve.
inline XiConditionReport check_xi_conditions(
    const std::function<double(double)>& xi, double t_max,
    std::size_t points = 1000) {
  XiConditionReport r;
  r.zero_at_origin = std::abs(xi(0.0)) <= 1e-12;
  r.increasing = true;
  r.concave = true;
  for (std::size_t k = 1; k <= points; ++k) {
    const double t = t_max * static_cast<double>(k) / static_cast<double>(points);
    const double h = 1e-4 * t;
    const double d1 = (xi(t + h) - xi(t - h)) / (2.0 * h);
    const double d2 = (xi(t + h) - 2.0 * xi(t) + xi(t - h)) / (h * h);
    if (!(d1 > 0.0)) r.increasing = false;
    // Second differences lose precision once xi flattens; only flag
    // curvature that is clearly positive.
    if (d2 > 1e-6 * std::abs(d1) / t) r.concave = false;
  }
  return r;
}

/// Invalid mass split into easy-to-redact and hard-to-redact parts.
struct DynamicsState {
  double m_easy = 0.0;
  double m_hard = 0.0;

  double invalidity() const { return m_easy + m_hard; }

  static DynamicsState make(double m_easy, double m_hard) {
    if (!(m_easy >= 0.0 && m_easy <= 1.0 && m_hard >= 0.0 && m_hard <= 1.0)) {
      throw std::invalid_argument("dynamics state: masses must lie in [0, 1]");
    }
    if (m_easy + m_hard > 1.0) {
      throw std::invalid_argument("dynamics state: total mass exceeds 1");
    }
    return {m_easy, m_hard};
  }

  /// Initial condition: easy mass must dominate.
  static DynamicsState initial(double m_easy, double m_hard) {
    DynamicsState s = make(m_easy, m_hard);
    if (!(m_easy > m_hard)) {
      throw std::invalid_argument("dynamics state: need m_easy > m_hard initially");
    }
    return s;
  }
};

/// One round of the linear-in-m system:
///   m_easy <- m_easy (1 - xi_e(T) r),  m_hard <- m_hard (1 - xi_h(T) (1 - r)),
/// with r = m_easy / (m_easy + m_hard).
inline DynamicsState step(const DynamicsState& s, const XiFamily& xi, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("dynamics step: T must be >= 0");
  const double total = s.invalidity();
  if (total == 0.0) return s;
  const double ratio = s.m_easy / total;
  const double eta_easy = 1.0 - xi.easy().value(t) * ratio;
  const double eta_hard = 1.0 - xi.hard().value(t) * (1.0 - ratio);
  return {s.m_easy * eta_easy, s.m_hard * eta_hard};
}

inline std::vector<DynamicsState> simulate(const DynamicsState& s0,
                                           const XiFamily& xi, double t,
                                           std::size_t rounds) {
  std::vector<DynamicsState> traj;
  traj.reserve(rounds + 1);
  traj.push_back(s0);
  for (std::size_t i = 0; i < rounds; ++i) traj.push_back(step(traj.back(), xi, t));
  return traj;
}

/// Per-round ratio bounds [1 - xi_e, 1 - xi_e xi_h / (xi_e + xi_h)].
struct RatioBounds {
  double lower = 1.0;
  double upper = 1.0;
};

inline double harmonic_combination(double a, double b) {
  return (a + b) == 0.0 ? 0.0 : a * b / (a + b);
}

inline RatioBounds ratio_bounds(const XiFamily& xi, double t) {
  const double e = xi.easy().value(t);
  const double h = xi.hard().value(t);
  return {1.0 - e, 1.0 - harmonic_combination(e, h)};
}

// --- Optimal T -----------------------------------------------------------------

/// Value and slope of a decay curve chi(T).
struct CurvePoint {
  double value = 0.0;
  double slope = 0.0;
};

using DecayCurve = std::function<CurvePoint(double)>;

inline DecayCurve lower_curve(const XiCurve& easy) {
  return [easy](double t) { return CurvePoint{easy.value(t), easy.derivative(t)}; };
}

/// chi = xi_e xi_h / (xi_e + xi_h), chi' = (xi_e' xi_h^2 + xi_h' xi_e^2) / (xi_e + xi_h)^2.
inline DecayCurve upper_curve(const XiFamily& xi) {
  return [xi](double t) {
    const double e = xi.easy().value(t);
    const double h = xi.hard().value(t);
    const double de = xi.easy().derivative(t);
    const double dh = xi.hard().derivative(t);
    const double sum = e + h;
    return CurvePoint{harmonic_combination(e, h), (de * h * h + dh * e * e) / (sum * sum)};
  };
}

/// log(1 - chi(T)) / T: per-query log decay of the invalidity bound.
inline double decay_objective(const DecayCurve& curve, double t) {
  return std::log1p(-curve(t).value) / t;
}

/// Stationarity residual -T chi'(T) - (1 - chi) log(1 - chi).
inline double stationarity_residual(const DecayCurve& curve, double t) {
  const CurvePoint p = curve(t);
  return -t * p.slope - (1.0 - p.value) * std::log1p(-p.value);
}

class RootNotFound : public std::runtime_error {
 public:
  RootNotFound(double lo, double hi, double f_lo, double f_hi)
      : std::runtime_error(describe(lo, hi, f_lo, f_hi)),
        lo(lo), hi(hi), f_lo(f_lo), f_hi(f_hi) {}

  double lo, hi, f_lo, f_hi;

 private:
  static std::string describe(double lo, double hi, double f_lo, double f_hi) {
    std::ostringstream os;
    os << "no stationary point in bracket [" << lo << ", " << hi
       << "]: residual " << f_lo << " at lo, " << f_hi << " at hi";
    return os.str();
  }
};

struct OptimalT {
  double t = 0.0;
  double residual = 0.0;
  double objective = 0.0;
  double rounds = 0.0;  ///< budget / t
};

struct RootSearch {
  double t_min = 1e-3;
  double t_max = 1e7;
  std::size_t scan_points = 2000;
  std::size_t max_bisections = 200;
};

/// Stationary point of the decay objective: the first sign change of the
/// residual from negative (objective decreasing) to positive, located on a
/// log-spaced scan and refined by bisection.
inline OptimalT optimal_t(const DecayCurve& curve, double budget,
                          const RootSearch& search = {}) {
  if (!(budget > 0.0)) throw std::invalid_argument("optimal T: budget must be positive");
  const double log_lo = std::log(search.t_min);
  const double log_hi = std::log(search.t_max);
  double prev_t = search.t_min;
  double prev_f = stationarity_residual(curve, prev_t);
  double lo = 0.0, hi = 0.0;
  bool found = false;
  for (std::size_t k = 1; k < search.scan_points && !found; ++k) {
    const double t = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) /
                                           static_cast<double>(search.scan_points - 1));
    const double f = stationarity_residual(curve, t);
    if (prev_f < 0.0 && f >= 0.0) {
      lo = prev_t;
      hi = t;
      found = true;
    }
    prev_t = t;
    prev_f = f;
  }
  if (!found) {
    throw RootNotFound(search.t_min, search.t_max,
                       stationarity_residual(curve, search.t_min),
                       stationarity_residual(curve, search.t_max));
  }
  for (std::size_t i = 0; i < search.max_bisections && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (stationarity_residual(curve, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double f_lo = stationarity_residual(curve, lo);
  const double f_hi = stationarity_residual(curve, hi);
  const double t = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
  OptimalT out;
  out.t = t;
  out.residual = std::abs(stationarity_residual(curve, t));
  out.objective = decay_objective(curve, t);
  out.rounds = budget / t;
  return out;
}

inline OptimalT optimal_T_lower(const XiCurve& easy, double budget,
                                const RootSearch& search = {}) {
  return optimal_t(lower_curve(easy), budget, search);
}

inline OptimalT optimal_T_upper(const XiFamily& xi, double budget,
                                const RootSearch& search = {}) {
  return optimal_t(upper_curve(xi), budget, search);
}

struct SweepRow {
  double t = 0.0;
  std::size_t rounds = 0;
  double final_invalidity = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

/// For each T, spend the fixed query budget as R = floor(budget / T) rounds.
inline std::vector<SweepRow> budget_sweep(const DynamicsState& s0, const XiFamily& xi,
                                          double budget, const std::vector<double>& ts) {
  std::vector<SweepRow> rows;
  for (double t : ts) {
    if (!(t > 0.0)) throw std::invalid_argument("budget sweep: T must be positive");
    const auto rounds = static_cast<std::size_t>(std::floor(budget / t));
    DynamicsState s = s0;
    for (std::size_t i = 0; i < rounds; ++i) s = step(s, xi, t);
    const RatioBounds b = ratio_bounds(xi, t);
    const double r = static_cast<double>(rounds);
    rows.push_back({t, rounds, s.invalidity(), s0.invalidity() * std::pow(b.lower, r),
                    s0.invalidity() * std::pow(b.upper, r)});
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  CsvWriter csv(os, {"T", "R", "final_invalidity", "lower_bound", "upper_bound"});
  for (const auto& r : rows) {
    csv.row(r.t, r.rounds, r.final_invalidity, r.lower_bound, r.upper_bound);
  }
}

}  // namespace redlab

#endif  // REDLAB_DYNAMICS_HPP
