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

#ifndef REDLAB_DIVERGENCE_HPP
#define REDLAB_DIVERGENCE_HPP

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "redlab/distributions.hpp"

namespace redlab {

/// Label-smoothing hyperparameters shared by the redaction objective.
///
/// alpha_plus is the soft target for real samples, alpha_minus the soft
/// target for fake samples, lambda the weight of the generator inside the
/// fake mixture and tau the classifier threshold. Construction through
/// make() enforces the strict inequalities alpha_plus > 1/2 > alpha_minus.
class SmoothingParams {
 public:
  static SmoothingParams make(double alpha_plus, double alpha_minus,
                              double lambda, double tau = 0.5) {
    if (!(alpha_plus > 0.5 && alpha_plus <= 1.0)) {
      throw std::invalid_argument("alpha_plus must lie in (1/2, 1], got " +
                                  std::to_string(alpha_plus));
    }
    if (!(alpha_minus >= 0.0 && alpha_minus < 0.5)) {
      throw std::invalid_argument("alpha_minus must lie in [0, 1/2), got " +
                                  std::to_string(alpha_minus));
    }
    if (!(lambda > 0.0 && lambda < 1.0)) {
      throw std::invalid_argument("lambda must lie in (0, 1), got " +
                                  std::to_string(lambda));
    }
    if (!(tau > 0.0 && tau < 1.0)) {
      throw std::invalid_argument("tau must lie in (0, 1), got " +
                                  std::to_string(tau));
    }
    return SmoothingParams(alpha_plus, alpha_minus, lambda, tau);
  }

  /// Test-only escape hatch: skips validation so the degenerate boundary
  /// alpha_plus = alpha_minus = 1/2 can be probed. Production code must use
  /// make().
  static SmoothingParams unchecked_for_testing(double alpha_plus,
                                               double alpha_minus,
                                               double lambda,
                                               double tau = 0.5) {
    return SmoothingParams(alpha_plus, alpha_minus, lambda, tau);
  }

  double alpha_plus() const { return alpha_plus_; }
  double alpha_minus() const { return alpha_minus_; }
  double lambda() const { return lambda_; }
  double tau() const { return tau_; }
  double alpha() const { return alpha_plus_ + alpha_minus_; }

  /// C = a log a + (2-a) log(2-a) - 2 log 2 with a = alpha().
  double offset() const {
    const double a = alpha();
    return a * std::log(a) + (2.0 - a) * std::log(2.0 - a) -
           2.0 * std::numbers::ln2;
  }

 private:
  SmoothingParams(double ap, double am, double lam, double tau)
      : alpha_plus_(ap), alpha_minus_(am), lambda_(lam), tau_(tau) {}

  double alpha_plus_;
  double alpha_minus_;
  double lambda_;
  double tau_;
};

/// Weights expressing P and Q of the equivalent f-GAN as mixtures of
/// (restricted data, generator, redaction distribution).
struct MixtureCoefficients {
  std::array<double, 3> beta{};
  std::array<double, 3> gamma{};

  /// beta_1/gamma_1 > beta_2/gamma_2 = beta_3/gamma_3, compared after
  /// cross-multiplication so gamma_1 = 0 (alpha_plus = 1) is handled.
  bool ordering_holds(double tol = 1e-9) const {
    const bool strict = beta[0] * gamma[1] > beta[1] * gamma[0];
    const bool equal = std::abs(beta[1] * gamma[2] - beta[2] * gamma[1]) <= tol;
    return strict && equal;
  }
};

inline MixtureCoefficients mixture_coefficients(const SmoothingParams& p) {
  const double a = p.alpha();
  const double ap = p.alpha_plus();
  const double am = p.alpha_minus();
  const double lam = p.lambda();
  MixtureCoefficients m;
  m.beta = {ap / a, am * lam / a, am * (1.0 - lam) / a};
  m.gamma = {(1.0 - ap) / (2.0 - a), (1.0 - am) * lam / (2.0 - a),
             (1.0 - am) * (1.0 - lam) / (2.0 - a)};
  return m;
}

/// The convex generator induced by label smoothing, phi(1) = 0.
///
/// Written in terms of d = u - 1 so that the two x log x terms cancel
/// analytically near u = 1:
///   phi = a d log(a/2) + a(1+d) log1p(d) - (2 + a d) log1p(a d / 2).
inline double phi(double u, const SmoothingParams& p) {
  if (!(u > 0.0)) {
    throw std::domain_error("phi: argument must be positive, got " +
                            std::to_string(u));
  }
  const double a = p.alpha();
  const double d = u - 1.0;
  return a * d * std::log(a / 2.0) + a * u * std::log1p(d) -
         (2.0 + a * d) * std::log1p(a * d / 2.0);
}

/// Right limit phi(0+) = -C, used for atoms where P vanishes but Q does not.
inline double phi_at_zero(const SmoothingParams& p) { return -p.offset(); }

inline double phi_prime(double u, const SmoothingParams& p) {
  if (!(u > 0.0)) {
    throw std::domain_error("phi_prime: argument must be positive, got " +
                            std::to_string(u));
  }
  const double a = p.alpha();
  return a * std::log(a * u / (a * u - a + 2.0));
}

/// Convex conjugate phi*(t) = -(2-a) log(1 - exp(t/a)) + C, defined for t < 0.
inline double phi_conjugate(double t, const SmoothingParams& p) {
  if (!(t < 0.0)) {
    throw std::domain_error("phi_conjugate: argument must be negative, got " +
                            std::to_string(t));
  }
  const double a = p.alpha();
  return -(2.0 - a) * std::log(-std::expm1(t / a)) + p.offset();
}

/// D_phi(P||Q) = sum_x Q(x) phi(P(x)/Q(x)).
inline double f_divergence(const DiscreteDistribution& p,
                           const DiscreteDistribution& q,
                           const SmoothingParams& params) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("f_divergence: support size mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (qi == 0.0) {
      if (pi > 0.0) {
        throw std::domain_error(
            "f_divergence: P not absolutely continuous w.r.t. Q at atom " +
            std::to_string(i));
      }
      continue;
    }
    total += pi == 0.0 ? qi * phi_at_zero(params) : qi * phi(pi / qi, params);
  }
  return total;
}

/// psi(beta_3/gamma_3) - psi((1-beta_3)/(1-gamma_3)) with psi(u) = phi(u)/u.
///
/// Nonnegativity of this gap is what makes the restricted data distribution
/// the optimal generator. When alpha_minus = 0 the first argument is 0 and
/// psi diverges to +infinity (phi(0+) = -C > 0), so +infinity is returned.
inline double psi_gap(const SmoothingParams& p) {
  const MixtureCoefficients m = mixture_coefficients(p);
  const double b3 = m.beta[2];
  const double g3 = m.gamma[2];
  if (b3 == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const auto psi = [&](double u) { return phi(u, p) / u; };
  return psi(b3 / g3) - psi((1.0 - b3) / (1.0 - g3));
}

}  // namespace redlab

#endif  // REDLAB_DIVERGENCE_HPP
