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

#ifndef REDLAB_EXACT_SOLVER_HPP
#define REDLAB_EXACT_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "redlab/csv.hpp"
#include "redlab/distributions.hpp"
#include "redlab/divergence.hpp"

namespace redlab {

/// Discriminator values on a finite support, each in [0, 1].
class DiscriminatorTable {
 public:
  DiscriminatorTable() = default;
  explicit DiscriminatorTable(std::vector<double> values,
                              std::vector<std::size_t> neutral_atoms = {})
      : values_(std::move(values)), neutral_(std::move(neutral_atoms)) {
    for (double v : values_) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("discriminator value outside [0, 1]: " +
                                    std::to_string(v));
      }
    }
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  /// Atoms where the closed form was undefined (no mass anywhere) and the
  /// neutral value (alpha_plus + alpha_minus) / 2 was substituted.
  const std::vector<std::size_t>& neutral_atoms() const { return neutral_; }

 private:
  std::vector<double> values_;
  std::vector<std::size_t> neutral_;
};

namespace detail {

// w * log(x), with the convention 0 * log(anything) = 0.
inline double weighted_log(double w, double x, const char* what) {
  if (w == 0.0) return 0.0;
  if (!(x > 0.0)) {
    throw std::domain_error(std::string("loss_value: log of zero in ") + what);
  }
  return w * std::log(x);
}

// a log D + (1 - a) log(1 - D): the per-sample objective for soft target a.
inline double soft_log_likelihood(double target, double d) {
  return weighted_log(target, d, "log D") +
         weighted_log(1.0 - target, 1.0 - d, "log(1-D)");
}

}  // namespace detail

/// Label-smoothed objective: real atoms scored against alpha_plus, fake
/// atoms against alpha_minus.
inline double loss_value(const DiscreteDistribution& p_real,
                         const DiscreteDistribution& p_fake,
                         const DiscriminatorTable& d,
                         const SmoothingParams& params) {
  if (p_real.size() != p_fake.size() || p_real.size() != d.size()) {
    throw std::invalid_argument("loss_value: support size mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (p_real[i] > 0.0) {
      total += p_real[i] * detail::soft_log_likelihood(params.alpha_plus(), d[i]);
    }
    if (p_fake[i] > 0.0) {
      total += p_fake[i] * detail::soft_log_likelihood(params.alpha_minus(), d[i]);
    }
  }
  return total;
}

namespace detail {

// (a+ real + a- fake) / (real + fake) atomwise; neutral value where both vanish.
inline DiscriminatorTable closed_form_discriminator(
    const DiscreteDistribution& real, std::span<const double> fake,
    const SmoothingParams& params) {
  const double ap = params.alpha_plus();
  const double am = params.alpha_minus();
  std::vector<double> values(real.size());
  std::vector<std::size_t> neutral;
  for (std::size_t i = 0; i < real.size(); ++i) {
    const double denom = real[i] + fake[i];
    if (denom > 0.0) {
      values[i] = std::clamp((ap * real[i] + am * fake[i]) / denom, am, ap);
    } else {
      values[i] = 0.5 * (ap + am);
      neutral.push_back(i);
    }
  }
  return DiscriminatorTable(std::move(values), std::move(neutral));
}

}  // namespace detail

/// Closed-form maximizer of the smoothed objective for fixed generator:
///   D* = (a+ r + a- (lam g + (1-lam) w)) / (r + lam g + (1-lam) w).
inline DiscriminatorTable optimal_discriminator(
    const DiscreteDistribution& p_restricted, const DiscreteDistribution& p_g,
    const DiscreteDistribution& p_omega, const SmoothingParams& params) {
  const std::size_t n = p_restricted.size();
  if (p_g.size() != n || p_omega.size() != n) {
    throw std::invalid_argument("optimal_discriminator: support size mismatch");
  }
  const double lam = params.lambda();
  std::vector<double> fake(n);
  for (std::size_t i = 0; i < n; ++i) {
    fake[i] = lam * p_g[i] + (1.0 - lam) * p_omega[i];
  }
  return detail::closed_form_discriminator(p_restricted, fake, params);
}

/// guide(D, f)(x) = D(x) if f(x) >= tau, else a- + (D(x) - a-) f(x).
inline double guide_value(double d, double f, const SmoothingParams& params) {
  if (f >= params.tau()) return d;
  return params.alpha_minus() + (d - params.alpha_minus()) * f;
}

inline DiscriminatorTable guide(const DiscriminatorTable& d,
                                std::span<const double> f_scores,
                                const SmoothingParams& params) {
  if (f_scores.size() != d.size()) {
    throw std::invalid_argument("guide: score vector size mismatch");
  }
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double f = f_scores[i];
    if (!(f >= 0.0 && f <= 1.0)) {
      throw std::domain_error("guide: classifier score outside [0, 1]");
    }
    out[i] = guide_value(d[i], f, params);
  }
  return DiscriminatorTable(std::move(out), d.neutral_atoms());
}

/// Optimal discriminator under the guide: the closed form where f >= tau and
/// alpha_minus where the classifier flags the atom.
inline DiscriminatorTable optimal_guided_discriminator(
    const DiscreteDistribution& p_restricted, const DiscreteDistribution& p_g,
    const DiscreteDistribution& p_omega, std::span<const double> f_scores,
    const SmoothingParams& params) {
  const DiscriminatorTable base =
      optimal_discriminator(p_restricted, p_g, p_omega, params);
  if (f_scores.size() != base.size()) {
    throw std::invalid_argument(
        "optimal_guided_discriminator: score vector size mismatch");
  }
  std::vector<double> out(base.values());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (f_scores[i] < params.tau()) out[i] = params.alpha_minus();
  }
  return DiscriminatorTable(std::move(out), base.neutral_atoms());
}

// --- Minimax verification ---------------------------------------------------

struct MinimaxConfig {
  double step_size = 0.5;
  std::size_t max_iters = 10000;
  double tol = 1e-10;
  /// Clamp applied to D before taking logs.
  double clamp = 1e-12;
  /// Starting generator; uniform when unset.
  std::optional<DiscreteDistribution> init;
};

struct MinimaxResult {
  DiscreteDistribution p_g_star = DiscreteDistribution::uniform(1);
  DiscriminatorTable d_star;
  DiscreteDistribution target = DiscreteDistribution::uniform(1);
  std::vector<double> objective_trace;
  std::vector<double> tv_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline bool omega_is_empty(const DiscreteSpec& omega, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (omega.contains(i)) return false;
  }
  return true;
}

inline DiscriminatorTable clamp_table(const DiscriminatorTable& d, double eps) {
  std::vector<double> v(d.values());
  for (double& x : v) x = std::clamp(x, eps, 1.0 - eps);
  return DiscriminatorTable(std::move(v), d.neutral_atoms());
}

}  // namespace detail

/// Best-response dynamics for min_G max_D of the smoothed objective.
///
/// The inner maximization uses the closed-form discriminator; the outer
/// step is exponentiated-gradient descent on p_G. By the envelope theorem
/// the gradient with respect to p_G(x) is lam * h(D*(x)) with
/// h(D) = a- log D + (1 - a-) log(1 - D). With an empty Omega the fake
/// distribution is p_G itself (lam is not used).
inline MinimaxResult solve_minimax(const DiscreteDistribution& p_data,
                                   const DiscreteSpec& omega,
                                   const SmoothingParams& params,
                                   const MinimaxConfig& cfg = {}) {
  const std::size_t n = p_data.size();
  const DiscreteDistribution target = restrict(p_data, omega);
  const bool no_omega = detail::omega_is_empty(omega, n);
  const DiscreteDistribution p_omega =
      no_omega ? DiscreteDistribution::uniform(n) : uniform_on(omega, n);
  const double lam = no_omega ? 1.0 : params.lambda();
  const double am = params.alpha_minus();

  DiscreteDistribution g = cfg.init ? *cfg.init : DiscreteDistribution::uniform(n);
  if (g.size() != n) throw std::invalid_argument("solve_minimax: bad init size");

  const auto fake_of = [&](const DiscreteDistribution& pg) {
    return no_omega ? pg : fake_mixture(pg, p_omega, lam);
  };
  const auto best_response = [&](const DiscreteDistribution& pg) {
    return detail::clamp_table(
        detail::closed_form_discriminator(target, fake_of(pg).probs(), params),
        cfg.clamp);
  };

  MinimaxResult res;
  res.target = target;
  std::vector<double> grad(n);
  std::vector<double> next(n);
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const DiscriminatorTable d = best_response(g);
    res.objective_trace.push_back(loss_value(target, fake_of(g), d, params));
    res.tv_trace.push_back(total_variation(g, target));

    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = lam * (am * std::log(d[i]) + (1.0 - am) * std::log1p(-d[i]));
      gmin = std::min(gmin, grad[i]);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = g[i] * std::exp(-cfg.step_size * (grad[i] - gmin));
      z += next[i];
    }
    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= z;
      step += std::abs(next[i] - g[i]);
    }
    g = DiscreteDistribution::from_weights(next);
    res.iterations = it + 1;
    if (step < cfg.tol) {
      res.converged = true;
      break;
    }
  }
  res.d_star = best_response(g);
  res.p_g_star = g;
  return res;
}

/// Convergence trace CSV: iteration, objective, tv_to_target.
inline void write_minimax_trace(std::ostream& os, const MinimaxResult& r) {
  CsvWriter csv(os, {"iteration", "objective", "tv_to_target"});
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
    csv.row(i, r.objective_trace[i], r.tv_trace[i]);
  }
}

}  // namespace redlab

#endif  // REDLAB_EXACT_SOLVER_HPP
