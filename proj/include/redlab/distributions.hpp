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

#ifndef REDLAB_DISTRIBUTIONS_HPP
#define REDLAB_DISTRIBUTIONS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace redlab {

/// Probability vector on the finite support {0, ..., n-1}.
class DiscreteDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Takes probabilities as given; they must already sum to one.
  static DiscreteDistribution from_probs(std::vector<double> probs) {
    validate(probs);
    return DiscreteDistribution(std::move(probs));
  }

  /// Normalizes nonnegative weights with positive total.
  static DiscreteDistribution from_weights(std::vector<double> weights) {
    if (weights.empty()) {
      throw std::invalid_argument("distribution needs a nonempty support");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("weights must be finite and nonnegative");
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("weights must have positive total");
    }
    for (double& w : weights) w /= total;
    return DiscreteDistribution(std::move(weights));
  }

  static DiscreteDistribution uniform(std::size_t n) {
    return from_weights(std::vector<double>(n, 1.0));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  explicit DiscreteDistribution(std::vector<double> probs)
      : probs_(std::move(probs)) {}

  static void validate(const std::vector<double>& probs) {
    if (probs.empty()) {
      throw std::invalid_argument("distribution needs a nonempty support");
    }
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("probabilities must be nonnegative");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw std::invalid_argument("probabilities sum to " +
                                  std::to_string(total) + ", expected 1");
    }
  }

  std::vector<double> probs_;
};

inline double total_variation(const DiscreteDistribution& p,
                              const DiscreteDistribution& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("total_variation: support size mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

// --- Redaction set descriptions -------------------------------------------

/// Sorted, duplicate-free list of atom indices (discrete tier only).
struct ExplicitSet {
  std::vector<std::size_t> indices;
};

/// Omega = {x : valid(x) == false}.
template <class Point>
struct ValiditySet {
  std::function<bool(Point)> valid;
};

/// Omega = {x : score(x) < tau}. The optional gradient writes d score / dx
/// into its second argument and is required by the classifier-based
/// redaction algorithm.
template <class Point>
struct ClassifierSet {
  std::function<double(Point)> score;
  double tau = 0.5;
  std::function<void(Point, std::span<double>)> gradient;
};

/// Tagged description of the region a model must stop generating.
template <class Point>
class RedactionSpec {
 public:
  using Variant =
      std::variant<ExplicitSet, ValiditySet<Point>, ClassifierSet<Point>>;

  static RedactionSpec explicit_set(std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
      throw std::invalid_argument("explicit redaction set has duplicates");
    }
    return RedactionSpec(ExplicitSet{std::move(indices)});
  }

  static RedactionSpec empty() { return explicit_set({}); }

  static RedactionSpec validity(std::function<bool(Point)> valid) {
    if (!valid) throw std::invalid_argument("validity function is empty");
    return RedactionSpec(ValiditySet<Point>{std::move(valid)});
  }

  static RedactionSpec classifier(
      std::function<double(Point)> score, double tau,
      std::function<void(Point, std::span<double>)> gradient = {}) {
    if (!score) throw std::invalid_argument("classifier function is empty");
    if (!(tau > 0.0 && tau < 1.0)) {
      throw std::invalid_argument("classifier threshold must lie in (0, 1)");
    }
    return RedactionSpec(
        ClassifierSet<Point>{std::move(score), tau, std::move(gradient)});
  }

  const Variant& variant() const { return variant_; }
  bool is_explicit() const { return std::holds_alternative<ExplicitSet>(variant_); }
  bool is_validity() const {
    return std::holds_alternative<ValiditySet<Point>>(variant_);
  }
  bool is_classifier() const {
    return std::holds_alternative<ClassifierSet<Point>>(variant_);
  }

  /// Membership test. Explicit sets only make sense over atom indices.
  bool contains(Point x) const {
    return std::visit(
        [&](const auto& s) -> bool {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, ExplicitSet>) {
            if constexpr (std::is_integral_v<Point>) {
              return std::binary_search(s.indices.begin(), s.indices.end(),
                                        static_cast<std::size_t>(x));
            } else {
              throw std::logic_error(
                  "explicit redaction sets are defined over atom indices");
            }
          } else if constexpr (std::is_same_v<S, ValiditySet<Point>>) {
            return !s.valid(x);
          } else {
            const double f = s.score(x);
            if (!(f >= 0.0 && f <= 1.0)) {
              throw std::domain_error("classifier score outside [0, 1]: " +
                                      std::to_string(f));
            }
            return f < s.tau;
          }
        },
        variant_);
  }

  /// Checks that explicit indices fit a support of size n.
  void check_support(std::size_t n) const {
    if (const auto* s = std::get_if<ExplicitSet>(&variant_)) {
      if (!s->indices.empty() && s->indices.back() >= n) {
        throw std::out_of_range("redaction index " +
                                std::to_string(s->indices.back()) +
                                " outside support of size " + std::to_string(n));
      }
    }
  }

 private:
  explicit RedactionSpec(Variant v) : variant_(std::move(v)) {}

  Variant variant_;
};

using DiscreteSpec = RedactionSpec<std::size_t>;
using PointView = std::span<const double>;
using PointSpec = RedactionSpec<PointView>;

/// p restricted to the complement of Omega and renormalized.
inline DiscreteDistribution restrict(const DiscreteDistribution& p,
                                     const DiscreteSpec& omega) {
  omega.check_support(p.size());
  std::vector<double> w(p.probs());
  double kept = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (omega.contains(i)) {
      w[i] = 0.0;
    } else {
      kept += w[i];
    }
  }
  if (!(kept > 0.0)) {
    throw std::domain_error("restrict: all probability mass lies in Omega");
  }
  return DiscreteDistribution::from_weights(std::move(w));
}

/// Uniform distribution on the atoms of Omega.
inline DiscreteDistribution uniform_on(const DiscreteSpec& omega,
                                       std::size_t support_size) {
  omega.check_support(support_size);
  std::vector<double> w(support_size, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < support_size; ++i) {
    if (omega.contains(i)) {
      w[i] = 1.0;
      ++count;
    }
  }
  if (count == 0) throw std::domain_error("uniform_on: Omega is empty");
  const double mass = 1.0 / static_cast<double>(count);
  for (double& x : w) x *= mass;
  return DiscreteDistribution::from_probs(std::move(w));
}

/// lambda * p_g + (1 - lambda) * p_omega.
inline DiscreteDistribution fake_mixture(const DiscreteDistribution& p_g,
                                         const DiscreteDistribution& p_omega,
                                         double lambda) {
  if (p_g.size() != p_omega.size()) {
    throw std::invalid_argument("fake_mixture: support size mismatch");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("fake_mixture: lambda must lie in (0, 1)");
  }
  std::vector<double> w(p_g.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = lambda * p_g[i] + (1.0 - lambda) * p_omega[i];
  }
  return DiscreteDistribution::from_weights(std::move(w));
}

/// Mass of p_g on Omega.
inline double invalidity(const DiscreteDistribution& p_g,
                         const DiscreteSpec& omega) {
  omega.check_support(p_g.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < p_g.size(); ++i) {
    if (omega.contains(i)) mass += p_g[i];
  }
  return std::clamp(mass, 0.0, 1.0);
}

}  // namespace redlab

#endif  // REDLAB_DISTRIBUTIONS_HPP
