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

#ifndef REDLAB_TOY_HPP
#define REDLAB_TOY_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "redlab/distributions.hpp"
#include "redlab/gan.hpp"
#include "redlab/mlp.hpp"

namespace redlab::toy {

/// Equal-weight mixture of 1D Gaussians with means -3.5, -2.5, ..., 3.5.
/// The modes play the role of class labels.
struct ModeMixture {
  std::vector<double> means{-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5};
  double sigma = 0.15;

  std::size_t modes() const { return means.size(); }

  struct Draw {
    Samples x;
    std::vector<int> labels;
  };

  Draw sample(std::size_t n, std::mt19937_64& rng) const {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(modes()) - 1);
    std::normal_distribution<double> noise(0.0, sigma);
    Draw d{Samples(1, static_cast<Eigen::Index>(n)), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const int k = pick(rng);
      d.labels[i] = k;
      d.x(0, static_cast<Eigen::Index>(i)) = means[static_cast<std::size_t>(k)] + noise(rng);
    }
    return d;
  }

  /// Decision interval of mode k: between the midpoints to its neighbours,
  /// open-ended for the outermost modes.
  std::pair<double, double> region(std::size_t k) const {
    if (k >= modes()) throw std::out_of_range("mode index out of range");
    const double inf = std::numeric_limits<double>::infinity();
    const double lo = k == 0 ? -inf : 0.5 * (means[k - 1] + means[k]);
    const double hi = k + 1 == modes() ? inf : 0.5 * (means[k] + means[k + 1]);
    return {lo, hi};
  }
};

/// Smooth "not mode k" classifier: f(x) = 1 - s((x - lo)/w) s((hi - x)/w)
/// with s the logistic function and missing sides dropped. f is small on
/// the mode region and close to one elsewhere, with f = 1/2 near the
/// region boundaries.
struct ModeClassifier {
  double lo;
  double hi;
  double width = 0.2;

  double operator()(double x) const {
    return 1.0 - left(x) * right(x);
  }

  double derivative(double x) const {
    const double l = left(x);
    const double r = right(x);
    const double dl = std::isfinite(lo) ? l * (1.0 - l) / width : 0.0;
    const double dr = std::isfinite(hi) ? -r * (1.0 - r) / width : 0.0;
    return -(dl * r + l * dr);
  }

 private:
  double left(double x) const {
    return std::isfinite(lo) ? stable_sigmoid((x - lo) / width) : 1.0;
  }
  double right(double x) const {
    return std::isfinite(hi) ? stable_sigmoid((hi - x) / width) : 1.0;
  }
};

inline ModeClassifier mode_classifier(const ModeMixture& mix, std::size_t k,
                                      double width = 0.2) {
  const auto [lo, hi] = mix.region(k);
  return {lo, hi, width};
}

/// Classifier-based description of "mode k" as a redaction set over points.
inline PointSpec mode_classifier_spec(const ModeMixture& mix, std::size_t k,
                                      double tau = 0.5, double width = 0.2) {
  const ModeClassifier f = mode_classifier(mix, k, width);
  return PointSpec::classifier([f](PointView x) { return f(x[0]); }, tau,
                               [f](PointView x, std::span<double> g) { g[0] = f.derivative(x[0]); });
}

/// Validity-based description of the same region: v(x) = 1{f(x) >= tau}.
inline PointSpec mode_validity_spec(const ModeMixture& mix, std::size_t k,
                                    double tau = 0.5, double width = 0.2) {
  const ModeClassifier f = mode_classifier(mix, k, width);
  return PointSpec::validity([f, tau](PointView x) { return f(x[0]) >= tau; });
}

/// Columns of x that lie in (or outside) the redaction set.
inline Samples select(const Samples& x, const PointSpec& omega, bool inside) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (omega.contains(column(x, j)) == inside) keep.push_back(j);
  }
  Samples out(x.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = x.col(keep[i]);
  }
  return out;
}

/// Desk-scale settings for the 8-mode experiments, fixed by pilot runs.
/// One epoch over 20k points is ~313 minibatches; the redaction budgets
/// below are counted in such epochs.
struct Profile {
  std::size_t n_data = 20000;
  TrainConfig pretrain = [] {
    TrainConfig c;
    c.learning_rate = 1e-3;
    c.k_g = 1;
    c.epochs = 20;
    return c;
  }();
  GanArchitecture arch = [] {
    GanArchitecture a;
    a.d_slope = 8.0;
    a.g_slope = 4.0;
    return a;
  }();
  int redaction_epochs = 3;
  int queries_per_round = 400;
  std::size_t eval_samples = 20000;

  /// Redaction training config: same optimizer, K_G = 1.
  TrainConfig redaction(std::uint64_t seed, int epochs) const {
    TrainConfig c = pretrain;
    c.epochs = epochs;
    c.k_g = 1;
    c.seed = seed;
    return c;
  }
};

/// Two-mode mixture used to check plain pre-training quality.
inline ModeMixture two_mode_mixture() {
  ModeMixture m;
  m.means = {-1.0, 1.0};
  m.sigma = 0.5;
  return m;
}

}  // namespace redlab::toy

#endif  // REDLAB_TOY_HPP
