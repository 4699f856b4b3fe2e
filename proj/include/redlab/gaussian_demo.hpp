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

#ifndef REDLAB_GAUSSIAN_DEMO_HPP
#define REDLAB_GAUSSIAN_DEMO_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "redlab/csv.hpp"

namespace redlab {

struct GaussianModel {
  double mean = 0.0;
  double variance = 1.0;

  double stddev() const { return std::sqrt(variance); }

  double pdf(double x) const {
    const double z = (x - mean) / stddev();
    return std::exp(-0.5 * z * z) / (stddev() * std::sqrt(2.0 * std::numbers::pi));
  }

  double cdf(double x) const {
    return 0.5 * std::erfc(-(x - mean) / (stddev() * std::numbers::sqrt2));
  }
};

/// Maximum likelihood fit: sample mean and population (1/n) variance.
inline GaussianModel gaussian_mle(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("gaussian_mle: need at least two samples");
  }
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double variance = ss / n;
  if (!(variance > 0.0)) {
    throw std::domain_error("gaussian_mle: degenerate (zero) variance");
  }
  return {mean, variance};
}

/// Mass a Gaussian puts on (-inf, -bound] U [bound, inf).
inline double two_sided_tail_mass(const GaussianModel& g, double bound) {
  return g.cdf(-bound) + (1.0 - g.cdf(bound));
}

struct DeletionReport {
  GaussianModel full_model;
  GaussianModel deleted_model;
  std::size_t n_samples = 0;
  std::size_t n_kept = 0;
  double omega_bound = 1.5;
  double redacted_density_mass_on_omega = 0.0;
  double deleted_model_mass_on_omega = 0.0;
};

/// Standard-normal data, Omega = (-inf, -bound] U [bound, inf).
///
/// The deletion model refits the Gaussian learner after dropping samples with
/// |x| >= threshold. The redaction target is N(0,1) truncated to
/// (-bound, bound), which has zero mass on Omega by construction.
inline DeletionReport deletion_vs_redaction_demo(std::size_t n,
                                                 double threshold,
                                                 std::uint64_t seed,
                                                 double omega_bound = 1.5) {
  if (n < 10) throw std::invalid_argument("deletion demo: n must be >= 10");
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("deletion demo: threshold must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> all(n);
  for (double& x : all) x = normal(rng);
  std::vector<double> kept;
  for (double x : all) {
    if (std::abs(x) < threshold) kept.push_back(x);
  }
  DeletionReport r;
  r.full_model = gaussian_mle(all);
  r.deleted_model = gaussian_mle(kept);
  r.n_samples = n;
  r.n_kept = kept.size();
  r.omega_bound = omega_bound;
  r.redacted_density_mass_on_omega = 0.0;
  r.deleted_model_mass_on_omega = two_sided_tail_mass(r.deleted_model, omega_bound);
  return r;
}

/// Density of N(0,1) truncated to (-bound, bound); zero on Omega.
inline double redacted_density(double x, double bound) {
  if (std::abs(x) >= bound) return 0.0;
  const GaussianModel unit{0.0, 1.0};
  return unit.pdf(x) / (unit.cdf(bound) - unit.cdf(-bound));
}

/// Grid CSV with columns x, p_data, deleted_density, redacted_density.
inline void write_deletion_csv(std::ostream& os, const DeletionReport& r,
                               double lo = -4.0, double hi = 4.0,
                               std::size_t points = 401) {
  CsvWriter csv(os, {"x", "p_data", "deleted_density", "redacted_density"});
  const GaussianModel unit{0.0, 1.0};
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(points - 1);
    csv.row(x, unit.pdf(x), r.deleted_model.pdf(x),
            redacted_density(x, r.omega_bound));
  }
}

}  // namespace redlab

#endif  // REDLAB_GAUSSIAN_DEMO_HPP
