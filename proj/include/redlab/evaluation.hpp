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

#ifndef REDLAB_EVALUATION_HPP
#define REDLAB_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "redlab/csv.hpp"
#include "redlab/gan.hpp"

namespace redlab {

/// Protocol default: 50k generated samples per metric.
inline constexpr std::size_t kDefaultEvalSamples = 50000;
inline constexpr std::size_t kDefaultBins = 64;

struct MetricsReport {
  double invalidity = 0.0;
  double quality_tv = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline Samples generate_chunked(const GanModel& m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return generate(m, n, rng);
}

}  // namespace detail

/// Fraction of points (columns) inside Omega.
inline double fraction_in(const Samples& x, const PointSpec& omega) {
  if (x.cols() == 0) return 0.0;
  std::size_t inside = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (omega.contains(column(x, j))) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(x.cols());
}

/// Fraction of n generated samples that fall in Omega. Deterministic in seed.
inline double empirical_invalidity(const GanModel& m, const PointSpec& omega,
                                   std::size_t n = kDefaultEvalSamples,
                                   std::uint64_t seed = 0) {
  if (n == 0) throw std::invalid_argument("empirical_invalidity: n must be >= 1");
  return fraction_in(detail::generate_chunked(m, n, seed), omega);
}

/// Shared binning: `bins` uniform cells over the reference range widened
/// by 5% on each side.
struct Binning {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t bins = kDefaultBins;

  static Binning from_reference(const Samples& ref, std::size_t bins) {
    if (ref.rows() != 1) throw std::invalid_argument("histogram metrics need 1D samples");
    if (ref.cols() == 0) throw std::invalid_argument("histogram metrics: empty reference");
    if (bins == 0) throw std::invalid_argument("histogram metrics: bins must be positive");
    const double mn = ref.minCoeff();
    const double mx = ref.maxCoeff();
    if (!(mx > mn)) throw std::domain_error("histogram metrics: degenerate reference range");
    const double pad = 0.05 * (mx - mn);
    return {mn - pad, mx + pad, bins};
  }

  /// Cell index, or `bins` for points outside [lo, hi].
  std::size_t cell(double x) const {
    if (!(x >= lo && x <= hi)) return bins;
    const auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    return std::min(k, bins - 1);
  }

  /// Normalized histogram with one trailing overflow cell.
  std::vector<double> histogram(const Samples& x) const {
    std::vector<double> h(bins + 1, 0.0);
    for (Eigen::Index j = 0; j < x.cols(); ++j) h[cell(x(0, j))] += 1.0;
    if (x.cols() > 0) {
      for (double& v : h) v /= static_cast<double>(x.cols());
    }
    return h;
  }
};

/// Total variation between the binned histograms of two 1D sample sets on
/// the binning of `reference`. Mass outside the range counts as mismatch.
inline double histogram_tv(const Samples& generated, const Samples& reference,
                           std::size_t bins = kDefaultBins) {
  const Binning b = Binning::from_reference(reference, bins);
  const auto hg = b.histogram(generated);
  const auto hr = b.histogram(reference);
  double acc = 0.0;
  for (std::size_t i = 0; i < hg.size(); ++i) acc += std::abs(hg[i] - hr[i]);
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

/// Histogram TV between n generated samples and the valid part of the
/// reference set (reference points outside Omega).
inline double quality_tv(const GanModel& m, const Samples& reference, const PointSpec& omega,
                         std::size_t bins = kDefaultBins, std::size_t n = kDefaultEvalSamples,
                         std::uint64_t seed = 0) {
  Samples valid(reference.rows(), 0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < reference.cols(); ++j) {
    if (!omega.contains(column(reference, j))) keep.push_back(j);
  }
  if (keep.empty()) throw std::invalid_argument("quality_tv: no valid reference samples");
  valid.resize(reference.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    valid.col(static_cast<Eigen::Index>(i)) = reference.col(keep[i]);
  }
  return histogram_tv(detail::generate_chunked(m, n, seed), valid, bins);
}

inline MetricsReport evaluate(const GanModel& m, const Samples& reference,
                              const PointSpec& omega, std::size_t n = kDefaultEvalSamples,
                              std::uint64_t seed = 0, std::size_t bins = kDefaultBins) {
  return {empirical_invalidity(m, omega, n, seed), quality_tv(m, reference, omega, bins, n, seed),
          n, seed};
}

// --- Redaction scores ---------------------------------------------------------------

struct RedactionScoreEntry {
  std::size_t id = 0;
  double d0 = 0.0;
  double d_prime = 0.0;
  double rs = 0.0;
  double rs_rel = 0.0;
  bool rs_rel_defined = true;
};

/// Per-sample drop of the discriminator output between the pre-trained and
/// the redacted model.
struct RedactionScoreTable {
  std::vector<RedactionScoreEntry> entries;

  static RedactionScoreTable from_outputs(const std::vector<double>& d0,
                                          const std::vector<double>& d_prime) {
    if (d0.size() != d_prime.size()) {
      throw std::invalid_argument("redaction scores: output vectors differ in length");
    }
    RedactionScoreTable t;
    for (std::size_t i = 0; i < d0.size(); ++i) {
      RedactionScoreEntry e{i, d0[i], d_prime[i], d0[i] - d_prime[i], 0.0, d0[i] != 0.0};
      e.rs_rel = e.rs_rel_defined ? e.rs / e.d0 : std::numeric_limits<double>::quiet_NaN();
      t.entries.push_back(e);
    }
    return t;
  }

  void write_csv(std::ostream& os) const {
    CsvWriter csv(os, {"sample_id", "d0", "d_prime", "rs", "rs_rel"});
    for (const auto& e : entries) csv.row(e.id, e.d0, e.d_prime, e.rs, e.rs_rel);
  }
};

inline RedactionScoreTable redaction_scores(const GanModel& d0_model,
                                            const GanModel& d_prime_model,
                                            const Samples& samples) {
  if (samples.rows() != d0_model.discriminator.input_dim() ||
      samples.rows() != d_prime_model.discriminator.input_dim()) {
    throw std::invalid_argument("redaction scores: sample dimension mismatch");
  }
  const Eigen::VectorXd a = discriminate(d0_model, samples);
  const Eigen::VectorXd b = discriminate(d_prime_model, samples);
  return RedactionScoreTable::from_outputs(std::vector<double>(a.begin(), a.end()),
                                           std::vector<double>(b.begin(), b.end()));
}

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of RS on D0.
inline Regression difficulty_regression(const RedactionScoreTable& t) {
  const std::size_t n = t.entries.size();
  if (n < 3) throw std::invalid_argument("difficulty regression: need at least 3 samples");
  double mx = 0.0, my = 0.0;
  for (const auto& e : t.entries) {
    mx += e.d0;
    my += e.rs;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& e : t.entries) {
    sxx += (e.d0 - mx) * (e.d0 - mx);
    sxy += (e.d0 - mx) * (e.rs - my);
    syy += (e.rs - my) * (e.rs - my);
  }
  if (!(sxx > 0.0)) throw std::domain_error("difficulty regression: D0 has zero variance");
  Regression r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  return r;
}

/// Long-format metrics rows: run_id, round, metric, value, n, seed.
class MetricsLog {
 public:
  explicit MetricsLog(std::ostream& os)
      : csv_(os, {"run_id", "round", "metric", "value", "n", "seed"}) {}

  void add(const std::string& run_id, std::size_t round, const std::string& metric,
           double value, std::size_t n, std::uint64_t seed) {
    csv_.row(run_id, round, metric, value, n, seed);
  }

 private:
  CsvWriter csv_;
};

}  // namespace redlab

#endif  // REDLAB_EVALUATION_HPP
