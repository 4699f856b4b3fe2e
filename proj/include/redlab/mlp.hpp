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

#ifndef REDLAB_MLP_HPP
#define REDLAB_MLP_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace redlab {

/// A batch of points, one column per sample (rows = data dimension).
using Samples = Eigen::MatrixXd;

inline std::span<const double> column(const Samples& s, Eigen::Index j) {
  return {s.data() + j * s.rows(), static_cast<std::size_t>(s.rows())};
}

enum class Activation : std::uint8_t { Tanh = 0, LeakyRelu = 1, Identity = 2 };
enum class OutputSquash : std::uint8_t { Identity = 0, Sigmoid = 1, Tanh = 2 };

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// Fully connected network with a flat parameter vector.
///
/// Parameters are stored layer by layer: the weight matrix (out x in,
/// column-major) followed by the bias. Optimizers, checkpoints and gradient
/// checks all work on this flat layout.
class MlpNetwork {
 public:
  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
  using VecMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
    Eigen::MatrixXd output;               // after the output squash
  };

  MlpNetwork() = default;

  MlpNetwork(std::vector<int> layer_dims, Activation hidden, OutputSquash squash)
      : dims_(std::move(layer_dims)), hidden_(hidden), squash_(squash) {
    if (dims_.size() < 2) throw std::invalid_argument("mlp: need at least two layer dims");
    for (int d : dims_) {
      if (d <= 0) throw std::invalid_argument("mlp: layer dims must be positive");
    }
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      offsets_.push_back(total);
      total += static_cast<std::size_t>(dims_[l + 1]) * (dims_[l] + 1);
    }
    params_.assign(total, 0.0);
  }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init_uniform(std::mt19937_64& rng) {
    for (std::size_t l = 0; l < num_layers(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
      std::uniform_real_distribution<double> u(-bound, bound);
      const std::size_t begin = offsets_[l];
      const std::size_t end = begin + layer_param_count(l);
      for (std::size_t i = begin; i < end; ++i) params_[i] = u(rng);
    }
  }

  /// Re-draws the first layer so each unit is a steep ramp across a random
  /// hyperplane through [lo, hi]^d: w has a random direction and norm in
  /// [slope/4, slope], b = -w.c for c uniform in the box. Small default
  /// weights leave low-dimensional inputs with too few breakpoints to
  /// resolve narrow modes.
  void spread_first_layer(std::mt19937_64& rng, double lo, double hi, double slope) {
    if (num_layers() == 0) throw std::logic_error("mlp: no layers");
    if (!(hi > lo) || !(slope > 0.0)) {
      throw std::invalid_argument("mlp: spread needs lo < hi and a positive slope");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> mag(slope / 4.0, slope);
    std::uniform_real_distribution<double> centre(lo, hi);
    MatMap w = weight(0);
    VecMap b = bias(0);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      Eigen::VectorXd dir(w.cols());
      for (Eigen::Index c = 0; c < w.cols(); ++c) dir(c) = normal(rng);
      dir *= mag(rng) / std::max(dir.norm(), 1e-12);
      Eigen::VectorXd point(w.cols());
      for (Eigen::Index c = 0; c < w.cols(); ++c) point(c) = centre(rng);
      w.row(r) = dir.transpose();
      b(r) = -dir.dot(point);
    }
  }

  std::size_t num_layers() const { return dims_.empty() ? 0 : dims_.size() - 1; }
  std::size_t num_params() const { return params_.size(); }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  const std::vector<int>& layer_dims() const { return dims_; }
  Activation hidden_activation() const { return hidden_; }
  OutputSquash output_squash() const { return squash_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  MatMap weight(std::size_t l) {
    return MatMap(params_.data() + offsets_[l], dims_[l + 1], dims_[l]);
  }
  ConstMatMap weight(std::size_t l) const {
    return ConstMatMap(params_.data() + offsets_[l], dims_[l + 1], dims_[l]);
  }
  VecMap bias(std::size_t l) {
    return VecMap(params_.data() + offsets_[l] + weight_count(l), dims_[l + 1]);
  }
  ConstVecMap bias(std::size_t l) const {
    return ConstVecMap(params_.data() + offsets_[l] + weight_count(l), dims_[l + 1]);
  }

  Cache forward_cached(const Eigen::MatrixXd& x) const {
    check_input(x);
    Cache c;
    c.inputs.reserve(num_layers());
    c.pre.reserve(num_layers());
    Eigen::MatrixXd a = x;
    for (std::size_t l = 0; l < num_layers(); ++l) {
      Eigen::MatrixXd z = weight(l) * a;
      z.colwise() += bias(l);
      c.inputs.push_back(std::move(a));
      const bool last = l + 1 == num_layers();
      a = last ? squash(z) : activate(z);
      c.pre.push_back(std::move(z));
    }
    c.output = std::move(a);
    return c;
  }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const {
    return forward_cached(x).output;
  }

  /// Final pre-activation (logits for a sigmoid discriminator).
  Eigen::MatrixXd logits(const Eigen::MatrixXd& x) const {
    return forward_cached(x).pre.back();
  }

  /// Chain rule through the output squash.
  Eigen::MatrixXd output_grad_to_pre(const Cache& c,
                                     const Eigen::MatrixXd& grad_out) const {
    switch (squash_) {
      case OutputSquash::Identity:
        return grad_out;
      case OutputSquash::Sigmoid:
        return grad_out.cwiseProduct(
            c.output.unaryExpr([](double s) { return s * (1.0 - s); }));
      case OutputSquash::Tanh:
        return grad_out.cwiseProduct(
            c.output.unaryExpr([](double t) { return 1.0 - t * t; }));
    }
    return grad_out;
  }

  /// Backpropagates a gradient given with respect to the final
  /// pre-activation. Parameter gradients are accumulated into param_grad
  /// (flat layout); the gradient with respect to the input is returned.
  Eigen::MatrixXd backward(const Cache& c, const Eigen::MatrixXd& grad_pre_out,
                           std::span<double> param_grad) const {
    if (param_grad.size() != params_.size()) {
      throw std::invalid_argument("mlp backward: gradient buffer has wrong size");
    }
    Eigen::MatrixXd delta = grad_pre_out;
    for (std::size_t l = num_layers(); l-- > 0;) {
      MatMap gw(param_grad.data() + offsets_[l], dims_[l + 1], dims_[l]);
      VecMap gb(param_grad.data() + offsets_[l] + weight_count(l), dims_[l + 1]);
      gw.noalias() += delta * c.inputs[l].transpose();
      gb.noalias() += delta.rowwise().sum();
      Eigen::MatrixXd up = weight(l).transpose() * delta;
      if (l > 0) up = up.cwiseProduct(activation_derivative(c.pre[l - 1]));
      delta = std::move(up);
    }
    return delta;
  }

  friend bool operator==(const MlpNetwork& a, const MlpNetwork& b) {
    return a.dims_ == b.dims_ && a.hidden_ == b.hidden_ && a.squash_ == b.squash_ &&
           a.params_ == b.params_;
  }

 private:
  std::size_t weight_count(std::size_t l) const {
    return static_cast<std::size_t>(dims_[l + 1]) * dims_[l];
  }
  std::size_t layer_param_count(std::size_t l) const {
    return weight_count(l) + static_cast<std::size_t>(dims_[l + 1]);
  }

  void check_input(const Eigen::MatrixXd& x) const {
    if (x.rows() != dims_.front()) {
      throw std::invalid_argument("mlp: input has " + std::to_string(x.rows()) +
                                  " rows, expected " + std::to_string(dims_.front()));
    }
  }

  Eigen::MatrixXd activate(const Eigen::MatrixXd& z) const {
    switch (hidden_) {
      case Activation::Tanh:
        return z.array().tanh().matrix();
      case Activation::LeakyRelu:
        return z.unaryExpr([](double v) { return v > 0.0 ? v : 0.2 * v; });
      case Activation::Identity:
        return z;
    }
    return z;
  }

  Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& z) const {
    switch (hidden_) {
      case Activation::Tanh:
        return z.unaryExpr([](double v) {
          const double t = std::tanh(v);
          return 1.0 - t * t;
        });
      case Activation::LeakyRelu:
        return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.2; });
      case Activation::Identity:
        return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    }
    return Eigen::MatrixXd::Ones(z.rows(), z.cols());
  }

  Eigen::MatrixXd squash(const Eigen::MatrixXd& z) const {
    switch (squash_) {
      case OutputSquash::Identity:
        return z;
      case OutputSquash::Sigmoid:
        return z.unaryExpr([](double v) { return stable_sigmoid(v); });
      case OutputSquash::Tanh:
        return z.array().tanh().matrix();
    }
    return z;
  }

  std::vector<int> dims_;
  Activation hidden_ = Activation::Tanh;
  OutputSquash squash_ = OutputSquash::Identity;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// --- Adam ----------------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

inline void adam_step(std::span<double> params, std::span<const double> grads,
                      AdamState& state, const AdamConfig& cfg) {
  if (grads.size() != params.size() || state.m.size() != params.size()) {
    throw std::invalid_argument("adam: parameter, gradient and state sizes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

// --- Gradient checking -----------------------------------------------------------

/// Scalar loss of the network output and its gradient with respect to it.
using OutputLoss =
    std::function<std::pair<double, Eigen::MatrixXd>(const Eigen::MatrixXd&)>;

/// Hook applied to the analytic gradient before comparison; used to inject
/// faults when testing the checker itself.
using GradientHook = std::function<void(std::span<double>)>;

struct GradCheckOptions {
  double step = 1e-5;
  /// Denominator floor for the relative error.
  double floor = 1e-6;
  bool check_inputs = true;
  GradientHook analytic_hook;
};

/// Worst relative error between analytic gradients (parameters and inputs)
/// and central finite differences of the given loss.
inline double backprop_check(const MlpNetwork& net, const Eigen::MatrixXd& input,
                             const OutputLoss& loss,
                             const GradCheckOptions& opts = {}) {
  const auto cache = net.forward_cached(input);
  const auto [value, grad_out] = loss(cache.output);
  (void)value;
  std::vector<double> analytic(net.num_params(), 0.0);
  const Eigen::MatrixXd grad_in =
      net.backward(cache, net.output_grad_to_pre(cache, grad_out), analytic);
  if (opts.analytic_hook) opts.analytic_hook(analytic);

  const auto rel = [&](double a, double n) {
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), opts.floor});
  };
  double worst = 0.0;
  MlpNetwork probe = net;
  for (std::size_t i = 0; i < probe.num_params(); ++i) {
    const double saved = probe.params()[i];
    probe.params()[i] = saved + opts.step;
    const double up = loss(probe.forward(input)).first;
    probe.params()[i] = saved - opts.step;
    const double down = loss(probe.forward(input)).first;
    probe.params()[i] = saved;
    worst = std::max(worst, rel(analytic[i], (up - down) / (2.0 * opts.step)));
  }
  if (opts.check_inputs) {
    Eigen::MatrixXd x = input;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double saved = x(k);
      x(k) = saved + opts.step;
      const double up = loss(net.forward(x)).first;
      x(k) = saved - opts.step;
      const double down = loss(net.forward(x)).first;
      x(k) = saved;
      worst = std::max(worst, rel(grad_in(k), (up - down) / (2.0 * opts.step)));
    }
  }
  return worst;
}

/// Linear loss <upstream, output>: checks backprop of an arbitrary upstream
/// gradient.
inline double backprop_check(const MlpNetwork& net, const Eigen::MatrixXd& input,
                             const Eigen::MatrixXd& upstream,
                             const GradCheckOptions& opts = {}) {
  return backprop_check(
      net, input,
      [&](const Eigen::MatrixXd& out) {
        return std::make_pair(out.cwiseProduct(upstream).sum(), Eigen::MatrixXd(upstream));
      },
      opts);
}

}  // namespace redlab

#endif  // REDLAB_MLP_HPP
