//
// Copyright 2026 The FairFil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Dense feed-forward networks with hand-written backpropagation.
//
// Everything is templated on the scalar type; the rest of the library uses
// the double-precision aliases at the bottom of this file. Matrices are
// row-major with one sample per row, so a batch of N inputs of width `in`
// is an N x in matrix and a layer computes X * W^T + 1 b^T.

#ifndef FAIRFIL_NN_HPP_
#define FAIRFIL_NN_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "fairfil/errors.hpp"
#include "fairfil/rng.hpp"

namespace fairfil {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Matrix parameter that takes no part in deduction, so Eigen expressions
// convert implicitly once Scalar is fixed by another argument.
template <typename Scalar>
using MatrixArg = std::type_identity_t<MatrixX<Scalar>>;

enum class Activation { kIdentity, kReLU };

template <typename Scalar>
struct LinearLayer {
  MatrixX<Scalar> weight;  // out x in
  VectorX<Scalar> bias;    // out
  Activation activation = Activation::kIdentity;

  Index in_dim() const { return weight.cols(); }
  Index out_dim() const { return weight.rows(); }

  bool operator==(const LinearLayer& other) const {
    return activation == other.activation &&
           weight.rows() == other.weight.rows() &&
           weight.cols() == other.weight.cols() &&
           bias.size() == other.bias.size() && weight == other.weight &&
           bias == other.bias;
  }
};

template <typename Scalar>
struct BasicMlp {
  std::vector<LinearLayer<Scalar>> layers;

  Index in_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
  Index out_dim() const {
    return layers.empty() ? 0 : layers.back().out_dim();
  }
  Index parameter_count() const {
    Index n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
  }
  bool operator==(const BasicMlp& other) const = default;
};

// Per-layer parameter gradients, shaped like the network they belong to.
template <typename Scalar>
struct BasicGradientSet {
  std::vector<MatrixX<Scalar>> weight;
  std::vector<VectorX<Scalar>> bias;

  static BasicGradientSet zeros_like(const BasicMlp<Scalar>& net) {
    BasicGradientSet g;
    for (const auto& l : net.layers) {
      g.weight.push_back(MatrixX<Scalar>::Zero(l.out_dim(), l.in_dim()));
      g.bias.push_back(VectorX<Scalar>::Zero(l.out_dim()));
    }
    return g;
  }

  BasicGradientSet& operator+=(const BasicGradientSet& other) {
    for (std::size_t i = 0; i < weight.size(); ++i) {
      weight[i] += other.weight[i];
      bias[i] += other.bias[i];
    }
    return *this;
  }

  BasicGradientSet& operator*=(Scalar s) {
    for (std::size_t i = 0; i < weight.size(); ++i) {
      weight[i] *= s;
      bias[i] *= s;
    }
    return *this;
  }

  bool all_finite() const {
    for (std::size_t i = 0; i < weight.size(); ++i) {
      if (!weight[i].allFinite() || !bias[i].allFinite()) return false;
    }
    return true;
  }

  bool congruent_with(const BasicMlp<Scalar>& net) const {
    if (weight.size() != net.layers.size() || bias.size() != weight.size()) {
      return false;
    }
    for (std::size_t i = 0; i < weight.size(); ++i) {
      const auto& l = net.layers[i];
      if (weight[i].rows() != l.out_dim() || weight[i].cols() != l.in_dim() ||
          bias[i].size() != l.out_dim()) {
        return false;
      }
    }
    return true;
  }
};

// Activations retained by mlp_forward for the backward pass.
template <typename Scalar>
struct ForwardCache {
  std::vector<MatrixX<Scalar>> inputs;  // input to each layer
  std::vector<MatrixX<Scalar>> pre;     // pre-activation of each layer
  std::uint64_t net_fingerprint = 0;
};

template <typename Scalar>
struct ForwardResult {
  MatrixX<Scalar> output;
  ForwardCache<Scalar> cache;
};

template <typename Scalar>
struct BackwardResult {
  BasicGradientSet<Scalar> param_grads;
  MatrixX<Scalar> input_grad;
};

namespace internal {

inline void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
}

template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
relu_mask(const Eigen::MatrixBase<Derived>& pre) {
  using S = typename Derived::Scalar;
  return (pre.array() > S(0)).template cast<S>();
}

}  // namespace internal

// Hash of shapes, activations and parameter bytes.
template <typename Scalar>
std::uint64_t fingerprint(const BasicMlp<Scalar>& net) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& l : net.layers) {
    const Index dims[2] = {l.out_dim(), l.in_dim()};
    const int act = static_cast<int>(l.activation);
    internal::fnv_mix(h, dims, sizeof(dims));
    internal::fnv_mix(h, &act, sizeof(act));
    internal::fnv_mix(h, l.weight.data(), sizeof(Scalar) * l.weight.size());
    internal::fnv_mix(h, l.bias.data(), sizeof(Scalar) * l.bias.size());
  }
  return h;
}

template <typename Scalar>
void check_well_formed(const BasicMlp<Scalar>& net) {
  if (net.layers.empty()) {
    throw Error(Errc::kDimensionMismatch, "network has no layers");
  }
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    if (l.bias.size() != l.out_dim()) {
      throw Error(Errc::kDimensionMismatch,
                  "layer " + std::to_string(i) + " bias/weight rows differ");
    }
    if (i > 0 && l.in_dim() != net.layers[i - 1].out_dim()) {
      throw Error(Errc::kDimensionMismatch,
                  "layer " + std::to_string(i) + " input width mismatch");
    }
  }
}

template <typename Scalar, typename Derived>
void apply_activation(Activation act, Eigen::MatrixBase<Derived>& m) {
  if (act == Activation::kReLU) m = m.cwiseMax(Scalar(0));
}

// Batched forward pass. Row i of the output depends only on row i of input.
template <typename Scalar>
ForwardResult<Scalar> mlp_forward(const BasicMlp<Scalar>& net,
                                  const MatrixArg<Scalar>& input) {
  check_well_formed(net);
  if (input.cols() != net.in_dim()) {
    throw Error(Errc::kDimensionMismatch,
                "input has " + std::to_string(input.cols()) +
                    " columns, network expects " +
                    std::to_string(net.in_dim()));
  }
  ForwardResult<Scalar> r;
  r.cache.net_fingerprint = fingerprint(net);
  r.cache.inputs.reserve(net.layers.size());
  r.cache.pre.reserve(net.layers.size());
  MatrixX<Scalar> x = input;
  for (const auto& l : net.layers) {
    MatrixX<Scalar> pre = x * l.weight.transpose();
    pre.rowwise() += l.bias.transpose();
    r.cache.inputs.push_back(std::move(x));
    x = pre;
    apply_activation<Scalar>(l.activation, x);
    r.cache.pre.push_back(std::move(pre));
  }
  r.output = std::move(x);
  return r;
}

// Forward pass without retaining activations.
template <typename Scalar>
MatrixX<Scalar> mlp_eval(const BasicMlp<Scalar>& net,
                         const MatrixArg<Scalar>& input) {
  check_well_formed(net);
  if (input.cols() != net.in_dim()) {
    throw Error(Errc::kDimensionMismatch, "input width mismatch");
  }
  MatrixX<Scalar> x = input;
  for (const auto& l : net.layers) {
    MatrixX<Scalar> pre = x * l.weight.transpose();
    pre.rowwise() += l.bias.transpose();
    apply_activation<Scalar>(l.activation, pre);
    x = std::move(pre);
  }
  return x;
}

// Exact gradients of a scalar whose derivative w.r.t. the network output is
// `output_grad`. The ReLU derivative at exactly zero is taken as zero.
template <typename Scalar>
BackwardResult<Scalar> mlp_backward(const BasicMlp<Scalar>& net,
                                    const ForwardCache<Scalar>& cache,
                                    const MatrixArg<Scalar>& output_grad) {
  check_well_formed(net);
  if (cache.pre.size() != net.layers.size() ||
      cache.inputs.size() != net.layers.size() ||
      cache.net_fingerprint != fingerprint(net)) {
    throw Error(Errc::kStaleCache, "cache was produced by a different network");
  }
  const Index n = cache.pre.back().rows();
  if (output_grad.rows() != n || output_grad.cols() != net.out_dim()) {
    throw Error(Errc::kDimensionMismatch, "output_grad shape mismatch");
  }
  BackwardResult<Scalar> r;
  r.param_grads.weight.resize(net.layers.size());
  r.param_grads.bias.resize(net.layers.size());
  MatrixX<Scalar> g = output_grad;
  for (std::size_t k = net.layers.size(); k-- > 0;) {
    const auto& l = net.layers[k];
    if (l.activation == Activation::kReLU) {
      g.array() *= internal::relu_mask(cache.pre[k]);
    }
    r.param_grads.weight[k] = g.transpose() * cache.inputs[k];
    r.param_grads.bias[k] = g.colwise().sum().transpose();
    g = g * l.weight;
  }
  r.input_grad = std::move(g);
  return r;
}

// theta' = theta - lr * grad for every parameter.
template <typename Scalar>
BasicMlp<Scalar> sgd_step(const BasicMlp<Scalar>& net,
                          const BasicGradientSet<Scalar>& grads, Scalar lr) {
  if (!grads.congruent_with(net)) {
    throw Error(Errc::kDimensionMismatch, "gradient set does not match net");
  }
  if (!grads.all_finite()) {
    throw Error(Errc::kNonFiniteGradient, "gradient contains NaN or Inf");
  }
  BasicMlp<Scalar> out = net;
  for (std::size_t i = 0; i < out.layers.size(); ++i) {
    out.layers[i].weight -= lr * grads.weight[i];
    out.layers[i].bias -= lr * grads.bias[i];
  }
  return out;
}

// Gradient descent with optional heavy-ball momentum:
//   v <- momentum * v + g;  theta <- theta - lr * v.
// With momentum == 0 a step is exactly sgd_step.
template <typename Scalar>
class SgdOptimizer {
 public:
  SgdOptimizer(Scalar lr, Scalar momentum) : lr_(lr), momentum_(momentum) {}

  void step(BasicMlp<Scalar>& net, const BasicGradientSet<Scalar>& grads) {
    if (momentum_ == Scalar(0)) {
      net = sgd_step(net, grads, lr_);
      return;
    }
    if (velocity_.weight.empty()) {
      velocity_ = BasicGradientSet<Scalar>::zeros_like(net);
    }
    velocity_ *= momentum_;
    velocity_ += grads;
    net = sgd_step(net, velocity_, lr_);
  }

  Scalar lr() const { return lr_; }

 private:
  Scalar lr_;
  Scalar momentum_;
  BasicGradientSet<Scalar> velocity_;
};

// Glorot-uniform weights, zero biases. `widths` lists every layer boundary,
// e.g. {in, hidden, out}; hidden layers use `hidden`, the last `output`.
template <typename Scalar>
BasicMlp<Scalar> make_mlp(std::span<const Index> widths, Activation hidden,
                          Activation output, Rng& rng) {
  if (widths.size() < 2) {
    throw Error(Errc::kDimensionMismatch, "need at least input and output");
  }
  BasicMlp<Scalar> net;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const Index in = widths[i];
    const Index out = widths[i + 1];
    if (in <= 0 || out <= 0) {
      throw Error(Errc::kDimensionMismatch, "layer widths must be positive");
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    LinearLayer<Scalar> l;
    l.weight.resize(out, in);
    for (Index r = 0; r < out; ++r) {
      for (Index c = 0; c < in; ++c) {
        l.weight(r, c) = static_cast<Scalar>(rng.uniform(-limit, limit));
      }
    }
    l.bias = VectorX<Scalar>::Zero(out);
    l.activation = (i + 2 == widths.size()) ? output : hidden;
    net.layers.push_back(std::move(l));
  }
  return net;
}

template <typename Scalar>
BasicMlp<Scalar> make_mlp(std::initializer_list<Index> widths,
                          Activation hidden, Activation output, Rng& rng) {
  const std::vector<Index> w(widths);
  return make_mlp<Scalar>(std::span<const Index>(w), hidden, output, rng);
}

template <typename Scalar>
struct LossEval {
  Scalar value;
  BasicGradientSet<Scalar> grads;
};

// Max over parameters of |analytic - central| / max(1e-12, |central|), where
// `central` is (L(theta + h) - L(theta - h)) / 2h and `analytic` comes from
// the loss callback evaluated at the unperturbed network.
template <typename Scalar>
Scalar finite_diff_check(
    const BasicMlp<Scalar>& net,
    const std::function<LossEval<Scalar>(const BasicMlp<Scalar>&)>& loss,
    Scalar h) {
  if (!(h > Scalar(0))) {
    throw Error(Errc::kDimensionMismatch, "step h must be positive");
  }
  const LossEval<Scalar> base = loss(net);
  if (!std::isfinite(static_cast<double>(base.value))) {
    throw Error(Errc::kNonFiniteLoss, "loss is not finite at net");
  }
  if (!base.grads.congruent_with(net)) {
    throw Error(Errc::kDimensionMismatch, "loss gradients do not match net");
  }
  BasicMlp<Scalar> probe = net;
  Scalar worst = 0;
  auto visit = [&](Scalar& param, Scalar analytic) {
    const Scalar saved = param;
    param = saved + h;
    const Scalar up = loss(probe).value;
    param = saved - h;
    const Scalar down = loss(probe).value;
    param = saved;
    if (!std::isfinite(static_cast<double>(up)) ||
        !std::isfinite(static_cast<double>(down))) {
      throw Error(Errc::kNonFiniteLoss, "loss not finite near net");
    }
    const Scalar central = (up - down) / (Scalar(2) * h);
    const Scalar denom = std::max<Scalar>(Scalar(1e-12), std::abs(central));
    worst = std::max(worst, std::abs(analytic - central) / denom);
  };
  for (std::size_t k = 0; k < probe.layers.size(); ++k) {
    auto& l = probe.layers[k];
    for (Index r = 0; r < l.weight.rows(); ++r) {
      for (Index c = 0; c < l.weight.cols(); ++c) {
        visit(l.weight(r, c), base.grads.weight[k](r, c));
      }
    }
    for (Index r = 0; r < l.bias.size(); ++r) {
      visit(l.bias(r), base.grads.bias[k](r));
    }
  }
  return worst;
}

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using RowVector = RowVectorX<double>;
using Layer = LinearLayer<double>;
using Mlp = BasicMlp<double>;
using GradientSet = BasicGradientSet<double>;

}  // namespace fairfil

#endif  // FAIRFIL_NN_HPP_
