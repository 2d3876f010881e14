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

// Mutual-information estimators used to train the filter.
//
//   InfoNCE (lower bound):
//     I_nce = 1/N sum_i [ S_ii - log( 1/N sum_j exp S_ij ) ],
//     S_ij  = g([d_i ; d'_j])
//
//   CLUB (upper bound) with a diagonal Gaussian q(w|d) = N(mu(d), exp lv(d)):
//     I_club = 1/N sum_i [ log q(w_i|d_i) - 1/N sum_j log q(w_j|d_i) ]
//
// The score network sees the concatenation of its two arguments. Its first
// layer is split column-wise so the N x N pair grid costs two N x H products
// instead of one N^2 x 2d product.

#ifndef FAIRFIL_MIEST_HPP_
#define FAIRFIL_MIEST_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fairfil/errors.hpp"
#include "fairfil/nn.hpp"

namespace fairfil {

template <typename Scalar>
struct BasicScoreNet {
  BasicMlp<Scalar> net;  // 2d -> ... -> 1

  Index pair_dim() const { return net.in_dim() / 2; }
  bool operator==(const BasicScoreNet&) const = default;
};

template <typename Scalar>
struct BasicVariationalGaussian {
  BasicMlp<Scalar> mu_net;      // d -> Dw
  BasicMlp<Scalar> logvar_net;  // d -> Dw

  Index in_dim() const { return mu_net.in_dim(); }
  Index out_dim() const { return mu_net.out_dim(); }
  bool operator==(const BasicVariationalGaussian&) const = default;
};

inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 10.0;

namespace internal {

template <typename Scalar>
void check_score_inputs(const BasicScoreNet<Scalar>& g,
                        const MatrixArg<Scalar>& d, const MatrixArg<Scalar>& dp) {
  check_well_formed(g.net);
  if (g.net.out_dim() != 1) {
    throw Error(Errc::kDimensionMismatch, "score net must have scalar output");
  }
  if (d.rows() != dp.rows() || d.cols() != dp.cols()) {
    throw Error(Errc::kDimensionMismatch, "D and D' must have the same shape");
  }
  if (d.rows() < 1) {
    throw Error(Errc::kDimensionMismatch, "score matrix needs N >= 1");
  }
  if (g.net.in_dim() != 2 * d.cols()) {
    throw Error(Errc::kDimensionMismatch,
                "score net expects " + std::to_string(g.net.in_dim()) +
                    " inputs, pair width is " + std::to_string(2 * d.cols()));
  }
}

template <typename Scalar>
BasicMlp<Scalar> tail_of(const BasicMlp<Scalar>& net) {
  BasicMlp<Scalar> tail;
  tail.layers.assign(net.layers.begin() + 1, net.layers.end());
  return tail;
}

// Pre-activation of the first score layer for every pair, row i * N + j.
template <typename Scalar>
MatrixX<Scalar> pair_preactivation(const LinearLayer<Scalar>& first,
                                   const MatrixArg<Scalar>& d,
                                   const MatrixArg<Scalar>& dp) {
  const Index n = d.rows();
  const Index w = d.cols();
  const MatrixX<Scalar> left = d * first.weight.leftCols(w).transpose();
  const MatrixX<Scalar> right = dp * first.weight.rightCols(w).transpose();
  MatrixX<Scalar> pre(n * n, first.out_dim());
  for (Index i = 0; i < n; ++i) {
    auto block = pre.middleRows(i * n, n);
    block = right;
    block.rowwise() += left.row(i) + first.bias.transpose();
  }
  return pre;
}

}  // namespace internal

// S(i, j) = g([D_i ; Dp_j]).
template <typename Scalar>
MatrixX<Scalar> score_matrix(const BasicScoreNet<Scalar>& g,
                             const MatrixArg<Scalar>& d,
                             const MatrixArg<Scalar>& dp) {
  internal::check_score_inputs(g, d, dp);
  const Index n = d.rows();
  const auto& first = g.net.layers.front();
  MatrixX<Scalar> h = internal::pair_preactivation(first, d, dp);
  apply_activation<Scalar>(first.activation, h);
  if (g.net.layers.size() > 1) h = mlp_eval(internal::tail_of(g.net), h);
  MatrixX<Scalar> s(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) s(i, j) = h(i * n + j, 0);
  }
  return s;
}

// 1/N sum_i [S_ii - logmeanexp_j S_ij], max-shifted per row.
template <typename Scalar>
Scalar infonce(const MatrixX<Scalar>& s) {
  if (s.rows() != s.cols() || s.rows() < 1) {
    throw Error(Errc::kDimensionMismatch, "score matrix must be square");
  }
  if (!s.allFinite()) {
    throw Error(Errc::kNonFiniteScore, "score matrix has NaN or Inf");
  }
  const Index n = s.rows();
  const Scalar log_n = std::log(static_cast<Scalar>(n));
  Scalar total = 0;
  for (Index i = 0; i < n; ++i) {
    const Scalar m = s.row(i).maxCoeff();
    const Scalar lse = m + std::log((s.row(i).array() - m).exp().sum());
    total += s(i, i) - (lse - log_n);
  }
  return total / static_cast<Scalar>(n);
}

// d infonce / d S: (delta_ij - softmax_j(S_i.)) / N.
template <typename Derived>
auto infonce(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> m = s;
  return infonce(m);
}

template <typename Scalar>
MatrixX<Scalar> infonce_score_grad(const MatrixX<Scalar>& s) {
  const Index n = s.rows();
  MatrixX<Scalar> grad(n, n);
  for (Index i = 0; i < n; ++i) {
    const Scalar m = s.row(i).maxCoeff();
    RowVectorX<Scalar> e = (s.row(i).array() - m).exp();
    e /= e.sum();
    grad.row(i) = -e;
    grad(i, i) += Scalar(1);
  }
  grad /= static_cast<Scalar>(n);
  return grad;
}

template <typename Scalar>
struct InfoNceGrad {
  Scalar value;
  BasicGradientSet<Scalar> score_grads;
  MatrixX<Scalar> d_grad;
  MatrixX<Scalar> dp_grad;
};

// Value of infonce(score_matrix(g, d, dp)) and its gradients with respect to
// the score parameters and both embedding batches.
template <typename Scalar>
InfoNceGrad<Scalar> infonce_grad(const BasicScoreNet<Scalar>& g,
                                 const MatrixArg<Scalar>& d,
                                 const MatrixArg<Scalar>& dp) {
  internal::check_score_inputs(g, d, dp);
  const Index n = d.rows();
  const Index w = d.cols();
  const auto& first = g.net.layers.front();

  const MatrixX<Scalar> pre = internal::pair_preactivation(first, d, dp);
  MatrixX<Scalar> hidden = pre;
  apply_activation<Scalar>(first.activation, hidden);

  const bool has_tail = g.net.layers.size() > 1;
  const BasicMlp<Scalar> tail =
      has_tail ? internal::tail_of(g.net) : BasicMlp<Scalar>{};
  ForwardResult<Scalar> tail_fwd;
  if (has_tail) tail_fwd = mlp_forward(tail, hidden);
  const MatrixX<Scalar>& flat = has_tail ? tail_fwd.output : hidden;

  MatrixX<Scalar> s(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) s(i, j) = flat(i * n + j, 0);
  }

  InfoNceGrad<Scalar> out;
  out.value = infonce(s);
  const MatrixX<Scalar> ds = infonce_score_grad(s);
  MatrixX<Scalar> dflat(n * n, 1);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) dflat(i * n + j, 0) = ds(i, j);
  }

  out.score_grads = BasicGradientSet<Scalar>::zeros_like(g.net);
  MatrixX<Scalar> dpre;
  if (has_tail) {
    BackwardResult<Scalar> back = mlp_backward(tail, tail_fwd.cache, dflat);
    for (std::size_t k = 0; k < tail.layers.size(); ++k) {
      out.score_grads.weight[k + 1] = std::move(back.param_grads.weight[k]);
      out.score_grads.bias[k + 1] = std::move(back.param_grads.bias[k]);
    }
    dpre = std::move(back.input_grad);
  } else {
    dpre = std::move(dflat);
  }
  if (first.activation == Activation::kReLU) {
    dpre.array() *= internal::relu_mask(pre);
  }

  // Fold the pair grid back onto the row (i) and column (j) operands.
  MatrixX<Scalar> by_row = MatrixX<Scalar>::Zero(n, first.out_dim());
  MatrixX<Scalar> by_col = MatrixX<Scalar>::Zero(n, first.out_dim());
  for (Index i = 0; i < n; ++i) {
    const auto block = dpre.middleRows(i * n, n);
    by_row.row(i) = block.colwise().sum();
    by_col += block;
  }
  out.score_grads.weight[0].leftCols(w) = by_row.transpose() * d;
  out.score_grads.weight[0].rightCols(w) = by_col.transpose() * dp;
  out.score_grads.bias[0] = by_row.colwise().sum().transpose();
  out.d_grad = by_row * first.weight.leftCols(w);
  out.dp_grad = by_col * first.weight.rightCols(w);
  return out;
}

namespace internal {

template <typename Scalar>
void check_gaussian_inputs(const BasicVariationalGaussian<Scalar>& q,
                           const MatrixArg<Scalar>& d,
                           const MatrixArg<Scalar>& w) {
  check_well_formed(q.mu_net);
  check_well_formed(q.logvar_net);
  if (q.mu_net.in_dim() != q.logvar_net.in_dim() ||
      q.mu_net.out_dim() != q.logvar_net.out_dim()) {
    throw Error(Errc::kDimensionMismatch, "mu and logvar heads disagree");
  }
  if (d.cols() != q.in_dim() || w.cols() != q.out_dim()) {
    throw Error(Errc::kDimensionMismatch, "q dims do not match inputs");
  }
  if (d.rows() != w.rows() || d.rows() < 1) {
    throw Error(Errc::kDimensionMismatch, "D and W must be row-aligned");
  }
}

template <typename Scalar>
struct GaussianHeads {
  ForwardResult<Scalar> mu;
  ForwardResult<Scalar> logvar_raw;
  MatrixX<Scalar> logvar;  // clamped
};

template <typename Scalar>
GaussianHeads<Scalar> gaussian_heads(const BasicVariationalGaussian<Scalar>& q,
                                     const MatrixArg<Scalar>& d) {
  GaussianHeads<Scalar> h;
  h.mu = mlp_forward(q.mu_net, d);
  h.logvar_raw = mlp_forward(q.logvar_net, d);
  h.logvar = h.logvar_raw.output.cwiseMax(Scalar(kLogVarMin))
                 .cwiseMin(Scalar(kLogVarMax));
  return h;
}

// Zero where the clamp is active.
template <typename Scalar>
MatrixX<Scalar> clamp_mask(const MatrixX<Scalar>& raw) {
  return ((raw.array() >= Scalar(kLogVarMin)) &&
          (raw.array() <= Scalar(kLogVarMax)))
      .template cast<Scalar>();
}

}  // namespace internal

// log N(w; mu(d), diag exp(logvar(d))).
template <typename Scalar>
Scalar gaussian_loglik(const BasicVariationalGaussian<Scalar>& q,
                       const VectorX<Scalar>& d, const VectorX<Scalar>& w) {
  const MatrixX<Scalar> dm = d.transpose();
  const MatrixX<Scalar> wm = w.transpose();
  internal::check_gaussian_inputs(q, dm, wm);
  const MatrixX<Scalar> mu = mlp_eval(q.mu_net, dm);
  const MatrixX<Scalar> lv = mlp_eval(q.logvar_net, dm)
                                 .cwiseMax(Scalar(kLogVarMin))
                                 .cwiseMin(Scalar(kLogVarMax));
  const Scalar log_2pi = std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  Scalar acc = 0;
  for (Index k = 0; k < w.size(); ++k) {
    const Scalar r = w(k) - mu(0, k);
    acc += r * r / std::exp(lv(0, k)) + lv(0, k) + log_2pi;
  }
  return Scalar(-0.5) * acc;
}

template <typename Scalar>
struct ClubGrad {
  Scalar value;
  MatrixX<Scalar> d_grad;
};

// CLUB value and its gradient with respect to D (q is held fixed).
//
// With m1 = mean_j w_j and m2 = mean_j w_j^2 (per coordinate) the inner mean
// over j collapses, and the log-variance and log(2 pi) terms cancel:
//   I = 1/N sum_ik -1/2 [w_ik^2 - 2 w_ik mu_ik - m2_k + 2 mu_ik m1_k] / v_ik
template <typename Scalar>
ClubGrad<Scalar> club_grad(const BasicVariationalGaussian<Scalar>& q,
                           const MatrixArg<Scalar>& d,
                           const MatrixArg<Scalar>& w) {
  internal::check_gaussian_inputs(q, d, w);
  const Index n = d.rows();
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);
  auto heads = internal::gaussian_heads(q, d);
  const MatrixX<Scalar>& mu = heads.mu.output;
  const RowVectorX<Scalar> m1 = w.colwise().mean();
  const RowVectorX<Scalar> m2 = w.array().square().matrix().colwise().mean();
  const auto inv_var = (-heads.logvar.array()).exp();

  // term_ik = -1/2 [ ... ] / v_ik
  const auto numer = w.array().square() - Scalar(2) * w.array() * mu.array() -
                     m2.replicate(n, 1).array() +
                     Scalar(2) * mu.array() * m1.replicate(n, 1).array();
  const MatrixX<Scalar> term = Scalar(-0.5) * numer * inv_var;

  ClubGrad<Scalar> out;
  out.value = term.sum() * inv_n;

  const MatrixX<Scalar> dmu =
      ((w.array() - m1.replicate(n, 1).array()) * inv_var * inv_n).matrix();
  MatrixX<Scalar> dlv = (-term.array() * inv_n).matrix();
  dlv.array() *= internal::clamp_mask(heads.logvar_raw.output).array();

  out.d_grad = mlp_backward(q.mu_net, heads.mu.cache, dmu).input_grad +
               mlp_backward(q.logvar_net, heads.logvar_raw.cache, dlv)
                   .input_grad;
  return out;
}

template <typename Scalar>
Scalar club(const BasicVariationalGaussian<Scalar>& q,
            const MatrixArg<Scalar>& d, const MatrixArg<Scalar>& w) {
  return club_grad(q, d, w).value;
}

template <typename Scalar>
struct LoglikGrad {
  Scalar mean_loglik;
  BasicGradientSet<Scalar> mu_grads;
  BasicGradientSet<Scalar> logvar_grads;
};

// Mean log-likelihood 1/N sum_i log q(w_i|d_i) and its parameter gradients.
template <typename Scalar>
LoglikGrad<Scalar> mean_loglik_grad(const BasicVariationalGaussian<Scalar>& q,
                                    const MatrixArg<Scalar>& d,
                                    const MatrixArg<Scalar>& w) {
  internal::check_gaussian_inputs(q, d, w);
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(d.rows());
  auto heads = internal::gaussian_heads(q, d);
  const auto resid = w.array() - heads.mu.output.array();
  const auto inv_var = (-heads.logvar.array()).exp();
  const Scalar log_2pi = std::log(Scalar(2) * std::numbers::pi_v<Scalar>);

  LoglikGrad<Scalar> out;
  out.mean_loglik =
      Scalar(-0.5) *
      (resid.square() * inv_var + heads.logvar.array() + log_2pi).sum() *
      inv_n;
  const MatrixX<Scalar> dmu = (resid * inv_var * inv_n).matrix();
  MatrixX<Scalar> dlv =
      (Scalar(0.5) * (resid.square() * inv_var - Scalar(1)) * inv_n).matrix();
  dlv.array() *= internal::clamp_mask(heads.logvar_raw.output).array();
  out.mu_grads = mlp_backward(q.mu_net, heads.mu.cache, dmu).param_grads;
  out.logvar_grads =
      mlp_backward(q.logvar_net, heads.logvar_raw.cache, dlv).param_grads;
  return out;
}

template <typename Scalar>
struct QFitResult {
  BasicVariationalGaussian<Scalar> q;
  Scalar mean_loglik;  // before the step
};

// One gradient-ascent step on the mean log-likelihood of the pairs (d_i, w_i).
template <typename Scalar>
QFitResult<Scalar> fit_qtheta_step(const BasicVariationalGaussian<Scalar>& q,
                                   const MatrixArg<Scalar>& d,
                                   const MatrixArg<Scalar>& w, Scalar lr) {
  LoglikGrad<Scalar> g = mean_loglik_grad(q, d, w);
  QFitResult<Scalar> out;
  out.mean_loglik = g.mean_loglik;
  // Ascent: descend on the negated objective.
  out.q.mu_net = sgd_step(q.mu_net, g.mu_grads, -lr);
  out.q.logvar_net = sgd_step(q.logvar_net, g.logvar_grads, -lr);
  return out;
}

using ScoreNet = BasicScoreNet<double>;
using VariationalGaussian = BasicVariationalGaussian<double>;

}  // namespace fairfil

#endif  // FAIRFIL_MIEST_HPP_
