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

#include "fairfil/biaseval.hpp"

#include <algorithm>
#include <cmath>

#include "fairfil/errors.hpp"
#include "fairfil/rng.hpp"

namespace fairfil {
namespace {

void check_set(const Matrix& m, const char* name) {
  if (m.rows() == 0) {
    throw Error(Errc::kEmptySet, std::string("set ") + name + " is empty");
  }
}

Vector random_normal(Rng& rng, Index dim) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.normal();
  return v;
}

// Gram-Schmidt step: v made orthogonal to every unit vector in `basis`.
Vector orthonormalize(Vector v, const std::vector<Vector>& basis) {
  for (const auto& b : basis) v -= v.dot(b) * b;
  return v / v.norm();
}

}  // namespace

double bias_degree(const Vector& t, const Matrix& a, const Matrix& b) {
  check_set(a, "A");
  check_set(b, "B");
  if (a.cols() != t.size() || b.cols() != t.size()) {
    throw Error(Errc::kDimensionMismatch, "attribute width != target width");
  }
  double sa = 0.0;
  for (Index i = 0; i < a.rows(); ++i) sa += cosine(t, a.row(i).transpose());
  double sb = 0.0;
  for (Index i = 0; i < b.rows(); ++i) sb += cosine(t, b.row(i).transpose());
  return sa / static_cast<double>(a.rows()) -
         sb / static_cast<double>(b.rows());
}

double effect_size(const AssociationTest& test, StdConvention convention) {
  check_set(test.x, "X");
  check_set(test.y, "Y");
  check_set(test.a, "A");
  check_set(test.b, "B");
  const Index dim = test.x.cols();
  if (test.y.cols() != dim || test.a.cols() != dim || test.b.cols() != dim) {
    throw Error(Errc::kDimensionMismatch,
                "sets of test '" + test.name + "' have different widths");
  }
  std::vector<double> sx, sy;
  for (Index i = 0; i < test.x.rows(); ++i) {
    sx.push_back(bias_degree(test.x.row(i).transpose(), test.a, test.b));
  }
  for (Index i = 0; i < test.y.rows(); ++i) {
    sy.push_back(bias_degree(test.y.row(i).transpose(), test.a, test.b));
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e;
    return s / static_cast<double>(v.size());
  };
  std::vector<double> pooled = sx;
  pooled.insert(pooled.end(), sy.begin(), sy.end());
  const double mu = mean(pooled);
  double ss = 0.0;
  for (double e : pooled) ss += (e - mu) * (e - mu);
  const double denom = convention == StdConvention::kPopulation
                           ? static_cast<double>(pooled.size())
                           : static_cast<double>(pooled.size() - 1);
  const double sd = denom > 0.0 ? std::sqrt(ss / denom) : 0.0;
  if (!(sd >= kDegenerateStd)) {
    throw Error(Errc::kDegenerateTest,
                "test '" + test.name + "' has zero spread of s over X u Y");
  }
  return (mean(sx) - mean(sy)) / sd;
}

EffectSizeReport summarize(const std::vector<TestEffect>& effects) {
  if (effects.empty()) {
    throw Error(Errc::kEmptySet, "no tests to summarize");
  }
  EffectSizeReport r;
  double total = 0.0;
  for (const auto& e : effects) {
    TestEffect t = e;
    t.abs_effect_size = std::abs(e.effect_size);
    total += t.abs_effect_size;
    r.tests.push_back(std::move(t));
  }
  r.average_abs_effect_size = total / static_cast<double>(r.tests.size());
  return r;
}

EffectSizeReport seat_suite(const std::vector<AssociationTest>& tests,
                            StdConvention convention) {
  std::vector<TestEffect> effects;
  effects.reserve(tests.size());
  for (const auto& t : tests) {
    effects.push_back({t.name, effect_size(t, convention), 0.0});
  }
  return summarize(effects);
}

double linear_probe(const Matrix& train_x, const std::vector<int>& train_y,
                    const Matrix& test_x, const std::vector<int>& test_y,
                    const ProbeConfig& cfg) {
  if (train_x.cols() != test_x.cols()) {
    throw Error(Errc::kDimensionMismatch, "train/test widths differ");
  }
  if (static_cast<Index>(train_y.size()) != train_x.rows() ||
      static_cast<Index>(test_y.size()) != test_x.rows()) {
    throw Error(Errc::kDimensionMismatch, "label count != row count");
  }
  if (test_x.rows() == 0) throw Error(Errc::kEmptySet, "empty test set");
  const bool has0 = std::find(train_y.begin(), train_y.end(), 0) != train_y.end();
  const bool has1 = std::find(train_y.begin(), train_y.end(), 1) != train_y.end();
  if (!has0 || !has1) {
    throw Error(Errc::kSingleClassTraining,
                "training labels must contain both classes");
  }

  RowVector shift = RowVector::Zero(train_x.cols());
  RowVector scale = RowVector::Ones(train_x.cols());
  if (cfg.standardize) {
    shift = train_x.colwise().mean();
    const Matrix centered = train_x.rowwise() - shift;
    const RowVector sd =
        (centered.array().square().colwise().mean()).sqrt().matrix();
    for (Index c = 0; c < sd.size(); ++c) {
      scale(c) = sd(c) > 1e-12 ? 1.0 / sd(c) : 1.0;
    }
  }
  const Matrix xtr =
      ((train_x.rowwise() - shift).array().rowwise() * scale.array()).matrix();
  const Matrix xte =
      ((test_x.rowwise() - shift).array().rowwise() * scale.array()).matrix();
  Matrix ytr(train_x.rows(), 1);
  for (Index i = 0; i < ytr.rows(); ++i) ytr(i, 0) = train_y[i];

  Rng rng(cfg.seed);
  Mlp net = make_mlp<double>({train_x.cols(), 1}, Activation::kIdentity,
                             Activation::kIdentity, rng);
  const double inv_n = 1.0 / static_cast<double>(xtr.rows());
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    const auto fwd = mlp_forward(net, xtr);
    // d/dlogit of mean binary cross-entropy.
    const Matrix grad =
        ((1.0 / (1.0 + (-fwd.output.array()).exp())).matrix() - ytr) * inv_n;
    net = sgd_step(net, mlp_backward(net, fwd.cache, grad).param_grads, cfg.lr);
  }
  const Matrix logits = mlp_eval(net, xte);
  Index correct = 0;
  for (Index i = 0; i < logits.rows(); ++i) {
    const int pred = logits(i, 0) > 0.0 ? 1 : 0;
    if (pred == test_y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

void validate(const SynthSpec& spec) {
  if (spec.dim < 2) throw Error(Errc::kBadConfig, "synth dim must be >= 2");
  if (spec.n_per_group < 2) {
    throw Error(Errc::kBadConfig, "synth n_per_group must be >= 2");
  }
  if (spec.seat_tests == 0 || spec.seat_targets == 0 ||
      spec.seat_attributes == 0 || spec.template_count == 0) {
    throw Error(Errc::kBadConfig, "synth SEAT sizes must be positive");
  }
  if (spec.dim < 4) {
    throw Error(Errc::kBadConfig,
                "synth dim must be >= 4 to fit the attribute clusters");
  }
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.bias_strength)) {
    throw Error(Errc::kBadConfig, "synth noise/bias must be finite");
  }
}

SynthCorpus synth_biased_corpus(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const Index dim = spec.dim;

  SynthCorpus out;
  Vector g = random_normal(rng, dim);
  g(0) = 0.0;
  g /= g.norm();
  out.bias_direction = g;

  auto sentence = [&](const Vector& s, int sigma) -> Vector {
    return s + spec.bias_strength * sigma * g +
           spec.noise_sigma * random_normal(rng, dim);
  };

  const auto n = static_cast<Index>(2 * spec.n_per_group);
  out.z.resize(n, dim);
  out.z_aug.resize(n, dim);
  out.words.resize(n, dim);
  for (Index i = 0; i < n; ++i) {
    const int sigma = (i % 2 == 0) ? 1 : -1;
    const Vector s = random_normal(rng, dim);
    out.z.row(i) = sentence(s, sigma).transpose();
    out.z_aug.row(i) = sentence(s, -sigma).transpose();
    out.words.row(i) = (sigma * spec.token_scale) * g.transpose();
    out.groups.push_back(sigma);
    out.labels.push_back(s(0) > 0.0 ? 1 : 0);
  }

  const auto nt = static_cast<Index>(2 * spec.test_per_group);
  out.test_z.resize(nt, dim);
  for (Index i = 0; i < nt; ++i) {
    const int sigma = (i % 2 == 0) ? 1 : -1;
    const Vector s = random_normal(rng, dim);
    out.test_z.row(i) = sentence(s, sigma).transpose();
    out.test_labels.push_back(s(0) > 0.0 ? 1 : 0);
  }

  const auto targets = static_cast<Index>(spec.seat_targets);
  const auto attrs = static_cast<Index>(spec.seat_attributes);
  for (std::size_t t = 0; t < spec.seat_tests; ++t) {
    AssociationTest test;
    test.name = "synthetic-" + std::to_string(t + 1);
    const Vector ca = orthonormalize(random_normal(rng, dim), {g});
    const Vector cb = orthonormalize(random_normal(rng, dim), {g, ca});
    auto target_set = [&](int sigma) {
      Matrix m(targets, dim);
      for (Index i = 0; i < targets; ++i) {
        Vector acc = Vector::Zero(dim);
        for (std::size_t k = 0; k < spec.template_count; ++k) {
          acc += sentence(random_normal(rng, dim), sigma);
        }
        m.row(i) = (acc / static_cast<double>(spec.template_count)).transpose();
      }
      return m;
    };
    auto attribute_set = [&](const Vector& center, int sigma) {
      Matrix m(attrs, dim);
      for (Index i = 0; i < attrs; ++i) {
        m.row(i) = (spec.attribute_scale * center +
                    spec.attribute_tint * sigma * g +
                    spec.attribute_noise * random_normal(rng, dim))
                       .transpose();
      }
      return m;
    };
    test.x = target_set(1);
    test.y = target_set(-1);
    test.a = attribute_set(ca, 1);
    test.b = attribute_set(cb, -1);
    out.seat_tests.push_back(std::move(test));
  }
  return out;
}

}  // namespace fairfil
