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

#ifndef FAIRFIL_BIASEVAL_HPP_
#define FAIRFIL_BIASEVAL_HPP_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "fairfil/nn.hpp"

namespace fairfil {

// Rows of each matrix are the embeddings of one set.
struct AssociationTest {
  std::string name;
  Matrix x;  // targets
  Matrix y;
  Matrix a;  // attributes
  Matrix b;
};

enum class StdConvention { kPopulation, kSample };

// Threshold below which the pooled std makes a test degenerate.
inline constexpr double kDegenerateStd = 1e-12;

template <typename DerivedU, typename DerivedV>
double cosine(const Eigen::MatrixBase<DerivedU>& u,
              const Eigen::MatrixBase<DerivedV>& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw Error(Errc::kZeroVector, "cosine of a zero vector");
  }
  const double c = u.dot(v) / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

// s(t, A, B) = mean_a cos(t, a) - mean_b cos(t, b).
double bias_degree(const Vector& t, const Matrix& a, const Matrix& b);

double effect_size(const AssociationTest& test,
                   StdConvention convention = StdConvention::kPopulation);

struct TestEffect {
  std::string name;
  double effect_size = 0.0;
  double abs_effect_size = 0.0;
};

struct EffectSizeReport {
  std::vector<TestEffect> tests;
  double average_abs_effect_size = 0.0;
};

// Builds a report from already computed signed effect sizes.
EffectSizeReport summarize(const std::vector<TestEffect>& effects);

EffectSizeReport seat_suite(const std::vector<AssociationTest>& tests,
                            StdConvention convention =
                                StdConvention::kPopulation);

struct ProbeConfig {
  std::size_t epochs = 1000;
  double lr = 1.0;
  std::uint64_t seed = 0;
  bool standardize = true;
};

// Logistic regression (one Identity layer, full-batch gradient descent) on
// frozen embeddings. Returns test accuracy in [0, 1].
double linear_probe(const Matrix& train_x, const std::vector<int>& train_y,
                    const Matrix& test_x, const std::vector<int>& test_y,
                    const ProbeConfig& cfg = {});

struct SynthSpec {
  std::size_t n_per_group = 2000;
  Index dim = 32;
  double bias_strength = 2.0;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;

  double token_scale = 1.0;
  std::size_t test_per_group = 500;
  std::size_t seat_tests = 6;
  std::size_t seat_targets = 64;
  std::size_t seat_attributes = 32;
  std::size_t template_count = 6;
  double attribute_scale = 2.0;
  double attribute_tint = 1.0;
  double attribute_noise = 0.5;
};

void validate(const SynthSpec& spec);

// Synthetic corpus in which all bias sits on one direction g:
//   z  = s + bias_strength * sigma * g + noise
//   z' = s - bias_strength * sigma * g + noise'
//   w  = sigma * token_scale * g
// with s ~ N(0, I), sigma = +1 / -1 alternating by row, g orthogonal to the
// first axis and label = [s_0 > 0]. SEAT targets are means over
// template_count samples of each group; attribute sets sit on two orthogonal
// clusters tinted +g and -g.
struct SynthCorpus {
  Matrix z;
  Matrix z_aug;
  Matrix words;
  std::vector<int> groups;  // +1 / -1
  std::vector<int> labels;  // 0 / 1
  Matrix test_z;
  std::vector<int> test_labels;
  Vector bias_direction;
  std::vector<AssociationTest> seat_tests;
};

SynthCorpus synth_biased_corpus(const SynthSpec& spec);

}  // namespace fairfil

#endif  // FAIRFIL_BIASEVAL_HPP_
