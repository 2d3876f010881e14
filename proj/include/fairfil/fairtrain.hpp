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

// The fair filter and its contrastive training loop.
//
// A FairFilModel bundles the filter f (one ReLU layer, D -> D), the score
// network g used by InfoNCE, and the Gaussian q(w|d) used by CLUB. One
// training step on a batch (Z, Z', W):
//
//   1. if the regularizer is on, fit q by one likelihood-ascent step on
//      (f(Z), W) with f(Z) treated as data;
//   2. L = -I_nce(g; f(Z), f(Z')) + beta * I_club(q; f(Z), W);
//   3. one gradient step on f and g w.r.t. L. q is not touched by L.

#ifndef FAIRFIL_FAIRTRAIN_HPP_
#define FAIRFIL_FAIRTRAIN_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairfil/miest.hpp"
#include "fairfil/nn.hpp"
#include "fairfil/token_table.hpp"

namespace fairfil {

enum class FilterInit { kIdentity, kGlorot };

struct ModelOptions {
  Index embed_dim = 0;
  Index token_dim = 0;
  Index score_hidden = 0;  // 0: 2 * embed_dim
  Index q_hidden = 0;      // 0: embed_dim
  FilterInit filter_init = FilterInit::kIdentity;
};

struct FairFilModel {
  Mlp filter;
  ScoreNet score;
  VariationalGaussian qtheta;
  Index embed_dim = 0;
  Index token_dim = 0;
  std::uint64_t seed = 0;

  bool operator==(const FairFilModel&) const = default;
};

FairFilModel make_model(const ModelOptions& options, std::uint64_t seed);

// Throws DimensionMismatch unless the component shapes fit together.
void validate(const FairFilModel& m);

enum class WordSampling { kSampleOne, kAverageAll };

struct TrainConfig {
  std::size_t batch_size = 128;
  double lr = 1e-5;
  double q_lr = 0.0;  // 0: same as lr
  std::size_t epochs = 10;
  double beta = 0.1;
  bool use_regularizer = true;
  std::uint64_t seed = 0;
  double momentum = 0.0;
  WordSampling word_sampling = WordSampling::kSampleOne;

  double effective_q_lr() const { return q_lr > 0.0 ? q_lr : lr; }
};

// Throws BadConfig.
void validate(const TrainConfig& cfg);

struct TrainingBatch {
  Matrix z;
  Matrix z_aug;
  std::optional<Matrix> words;  // one sensitive-word embedding per row
};

// Row-wise d = ReLU(W z + b).
Matrix apply_filter(const FairFilModel& m, const Matrix& z);

struct LossReport {
  double loss = 0.0;
  double i_nce = 0.0;
  double i_club = 0.0;
};

LossReport batch_loss(const FairFilModel& m, const TrainingBatch& b,
                      double beta, bool use_reg);

struct StepStats {
  double loss = 0.0;
  double i_nce = 0.0;
  double i_club = 0.0;
  double q_loglik = 0.0;
};

// Stateful form of train_step that keeps momentum buffers across steps.
class Trainer {
 public:
  Trainer(FairFilModel model, TrainConfig cfg);

  // loss / i_nce / i_club are re-evaluated on the batch after the update;
  // q_loglik is the likelihood before q's own step.
  StepStats step(const TrainingBatch& b);

  const FairFilModel& model() const { return model_; }
  FairFilModel release() && { return std::move(model_); }

 private:
  FairFilModel model_;
  TrainConfig cfg_;
  SgdOptimizer<double> filter_opt_;
  SgdOptimizer<double> score_opt_;
};

struct StepResult {
  FairFilModel model;
  StepStats stats;
};

StepResult train_step(const FairFilModel& m, const TrainingBatch& b,
                      const TrainConfig& cfg);

// Sentence index -> sensitive words found in it (lowercase lexicon forms).
using SensitiveMap = std::map<std::size_t, std::vector<std::string>>;

// Rows of (Z, Z') that contain at least one sensitive word, with the words
// resolved against the token table.
struct TrainingSet {
  Matrix z;
  Matrix z_aug;
  std::vector<std::size_t> source_rows;
  std::vector<std::string> vocab;
  Matrix vocab_vectors;  // vocab.size() x token_dim; empty without table
  std::vector<std::vector<std::size_t>> row_words;  // indices into vocab

  std::size_t size() const { return source_rows.size(); }
  bool has_words() const { return vocab_vectors.rows() > 0; }
};

// `tokens` may be null when the regularizer is off.
TrainingSet make_training_set(const Matrix& z, const Matrix& z_aug,
                              const SensitiveMap& map, const TokenTable* tokens,
                              bool use_reg);

// Rows shuffled with (cfg.seed, epoch) and cut into batch_size chunks; a
// final chunk is kept if it has at least two rows. Words are picked per row
// per epoch according to cfg.word_sampling.
std::vector<TrainingBatch> assemble_batches(const TrainingSet& set,
                                            const TrainConfig& cfg,
                                            std::size_t epoch);

struct EpochStats {
  std::size_t epoch = 0;
  std::size_t batches = 0;
  double loss = 0.0;
  double i_nce = 0.0;
  double i_club = 0.0;
  double q_loglik = 0.0;
};

struct TrainResult {
  FairFilModel model;
  std::vector<EpochStats> history;
};

TrainResult train(const FairFilModel& m, const TrainingSet& set,
                  const TrainConfig& cfg);

}  // namespace fairfil

#endif  // FAIRFIL_FAIRTRAIN_HPP_
