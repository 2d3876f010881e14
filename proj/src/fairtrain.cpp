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

#include "fairfil/fairtrain.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "fairfil/errors.hpp"
#include "fairfil/rng.hpp"

namespace fairfil {
namespace {

void check_batch(const FairFilModel& m, const TrainingBatch& b, bool use_reg) {
  if (b.z.rows() != b.z_aug.rows()) {
    throw Error(Errc::kRowCountMismatch, "Z and Z' row counts differ");
  }
  if (b.z.cols() != m.embed_dim || b.z_aug.cols() != m.embed_dim) {
    throw Error(Errc::kDimensionMismatch, "batch width != embed_dim");
  }
  if (b.z.rows() < 2) {
    throw Error(Errc::kBatchTooSmall, "InfoNCE needs at least two rows");
  }
  if (use_reg) {
    if (!b.words) {
      throw Error(Errc::kMissingWordEmbeddings,
                  "regularizer on but batch has no word embeddings");
    }
    if (b.words->rows() != b.z.rows()) {
      throw Error(Errc::kRowCountMismatch, "word rows != batch rows");
    }
    if (b.words->cols() != m.token_dim) {
      throw Error(Errc::kDimensionMismatch, "word width != token_dim");
    }
  }
}

}  // namespace

FairFilModel make_model(const ModelOptions& options, std::uint64_t seed) {
  const Index d = options.embed_dim;
  const Index dw = options.token_dim;
  if (d <= 0 || dw <= 0) {
    throw Error(Errc::kDimensionMismatch, "embed_dim and token_dim must be > 0");
  }
  const Index hs = options.score_hidden > 0 ? options.score_hidden : 2 * d;
  const Index hq = options.q_hidden > 0 ? options.q_hidden : d;
  Rng rng(seed);
  FairFilModel m;
  m.embed_dim = d;
  m.token_dim = dw;
  m.seed = seed;
  m.filter = make_mlp<double>({d, d}, Activation::kReLU, Activation::kReLU, rng);
  if (options.filter_init == FilterInit::kIdentity) {
    m.filter.layers[0].weight.setIdentity();
  }
  m.score.net = make_mlp<double>({2 * d, hs, 1}, Activation::kReLU,
                                 Activation::kIdentity, rng);
  m.qtheta.mu_net = make_mlp<double>({d, hq, dw}, Activation::kReLU,
                                     Activation::kIdentity, rng);
  m.qtheta.logvar_net = make_mlp<double>({d, hq, dw}, Activation::kReLU,
                                         Activation::kIdentity, rng);
  return m;
}

void validate(const FairFilModel& m) {
  check_well_formed(m.filter);
  check_well_formed(m.score.net);
  check_well_formed(m.qtheta.mu_net);
  check_well_formed(m.qtheta.logvar_net);
  if (m.filter.in_dim() != m.embed_dim || m.filter.out_dim() != m.embed_dim) {
    throw Error(Errc::kDimensionMismatch, "filter must map D -> D");
  }
  if (m.score.net.in_dim() != 2 * m.embed_dim || m.score.net.out_dim() != 1) {
    throw Error(Errc::kDimensionMismatch, "score net must map 2D -> 1");
  }
  for (const Mlp* head : {&m.qtheta.mu_net, &m.qtheta.logvar_net}) {
    if (head->in_dim() != m.embed_dim || head->out_dim() != m.token_dim) {
      throw Error(Errc::kDimensionMismatch, "q heads must map D -> Dw");
    }
  }
}

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size < 2) {
    throw Error(Errc::kBadConfig, "batch_size must be at least 2");
  }
  if (!std::isfinite(cfg.lr) || cfg.lr < 0.0) {
    throw Error(Errc::kBadConfig, "lr must be finite and non-negative");
  }
  if (!std::isfinite(cfg.q_lr) || cfg.q_lr < 0.0) {
    throw Error(Errc::kBadConfig, "q_lr must be finite and non-negative");
  }
  if (!std::isfinite(cfg.beta) || cfg.beta < 0.0) {
    throw Error(Errc::kBadConfig, "beta must be >= 0");
  }
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw Error(Errc::kBadConfig, "momentum must be in [0, 1)");
  }
}

Matrix apply_filter(const FairFilModel& m, const Matrix& z) {
  if (z.cols() != m.embed_dim) {
    throw Error(Errc::kDimensionMismatch,
                "input width " + std::to_string(z.cols()) + " != embed_dim " +
                    std::to_string(m.embed_dim));
  }
  return mlp_eval(m.filter, z);
}

LossReport batch_loss(const FairFilModel& m, const TrainingBatch& b,
                      double beta, bool use_reg) {
  check_batch(m, b, use_reg);
  const Matrix d = apply_filter(m, b.z);
  const Matrix dp = apply_filter(m, b.z_aug);
  LossReport r;
  r.i_nce = infonce(score_matrix(m.score, d, dp));
  if (use_reg) r.i_club = club(m.qtheta, d, *b.words);
  r.loss = -r.i_nce + (use_reg ? beta * r.i_club : 0.0);
  return r;
}

Trainer::Trainer(FairFilModel model, TrainConfig cfg)
    : model_(std::move(model)),
      cfg_(cfg),
      filter_opt_(cfg.lr, cfg.momentum),
      score_opt_(cfg.lr, cfg.momentum) {
  validate(model_);
  validate(cfg_);
}

StepStats Trainer::step(const TrainingBatch& b) {
  const bool reg = cfg_.use_regularizer;
  check_batch(model_, b, reg);
  StepStats st;

  if (reg) {
    const Matrix d_fixed = mlp_eval(model_.filter, b.z);
    auto fit = fit_qtheta_step(model_.qtheta, d_fixed, *b.words,
                               cfg_.effective_q_lr());
    model_.qtheta = std::move(fit.q);
    st.q_loglik = fit.mean_loglik;
  }

  const auto fz = mlp_forward(model_.filter, b.z);
  const auto fzp = mlp_forward(model_.filter, b.z_aug);
  auto nce = infonce_grad(model_.score, fz.output, fzp.output);

  // dL/d for L = -I_nce + beta * I_club.
  Matrix d_grad = -nce.d_grad;
  const Matrix dp_grad = -nce.dp_grad;
  GradientSet score_grads = std::move(nce.score_grads);
  score_grads *= -1.0;
  double club_value = 0.0;
  if (reg) {
    const auto c = club_grad(model_.qtheta, fz.output, *b.words);
    club_value = c.value;
    d_grad += cfg_.beta * c.d_grad;
  }
  const double loss = -nce.value + (reg ? cfg_.beta * club_value : 0.0);
  if (!std::isfinite(loss)) {
    throw Error(Errc::kNonFiniteLoss, "training loss is not finite");
  }

  GradientSet filter_grads =
      mlp_backward(model_.filter, fz.cache, d_grad).param_grads;
  filter_grads += mlp_backward(model_.filter, fzp.cache, dp_grad).param_grads;

  filter_opt_.step(model_.filter, filter_grads);
  score_opt_.step(model_.score.net, score_grads);

  const LossReport after = batch_loss(model_, b, cfg_.beta, reg);
  st.loss = after.loss;
  st.i_nce = after.i_nce;
  st.i_club = after.i_club;
  return st;
}

StepResult train_step(const FairFilModel& m, const TrainingBatch& b,
                      const TrainConfig& cfg) {
  Trainer t(m, cfg);
  StepResult r;
  r.stats = t.step(b);
  r.model = std::move(t).release();
  return r;
}

TrainingSet make_training_set(const Matrix& z, const Matrix& z_aug,
                              const SensitiveMap& map, const TokenTable* tokens,
                              bool use_reg) {
  if (z.rows() != z_aug.rows()) {
    throw Error(Errc::kRowCountMismatch,
                "Z has " + std::to_string(z.rows()) + " rows, Z' has " +
                    std::to_string(z_aug.rows()));
  }
  if (z.cols() != z_aug.cols()) {
    throw Error(Errc::kDimensionMismatch, "Z and Z' widths differ");
  }
  if (use_reg && tokens == nullptr) {
    throw Error(Errc::kMissingWordEmbeddings,
                "regularizer needs a token embedding table");
  }
  const bool resolve = use_reg;

  TrainingSet set;
  std::unordered_map<std::string, std::size_t> vocab_index;
  for (const auto& [row, words] : map) {
    if (row >= static_cast<std::size_t>(z.rows())) {
      throw Error(Errc::kRowCountMismatch,
                  "sensitive map row " + std::to_string(row) +
                      " beyond corpus of " + std::to_string(z.rows()));
    }
    if (words.empty()) continue;
    std::vector<std::size_t> ids;
    if (resolve) {
      for (const auto& w : words) {
        auto it = vocab_index.find(w);
        if (it == vocab_index.end()) {
          if (tokens->find(w) == nullptr) {
            throw Error(Errc::kUnknownWord,
                        "'" + w + "' is not in the token table");
          }
          it = vocab_index.emplace(w, set.vocab.size()).first;
          set.vocab.push_back(w);
        }
        ids.push_back(it->second);
      }
    }
    set.source_rows.push_back(row);
    set.row_words.push_back(std::move(ids));
  }
  if (set.source_rows.empty()) {
    throw Error(Errc::kEmptyDataset, "no row contains a sensitive word");
  }

  const auto n = static_cast<Index>(set.source_rows.size());
  set.z.resize(n, z.cols());
  set.z_aug.resize(n, z.cols());
  for (Index i = 0; i < n; ++i) {
    const auto src = static_cast<Index>(set.source_rows[i]);
    set.z.row(i) = z.row(src);
    set.z_aug.row(i) = z_aug.row(src);
  }
  if (resolve) {
    set.vocab_vectors.resize(static_cast<Index>(set.vocab.size()),
                             tokens->dim());
    for (std::size_t k = 0; k < set.vocab.size(); ++k) {
      set.vocab_vectors.row(static_cast<Index>(k)) =
          tokens->find(set.vocab[k])->transpose();
    }
  }
  return set;
}

std::vector<TrainingBatch> assemble_batches(const TrainingSet& set,
                                            const TrainConfig& cfg,
                                            std::size_t epoch) {
  validate(cfg);
  if (cfg.use_regularizer && !set.has_words()) {
    throw Error(Errc::kMissingWordEmbeddings,
                "training set was built without word embeddings");
  }
  Rng rng(mix_seed(cfg.seed, epoch));
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<TrainingBatch> batches;
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t len = std::min(cfg.batch_size, order.size() - start);
    if (len < 2) break;
    TrainingBatch b;
    const auto n = static_cast<Index>(len);
    b.z.resize(n, set.z.cols());
    b.z_aug.resize(n, set.z.cols());
    if (cfg.use_regularizer) b.words = Matrix(n, set.vocab_vectors.cols());
    for (Index i = 0; i < n; ++i) {
      const std::size_t r = order[start + static_cast<std::size_t>(i)];
      b.z.row(i) = set.z.row(static_cast<Index>(r));
      b.z_aug.row(i) = set.z_aug.row(static_cast<Index>(r));
      if (!cfg.use_regularizer) continue;
      const auto& ids = set.row_words[r];
      if (cfg.word_sampling == WordSampling::kSampleOne) {
        const std::size_t pick = ids[rng.below(ids.size())];
        b.words->row(i) = set.vocab_vectors.row(static_cast<Index>(pick));
      } else {
        RowVector acc = RowVector::Zero(set.vocab_vectors.cols());
        for (std::size_t id : ids) {
          acc += set.vocab_vectors.row(static_cast<Index>(id));
        }
        b.words->row(i) = acc / static_cast<double>(ids.size());
      }
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

TrainResult train(const FairFilModel& m, const TrainingSet& set,
                  const TrainConfig& cfg) {
  validate(cfg);
  if (set.size() < 2) {
    throw Error(Errc::kEmptyDataset, "need at least two training rows");
  }
  Trainer trainer(m, cfg);
  TrainResult result;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches = assemble_batches(set, cfg, epoch);
    EpochStats es;
    es.epoch = epoch;
    for (const auto& b : batches) {
      const StepStats st = trainer.step(b);
      es.loss += st.loss;
      es.i_nce += st.i_nce;
      es.i_club += st.i_club;
      es.q_loglik += st.q_loglik;
      ++es.batches;
    }
    const double inv = 1.0 / static_cast<double>(es.batches);
    es.loss *= inv;
    es.i_nce *= inv;
    es.i_club *= inv;
    es.q_loglik *= inv;
    result.history.push_back(es);
  }
  result.model = std::move(trainer).release();
  return result;
}

}  // namespace fairfil
