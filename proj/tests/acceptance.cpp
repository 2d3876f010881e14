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

// Acceptance suite. `acceptance N` runs one criterion, `acceptance` runs all.
// Each criterion prints a single PASS/FAIL line; the exit status is nonzero
// when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "fairfil/biaseval.hpp"
#include "fairfil/errors.hpp"
#include "fairfil/fairtrain.hpp"
#include "fairfil/io.hpp"
#include "fairfil/miest.hpp"
#include "fairfil/rng.hpp"
#include "fairfil/textaug.hpp"

namespace {

using namespace fairfil;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and bands.
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 5.0;
constexpr double kBoundSlack = 1e-9;
constexpr double kHandInfoNce = 0.693147;
constexpr double kHandInfoNceTol = 1e-6;
constexpr double kClubHandTol = 1e-12;
constexpr double kClubZeroTol = 1e-12;
constexpr double kNceLo = 0.30, kNceHi = 0.57;
constexpr double kClubLo = 0.45, kClubHi = 1.00;
constexpr double kSandwichSlack = 0.05;
constexpr double kMiSeconds = 60.0;
constexpr double kBaselineMin = 1.0;
constexpr double kFilteredMax = 0.3;
constexpr double kMinReduction = 0.70;
constexpr double kMaxProbeDrop = 0.05;
constexpr double kSynthSeconds = 300.0;
constexpr double kDeskLr = 3e-3;
constexpr double kOracleTol = 1e-12;
constexpr double kTableAverage = 0.1505;
constexpr double kTableTol = 1e-12;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(int id, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  return ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix random_matrix(Index r, Index c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

// ---- 1: gradient correctness ----

bool gradient_correctness() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t layers = 1 + rng.below(3);
    std::vector<Index> widths;
    for (std::size_t k = 0; k <= layers; ++k) {
      widths.push_back(1 + static_cast<Index>(rng.below(8)));
    }
    Mlp net = make_mlp<double>(std::span<const Index>(widths), Activation::kReLU,
                               Activation::kIdentity, rng);
    for (auto& l : net.layers) l.bias = random_matrix(l.out_dim(), 1, rng, 0.5);
    const Matrix x = random_matrix(1 + static_cast<Index>(rng.below(6)),
                                   widths.front(), rng);
    const Matrix c = random_matrix(x.rows(), widths.back(), rng);
    const Matrix t = random_matrix(x.rows(), widths.back(), rng);
    // L = sum(C .* tanh(Y)) + 1/2 |Y - T|^2, smooth in the outputs.
    auto loss = [&](const Mlp& m) {
      auto fwd = mlp_forward(m, x);
      const auto y = fwd.output.array();
      const double value = (c.array() * y.tanh()).sum() +
                           0.5 * (y - t.array()).square().sum();
      const Matrix dy =
          (c.array() * (1.0 - y.tanh().square()) + (y - t.array())).matrix();
      return LossEval<double>{value, mlp_backward(m, fwd.cache, dy).param_grads};
    };
    worst = std::max(worst, finite_diff_check<double>(net, loss, 1e-5));
  }
  const double secs = seconds_since(t0);
  return report(1, worst < kGradTol && secs < kGradSeconds,
                fmt("gradient check over 50 random nets: max rel err %.3g (< %g), "
                    "%.2f s (< %g s)",
                    worst, kGradTol, secs, kGradSeconds));
}

// ---- 2: InfoNCE bound ----

bool infonce_bound() {
  Rng rng(202);
  double worst_excess = -1e300;
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(16));
    Matrix s(n, n);
    for (Index i = 0; i < s.size(); ++i) s.data()[i] = rng.uniform(-50.0, 50.0);
    const double excess = infonce(s) - std::log(static_cast<double>(n));
    worst_excess = std::max(worst_excess, excess);
    if (excess > kBoundSlack) ++violations;
  }
  Matrix hand(2, 2);
  hand << 10, -10, -10, 10;
  const double v = infonce(hand);
  const bool ok = violations == 0 && std::abs(v - kHandInfoNce) <= kHandInfoNceTol;
  return report(2, ok,
                fmt("1000 random S: %d bound violations, max(I - ln N) = %.3g; "
                    "hand case %.9f (target %.6f +- %g)",
                    violations, worst_excess, v, kHandInfoNce, kHandInfoNceTol));
}

// ---- 3: CLUB hand case and vanishing ----

bool club_cases() {
  Layer ident;
  ident.weight = Matrix::Identity(1, 1);
  ident.bias = Vector::Zero(1);
  Layer zero;
  zero.weight = Matrix::Zero(1, 1);
  zero.bias = Vector::Zero(1);
  VariationalGaussian q;
  q.mu_net.layers = {ident};
  q.logvar_net.layers = {zero};
  Matrix d(2, 1);
  d << 0, 1;
  const double hand = club(q, d, d);

  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index dim = 1 + static_cast<Index>(rng.below(6));
    const Index dw = 1 + static_cast<Index>(rng.below(4));
    const Index n = 1 + static_cast<Index>(rng.below(10));
    VariationalGaussian c;
    Layer mu, lv;
    mu.weight = Matrix::Zero(dw, dim);
    mu.bias = random_matrix(dw, 1, rng);
    lv.weight = Matrix::Zero(dw, dim);
    lv.bias = random_matrix(dw, 1, rng);
    c.mu_net.layers = {mu};
    c.logvar_net.layers = {lv};
    worst = std::max(worst, std::abs(club(c, random_matrix(n, dim, rng),
                                          random_matrix(n, dw, rng))));
  }
  const bool ok = std::abs(hand - 0.25) <= kClubHandTol && worst <= kClubZeroTol;
  return report(3, ok,
                fmt("hand case %.15f (target 0.25 +- %g); d-independent q over 100 "
                    "instances: max |CLUB| %.3g (<= %g)",
                    hand, kClubHandTol, worst, kClubZeroTol));
}

// ---- 4: MI sandwich on correlated Gaussians ----

bool mi_sandwich() {
  const auto t0 = Clock::now();
  constexpr double rho = 0.8;
  constexpr Index n = 10000;
  constexpr Index batch = 128;
  constexpr int steps = 2000;
  constexpr double lr = 0.01;
  constexpr Index hidden = 16;
  const double true_mi = -0.5 * std::log(1.0 - rho * rho);

  Rng rng(404);
  Matrix x(n, 1), y(n, 1);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    y(i, 0) = rho * x(i, 0) + std::sqrt(1.0 - rho * rho) * rng.normal();
  }
  ScoreNet g;
  g.net = make_mlp<double>({2, hidden, 1}, Activation::kReLU,
                           Activation::kIdentity, rng);
  VariationalGaussian q;
  q.mu_net = make_mlp<double>({1, hidden, 1}, Activation::kReLU,
                              Activation::kIdentity, rng);
  q.logvar_net = make_mlp<double>({1, hidden, 1}, Activation::kReLU,
                                  Activation::kIdentity, rng);

  Matrix xb(batch, 1), yb(batch, 1);
  for (int step = 0; step < steps; ++step) {
    for (Index i = 0; i < batch; ++i) {
      const auto r = static_cast<Index>(rng.below(n));
      xb(i, 0) = x(r, 0);
      yb(i, 0) = y(r, 0);
    }
    auto nce = infonce_grad(g, xb, yb);
    g.net = sgd_step(g.net, nce.score_grads, -lr);  // ascent
    q = fit_qtheta_step(q, xb, yb, lr).q;
  }

  double nce_sum = 0, club_sum = 0;
  int batches = 0;
  for (Index start = 0; start + batch <= n; start += batch, ++batches) {
    const Matrix xs = x.middleRows(start, batch);
    const Matrix ys = y.middleRows(start, batch);
    nce_sum += infonce(score_matrix(g, xs, ys));
    club_sum += club(q, xs, ys);
  }
  const double nce_est = nce_sum / batches;
  const double club_est = club_sum / batches;
  const double secs = seconds_since(t0);
  const bool nce_ok = nce_est >= kNceLo && nce_est <= kNceHi;
  const bool club_ok = club_est >= kClubLo && club_est <= kClubHi;
  const bool order_ok = club_est >= nce_est - kSandwichSlack;
  return report(4, nce_ok && club_ok && order_ok && secs < kMiSeconds,
                fmt("true MI %.4f; InfoNCE %.4f in [%.2f, %.2f]: %s; CLUB %.4f in "
                    "[%.2f, %.2f]: %s; CLUB >= InfoNCE - %.2f: %s; %.1f s (< %g s)",
                    true_mi, nce_est, kNceLo, kNceHi, nce_ok ? "yes" : "no",
                    club_est, kClubLo, kClubHi, club_ok ? "yes" : "no",
                    kSandwichSlack, order_ok ? "yes" : "no", secs, kMiSeconds));
}

// ---- 5: end-to-end synthetic debiasing ----

std::vector<AssociationTest> filtered_tests(const FairFilModel& m,
                                            const std::vector<AssociationTest>& ts) {
  std::vector<AssociationTest> out;
  for (const auto& t : ts) {
    out.push_back({t.name, apply_filter(m, t.x), apply_filter(m, t.y),
                   apply_filter(m, t.a), apply_filter(m, t.b)});
  }
  return out;
}

bool synthetic_debiasing() {
  const auto t0 = Clock::now();
  SynthSpec spec;  // n_per_group 2000, dim 32, bias 2, noise 0.1
  spec.seed = 0;
  const SynthCorpus c = synth_biased_corpus(spec);

  TokenTable tokens(spec.dim);
  tokens.add("he", spec.token_scale * c.bias_direction);
  tokens.add("she", -spec.token_scale * c.bias_direction);
  SensitiveMap map;
  for (std::size_t i = 0; i < c.groups.size(); ++i) {
    map[i] = {c.groups[i] > 0 ? "he" : "she"};
  }

  // Library defaults except the step size: 1e-5 does not move the filter within
  // 10 epochs of 4000 rows. 3e-3 is the smallest value on a half-decade grid
  // that debiases in that budget; larger steps over-train InfoNCE and cost
  // linear probe accuracy.
  TrainConfig cfg;
  cfg.lr = kDeskLr;
  cfg.q_lr = kDeskLr;
  ModelOptions opts;
  opts.embed_dim = spec.dim;
  opts.token_dim = spec.dim;

  const double baseline = seat_suite(c.seat_tests).average_abs_effect_size;
  const double base_acc = linear_probe(c.z, c.labels, c.test_z, c.test_labels);

  struct Outcome {
    double effect, acc;
  };
  auto run = [&](bool reg) {
    TrainConfig rc = cfg;
    rc.use_regularizer = reg;
    const TrainingSet set =
        make_training_set(c.z, c.z_aug, map, reg ? &tokens : nullptr, reg);
    const FairFilModel m = train(make_model(opts, 0), set, rc).model;
    return Outcome{
        seat_suite(filtered_tests(m, c.seat_tests)).average_abs_effect_size,
        linear_probe(apply_filter(m, c.z), c.labels, apply_filter(m, c.test_z),
                     c.test_labels)};
  };
  const Outcome with_reg = run(true);
  const Outcome no_reg = run(false);
  const double secs = seconds_since(t0);

  const double reduction = 1.0 - with_reg.effect / baseline;
  const double drop = base_acc - with_reg.acc;
  const bool ok = baseline > kBaselineMin && with_reg.effect <= kFilteredMax &&
                  reduction >= kMinReduction && drop <= kMaxProbeDrop &&
                  secs < kSynthSeconds;
  return report(
      5, ok,
      fmt("SEAT avg |d| baseline %.3f (> %.1f) -> filtered %.3f (<= %.1f), "
          "reduction %.1f%% (>= %.0f%%); probe %.3f -> %.3f, drop %.1f pp "
          "(<= %.0f); without regularizer: |d| %.3f, probe %.3f; %.1f s (< %g s)",
          baseline, kBaselineMin, with_reg.effect, kFilteredMax, 100 * reduction,
          100 * kMinReduction, base_acc, with_reg.acc, 100 * drop,
          100 * kMaxProbeDrop, no_reg.effect, no_reg.acc, secs, kSynthSeconds));
}

// ---- 6: effect size against a direct loop evaluation ----

double direct_effect(const AssociationTest& t) {
  auto cosv = [](const Matrix& u, Index i, const Matrix& v, Index j) {
    double dot = 0, a = 0, b = 0;
    for (Index k = 0; k < u.cols(); ++k) {
      dot += u(i, k) * v(j, k);
      a += u(i, k) * u(i, k);
      b += v(j, k) * v(j, k);
    }
    return dot / (std::sqrt(a) * std::sqrt(b));
  };
  auto s = [&](const Matrix& m, Index i) {
    double sa = 0, sb = 0;
    for (Index j = 0; j < t.a.rows(); ++j) sa += cosv(m, i, t.a, j);
    for (Index j = 0; j < t.b.rows(); ++j) sb += cosv(m, i, t.b, j);
    return sa / t.a.rows() - sb / t.b.rows();
  };
  std::vector<double> sx, sy;
  for (Index i = 0; i < t.x.rows(); ++i) sx.push_back(s(t.x, i));
  for (Index i = 0; i < t.y.rows(); ++i) sy.push_back(s(t.y, i));
  double mx = 0, my = 0;
  for (double v : sx) mx += v;
  for (double v : sy) my += v;
  const double mean = (mx + my) / (sx.size() + sy.size());
  mx /= sx.size();
  my /= sy.size();
  double var = 0;
  for (double v : sx) var += (v - mean) * (v - mean);
  for (double v : sy) var += (v - mean) * (v - mean);
  return (mx - my) / std::sqrt(var / (sx.size() + sy.size()));
}

bool weat_oracle() {
  Rng rng(606);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index dim = 2 + static_cast<Index>(rng.below(15));
    AssociationTest t;
    t.x = random_matrix(2 + static_cast<Index>(rng.below(7)), dim, rng);
    t.y = random_matrix(1 + static_cast<Index>(rng.below(8)), dim, rng);
    t.a = random_matrix(1 + static_cast<Index>(rng.below(8)), dim, rng);
    t.b = random_matrix(1 + static_cast<Index>(rng.below(8)), dim, rng);
    worst = std::max(worst, std::abs(effect_size(t) - direct_effect(t)));
  }
  AssociationTest sym;
  sym.x = Matrix(1, 2);
  sym.x << 1, 0;
  sym.a = sym.x;
  sym.y = Matrix(1, 2);
  sym.y << 0.6, 0.8;
  sym.b = sym.y;
  const double two = effect_size(sym);
  return report(6, worst <= kOracleTol && std::abs(two - 2.0) <= kOracleTol,
                fmt("100 random tests: max |d - oracle| %.3g (<= %g); symmetric "
                    "two-target test %.15f (target 2)",
                    worst, kOracleTol, two));
}

// ---- 7: table statistic ----

bool table_statistic() {
  std::vector<TestEffect> effects;
  for (double v : {0.182, 0.076, 0.124, 0.082, 0.204, 0.235}) {
    effects.push_back({"t", v, 0.0});
  }
  const double avg = summarize(effects).average_abs_effect_size;
  return report(7, std::abs(avg - kTableAverage) <= kTableTol,
                fmt("average of six absolute effect sizes %.15f (target %.4f +- %g; "
                    "%.3f at 3 decimals)",
                    avg, kTableAverage, kTableTol, avg));
}

// ---- 8: augmentation round trip ----

bool augmentation_round_trip() {
  const Lexicon& lex = Lexicon::default_gender();
  const std::vector<std::string> filler = {
      "the", "a",    "went", "to",   "market", "quickly", "and",
      "saw", "very", "tall", "tree", ",",      "played",  "with"};
  Rng rng(808);
  int identity_failures = 0, length_failures = 0;
  for (int n = 0; n < 1000; ++n) {
    const std::size_t k = rng.below(2);
    const auto words = lex.words_in(k);
    std::string text;
    const std::size_t len = 1 + rng.below(14);
    for (std::size_t i = 0; i < len; ++i) {
      std::string w = rng.uniform() < 0.35 ? words[rng.below(words.size())]
                                           : filler[rng.below(filler.size())];
      if (rng.uniform() < 0.2) w[0] = static_cast<char>(std::toupper(w[0]));
      text += (i ? " " : "") + w;
    }
    text += ".";
    const auto s = find_sensitive(tokenize(text), lex);
    const auto there = augment(s, lex, 1 - k);
    const auto back = augment(find_sensitive(there, lex), lex, k);
    if (there.tokens.size() != s.tokens.size()) ++length_failures;
    if (back.tokens != s.tokens) ++identity_failures;
  }
  const auto table = augment(
      find_sensitive(tokenize("He is good at playing his basketball."), lex), lex,
      *lex.direction_index("female"));
  const bool table_ok = table.text() == "She is good at playing her basketball.";
  return report(8, identity_failures == 0 && length_failures == 0 && table_ok,
                fmt("1000 sentences: %d round-trip failures, %d length changes; "
                    "example mapping %s",
                    identity_failures, length_failures, table_ok ? "exact" : "WRONG"));
}

// ---- 9: formats and determinism ----

bool formats_and_determinism() {
  Rng rng(909);
  Matrix m(6, 5);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(rng.normal());
  const std::string emb = io::encode_embeddings(m);
  const bool emb_ok =
      io::decode_embeddings(emb) == m &&
      io::encode_embeddings(io::decode_embeddings(emb)) == emb;

  TokenTable t(4);
  for (const char* w : {"he", "she", "his", "her"}) {
    Vector v(4);
    for (Index i = 0; i < 4; ++i) v(i) = static_cast<float>(rng.normal());
    t.add(w, v);
  }
  const std::string tok = io::encode_token_table(t);
  const bool tok_ok = io::decode_token_table(tok) == t &&
                      io::encode_token_table(io::decode_token_table(tok)) == tok;

  SynthSpec spec;
  spec.n_per_group = 300;
  spec.dim = 12;
  spec.seed = 9;
  const SynthCorpus c = synth_biased_corpus(spec);
  TokenTable tokens(spec.dim);
  tokens.add("he", c.bias_direction);
  tokens.add("she", -c.bias_direction);
  SensitiveMap map;
  for (std::size_t i = 0; i < c.groups.size(); ++i) {
    map[i] = {c.groups[i] > 0 ? "he" : "she"};
  }
  const TrainingSet set = make_training_set(c.z, c.z_aug, map, &tokens, true);
  TrainConfig cfg;
  cfg.lr = 0.03;
  cfg.epochs = 3;
  cfg.seed = 5;
  ModelOptions opts;
  opts.embed_dim = spec.dim;
  opts.token_dim = spec.dim;
  const std::string a =
      io::checkpoint_to_json(train(make_model(opts, 5), set, cfg).model);
  const std::string b =
      io::checkpoint_to_json(train(make_model(opts, 5), set, cfg).model);
  const FairFilModel loaded = io::checkpoint_from_json(a);
  const bool ckpt_ok = io::checkpoint_to_json(loaded) == a;
  const bool det_ok = a == b;
  return report(9, emb_ok && tok_ok && ckpt_ok && det_ok,
                fmt("EMB1 round trip %s, TOK1 round trip %s, checkpoint round trip "
                    "%s, identical-seed checkpoints %s (%zu bytes)",
                    emb_ok ? "bitwise" : "DIFFERS", tok_ok ? "bitwise" : "DIFFERS",
                    ckpt_ok ? "bitwise" : "DIFFERS",
                    det_ok ? "byte-identical" : "DIFFER", a.size()));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> criteria = {
      gradient_correctness, infonce_bound,   club_cases,
      mi_sandwich,          synthetic_debiasing, weat_oracle,
      table_statistic,      augmentation_round_trip, formats_and_determinism};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= 9; ++i) selected.push_back(i);
  }
  bool all = true;
  for (int id : selected) {
    if (id < 1 || id > 9) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    try {
      all = criteria[id - 1]() && all;
    } catch (const std::exception& e) {
      all = report(id, false, std::string("threw: ") + e.what()) && all;
    }
  }
  return all ? 0 : 1;
}
