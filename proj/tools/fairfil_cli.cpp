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

// Command-line driver: augment -> (external encoder) -> train -> apply ->
// seat / probe, plus a synthetic corpus generator.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairfil/biaseval.hpp"
#include "fairfil/errors.hpp"
#include "fairfil/fairtrain.hpp"
#include "fairfil/io.hpp"
#include "fairfil/rng.hpp"
#include "fairfil/textaug.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fairfil;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::string lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

// ---- augment ----

struct AugmentArgs {
  std::string corpus, lexicon, dir = "auto", out, map;
  std::uint64_t seed = 0;
};

std::optional<std::size_t> parse_direction(const std::string& dir,
                                           const Lexicon& lex) {
  if (dir == "auto") return std::nullopt;
  if (auto i = lex.direction_index(dir)) return *i;
  if (!dir.empty() && dir.find_first_not_of("0123456789") == std::string::npos) {
    return std::stoul(dir);
  }
  throw Error(Errc::kNoSuchDirection, "unknown direction '" + dir + "'");
}

int run_augment(const AugmentArgs& a) {
  const Lexicon lex = Lexicon::from_json(io::read_file(a.lexicon));
  const auto fixed = parse_direction(a.dir, lex);
  if (fixed && *fixed >= lex.num_directions()) {
    throw Error(Errc::kNoSuchDirection, "direction " + a.dir + " out of range");
  }
  Rng rng(a.seed);
  std::string out_text;
  std::string map_text;
  const auto lines = split_lines(io::read_file(a.corpus));
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const auto s = find_sensitive(tokenize(lines[row]), lex);
    if (s.tags.empty()) {
      out_text += lines[row] + "\n";
      map_text += "# " + std::to_string(row) + "\tunchanged\n";
      continue;
    }
    std::size_t target;
    if (fixed) {
      target = *fixed;
    } else {
      const std::size_t major = *s.majority_direction();
      const std::size_t k = lex.num_directions();
      target = static_cast<std::size_t>(rng.below(k - 1));
      if (target >= major) ++target;
    }
    out_text += augment(s, lex, target).text() + "\n";
    std::vector<std::string> words;
    for (const auto& tag : s.tags) {
      std::string w = lower(s.tokens[tag.position]);
      if (std::find(words.begin(), words.end(), w) == words.end()) {
        words.push_back(std::move(w));
      }
    }
    map_text += std::to_string(row) + "\t";
    for (std::size_t i = 0; i < words.size(); ++i) {
      map_text += (i ? " " : "") + words[i];
    }
    map_text += "\n";
  }
  io::OutputTransaction tx;
  tx.stage(a.out, out_text);
  tx.stage(a.map, map_text);
  tx.commit();
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string emb, emb_aug, tokens, map, config, out, stats;
  bool no_reg = false;
};

std::string pick(const std::string& flag, const std::optional<std::string>& cfg,
                 const char* name) {
  if (!flag.empty()) return flag;
  if (cfg) return *cfg;
  throw CLI::RequiredError(std::string("--") + name);
}

int run_train(const TrainArgs& a) {
  io::RunConfig rc;
  if (!a.config.empty()) rc = io::parse_run_config(io::read_file(a.config));
  if (a.no_reg) rc.train.use_regularizer = false;
  const std::string emb = pick(a.emb, rc.emb, "emb");
  const std::string emb_aug = pick(a.emb_aug, rc.emb_aug, "emb-aug");
  const std::string out = pick(a.out, rc.out, "out");
  const bool reg = rc.train.use_regularizer;

  const Matrix z = io::read_embeddings(emb);
  const Matrix z_aug = io::read_embeddings(emb_aug);
  // Rows without a sensitive word are excluded even when the regularizer is
  // off, so the map is always needed; the token table only with it.
  const SensitiveMap map =
      io::parse_sensitive_map(io::read_file(pick(a.map, rc.map, "map")));
  std::optional<TokenTable> tokens;
  if (reg) tokens = io::read_token_table(pick(a.tokens, rc.tokens, "tokens"));
  const TrainingSet set = make_training_set(
      z, z_aug, map, tokens ? &*tokens : nullptr, reg);

  ModelOptions opts;
  opts.embed_dim = z.cols();
  opts.token_dim = tokens ? tokens->dim() : z.cols();
  opts.score_hidden = rc.score_hidden;
  opts.q_hidden = rc.q_hidden;
  opts.filter_init = rc.filter_init;
  const TrainResult result =
      train(make_model(opts, rc.train.seed), set, rc.train);

  std::string stats_text;
  for (const auto& e : result.history) {
    stats_text += io::epoch_stats_to_json_line(e);
  }
  const std::string stats = a.stats.empty() ? out + ".stats.jsonl" : a.stats;
  io::OutputTransaction tx;
  tx.stage(out, io::checkpoint_to_json(result.model));
  tx.stage(stats, stats_text);
  tx.commit();
  return 0;
}

// ---- apply / seat / probe ----

int run_apply(const std::string& model, const std::string& emb,
              const std::string& out) {
  const FairFilModel m = io::checkpoint_from_json(io::read_file(model));
  const Matrix d = apply_filter(m, io::read_embeddings(emb));
  if (!d.allFinite()) {
    throw Error(Errc::kNonFiniteScore, "filter produced non-finite output");
  }
  io::write_embeddings(out, d);
  return 0;
}

int run_seat(const std::string& tests_dir, const std::string& manifest_path,
             const std::string& emb, const std::string& report) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(tests_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error(Errc::kEmptyDataset, "no *.json tests in " + tests_dir);
  }
  const io::Manifest manifest =
      io::parse_manifest(io::read_file(manifest_path));
  const Matrix e = io::read_embeddings(emb);
  std::vector<AssociationTest> tests;
  for (const auto& f : files) {
    tests.push_back(io::resolve_seat_test(
        io::parse_seat_test(io::read_file(f)), manifest, e));
  }
  io::write_file_atomic(report, io::report_to_json(seat_suite(tests)));
  return 0;
}

int run_probe(const std::string& train_emb, const std::string& train_labels,
              const std::string& test_emb, const std::string& test_labels,
              const std::string& report) {
  const Matrix xtr = io::read_embeddings(train_emb);
  const Matrix xte = io::read_embeddings(test_emb);
  const auto ytr = io::parse_labels(io::read_file(train_labels));
  const auto yte = io::parse_labels(io::read_file(test_labels));
  const double acc = linear_probe(xtr, ytr, xte, yte);
  char buf[64];
  std::snprintf(buf, sizeof buf, "{\"accuracy\": %.17g}\n", acc);
  io::write_file_atomic(report, buf);
  return 0;
}

// ---- synth ----

int run_synth(const std::string& spec_path, const std::string& out_dir) {
  const SynthSpec spec = io::parse_synth_spec(io::read_file(spec_path));
  const SynthCorpus c = synth_biased_corpus(spec);
  const fs::path dir(out_dir);
  fs::create_directories(dir / "seat" / "tests");

  TokenTable tokens(spec.dim);
  tokens.add("he", spec.token_scale * c.bias_direction);
  tokens.add("she", -spec.token_scale * c.bias_direction);
  SensitiveMap map;
  for (std::size_t i = 0; i < c.groups.size(); ++i) {
    map[i] = {c.groups[i] > 0 ? "he" : "she"};
  }

  // Every SEAT sentence gets its own manifest word and embedding row.
  io::Manifest manifest;
  std::vector<const Matrix*> blocks;
  std::size_t rows = 0;
  io::OutputTransaction tx;
  for (const auto& t : c.seat_tests) {
    io::SeatTestSpec s;
    s.name = t.name;
    auto add = [&](const Matrix& m, const std::string& tag,
                   std::vector<std::string>& words) {
      for (Index i = 0; i < m.rows(); ++i) {
        std::string w = t.name + "/" + tag + std::to_string(i);
        manifest[w] = {{rows, rows + 1}};
        ++rows;
        words.push_back(std::move(w));
      }
      blocks.push_back(&m);
    };
    add(t.x, "x", s.targets_x);
    add(t.y, "y", s.targets_y);
    add(t.a, "a", s.attributes_a);
    add(t.b, "b", s.attributes_b);
    tx.stage(dir / "seat" / "tests" / (t.name + ".json"),
             io::seat_test_to_json(s));
  }
  Matrix seat(static_cast<Index>(rows), spec.dim);
  Index at = 0;
  for (const Matrix* m : blocks) {
    seat.middleRows(at, m->rows()) = *m;
    at += m->rows();
  }

  io::RunConfig rc;
  rc.train.lr = 3e-3;  // 1e-5 barely moves the filter at this scale
  rc.train.seed = spec.seed;
  rc.emb = (dir / "corpus.emb").string();
  rc.emb_aug = (dir / "corpus_aug.emb").string();
  rc.tokens = (dir / "tokens.tok").string();
  rc.map = (dir / "map.tsv").string();

  tx.stage(dir / "corpus.emb", io::encode_embeddings(c.z));
  tx.stage(dir / "corpus_aug.emb", io::encode_embeddings(c.z_aug));
  tx.stage(dir / "tokens.tok", io::encode_token_table(tokens));
  tx.stage(dir / "map.tsv", io::format_sensitive_map(map));
  tx.stage(dir / "labels.txt", io::format_labels(c.labels));
  tx.stage(dir / "probe_test.emb", io::encode_embeddings(c.test_z));
  tx.stage(dir / "probe_test.labels", io::format_labels(c.test_labels));
  tx.stage(dir / "seat" / "seat.emb", io::encode_embeddings(seat));
  tx.stage(dir / "seat" / "manifest.json", io::manifest_to_json(manifest));
  tx.stage(dir / "spec.json", io::synth_spec_to_json(spec));
  tx.stage(dir / "train_config.json", io::run_config_to_json(rc));
  tx.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FairFil sentence-embedding debiasing toolkit"};
  app.require_subcommand(1);

  AugmentArgs aug;
  auto* c_aug = app.add_subcommand("augment", "counterfactual corpus rewrite");
  c_aug->add_option("--corpus", aug.corpus)->required();
  c_aug->add_option("--lexicon", aug.lexicon)->required();
  c_aug->add_option("--dir", aug.dir, "direction name, index or auto");
  c_aug->add_option("--out", aug.out)->required();
  c_aug->add_option("--map", aug.map)->required();
  c_aug->add_option("--seed", aug.seed);

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "train a fair filter");
  c_train->add_option("--emb", tr.emb);
  c_train->add_option("--emb-aug", tr.emb_aug);
  c_train->add_option("--tokens", tr.tokens);
  c_train->add_option("--map", tr.map);
  c_train->add_option("--config", tr.config);
  c_train->add_option("--out", tr.out);
  c_train->add_option("--stats", tr.stats, "default: <out>.stats.jsonl");
  c_train->add_flag("--no-reg", tr.no_reg);

  std::string model, in, out;
  auto* c_apply = app.add_subcommand("apply", "filter an embedding file");
  c_apply->add_option("--model", model)->required();
  c_apply->add_option("--emb", in)->required();
  c_apply->add_option("--out", out)->required();

  std::string tests, manifest, emb, report;
  auto* c_seat = app.add_subcommand("seat", "SEAT effect sizes");
  c_seat->add_option("--tests", tests)->required();
  c_seat->add_option("--manifest", manifest)->required();
  c_seat->add_option("--emb", emb)->required();
  c_seat->add_option("--report", report)->required();

  std::string tr_emb, tr_lab, te_emb, te_lab, p_report;
  auto* c_probe = app.add_subcommand("probe", "linear probe accuracy");
  c_probe->add_option("--train-emb", tr_emb)->required();
  c_probe->add_option("--train-labels", tr_lab)->required();
  c_probe->add_option("--test-emb", te_emb)->required();
  c_probe->add_option("--test-labels", te_lab)->required();
  c_probe->add_option("--report", p_report)->required();

  std::string spec, out_dir;
  auto* c_synth = app.add_subcommand("synth", "write a synthetic corpus");
  c_synth->add_option("--spec", spec)->required();
  c_synth->add_option("--out-dir", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (c_aug->parsed()) return run_augment(aug);
    if (c_train->parsed()) return run_train(tr);
    if (c_apply->parsed()) return run_apply(model, in, out);
    if (c_seat->parsed()) return run_seat(tests, manifest, emb, report);
    if (c_probe->parsed()) return run_probe(tr_emb, tr_lab, te_emb, te_lab, p_report);
    if (c_synth->parsed()) return run_synth(spec, out_dir);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_numeric(e.code()) ? kExitNumeric : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
