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

// On-disk formats.
//
// EMB1 (sentence embeddings), little-endian:
//   "EMB1" | u32 count | u32 dim | count*dim f32, row-major
// TOK1 (token embedding table), little-endian:
//   "TOK1" | u32 count | u32 dim | count x { u16 len | len bytes UTF-8 | dim f32 }
//
// Matrices are float64 in memory and narrowed to float32 on write.
//
// Everything else is text: checkpoints, run configs, SEAT tests, manifests
// and reports are JSON; the sensitive map is TSV; stats are JSON lines.

#ifndef FAIRFIL_IO_HPP_
#define FAIRFIL_IO_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairfil/biaseval.hpp"
#include "fairfil/fairtrain.hpp"
#include "fairfil/nn.hpp"
#include "fairfil/token_table.hpp"

namespace fairfil::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path);

// Writes go to temporary siblings and are renamed into place on commit().
// Uncommitted temporaries are removed on destruction, so a failed command
// leaves no partial outputs behind.
class OutputTransaction {
 public:
  OutputTransaction() = default;
  OutputTransaction(const OutputTransaction&) = delete;
  OutputTransaction& operator=(const OutputTransaction&) = delete;
  ~OutputTransaction();

  void stage(const fs::path& path, std::string_view bytes);
  void commit();

 private:
  std::vector<std::pair<fs::path, fs::path>> staged_;  // temp, final
  bool committed_ = false;
};

// Single-file convenience around OutputTransaction.
void write_file_atomic(const fs::path& path, std::string_view bytes);

std::string encode_embeddings(const Matrix& m);
Matrix decode_embeddings(std::string_view bytes);
Matrix read_embeddings(const fs::path& path);
void write_embeddings(const fs::path& path, const Matrix& m);

std::string encode_token_table(const TokenTable& table);
TokenTable decode_token_table(std::string_view bytes);
TokenTable read_token_table(const fs::path& path);
void write_token_table(const fs::path& path, const TokenTable& table);

// `row<TAB>word[ word...]` per line; lines starting with '#' are comments.
SensitiveMap parse_sensitive_map(std::string_view text);
std::string format_sensitive_map(const SensitiveMap& map);

// One 0/1 label per line.
std::vector<int> parse_labels(std::string_view text);
std::string format_labels(const std::vector<int>& labels);

std::string checkpoint_to_json(const FairFilModel& m);
FairFilModel checkpoint_from_json(std::string_view text);

struct RunConfig {
  TrainConfig train;
  Index score_hidden = 0;
  Index q_hidden = 0;
  FilterInit filter_init = FilterInit::kIdentity;
  std::optional<std::string> emb;
  std::optional<std::string> emb_aug;
  std::optional<std::string> tokens;
  std::optional<std::string> map;
  std::optional<std::string> out;
};

// Unknown keys and ill-typed values are rejected with BadConfig.
RunConfig parse_run_config(std::string_view text);
std::string run_config_to_json(const RunConfig& cfg);

SynthSpec parse_synth_spec(std::string_view text);
std::string synth_spec_to_json(const SynthSpec& spec);

struct SeatTestSpec {
  std::string name;
  std::vector<std::string> targets_x;
  std::vector<std::string> targets_y;
  std::vector<std::string> attributes_a;
  std::vector<std::string> attributes_b;
};

SeatTestSpec parse_seat_test(std::string_view text);
std::string seat_test_to_json(const SeatTestSpec& spec);

// word -> half-open row ranges [begin, end) of its templated sentences.
using Manifest = std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>>;

Manifest parse_manifest(std::string_view text);
std::string manifest_to_json(const Manifest& manifest);

// Gathers every manifest row of every word of each set.
AssociationTest resolve_seat_test(const SeatTestSpec& spec,
                                  const Manifest& manifest,
                                  const Matrix& embeddings);

std::string report_to_json(const EffectSizeReport& report);
std::string epoch_stats_to_json_line(const EpochStats& stats);

}  // namespace fairfil::io

#endif  // FAIRFIL_IO_HPP_
