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

#include "fairfil/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <unistd.h>

#include "fairfil/errors.hpp"
#include "json.hpp"

namespace fairfil::io {
namespace {

using nlohmann::json;

constexpr std::string_view kEmbMagic = "EMB1";
constexpr std::string_view kTokMagic = "TOK1";
constexpr std::string_view kCheckpointFormat = "fairfil-ckpt-1";

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(raw, raw + sizeof(T));
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::string_view take(std::size_t n) {
    need(n);
    const auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      throw Error(Errc::kTruncatedFile,
                  "needed " + std::to_string(n) + " bytes, have " +
                      std::to_string(remaining()));
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

float narrow(double v) {
  if (!std::isfinite(v) || std::abs(v) > std::numeric_limits<float>::max()) {
    throw Error(Errc::kNonFinitePayload, "value not representable as float32");
  }
  return static_cast<float>(v);
}

std::uint32_t checked_u32(Index n, const char* what) {
  if (n < 0 || static_cast<std::uint64_t>(n) > UINT32_MAX) {
    throw Error(Errc::kDimensionMismatch, std::string(what) + " exceeds u32");
  }
  return static_cast<std::uint32_t>(n);
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) {
    throw Error(Errc::kBadConfig, where + " must be a JSON object");
  }
  for (const auto& item : j.items()) {
    bool ok = false;
    for (auto k : allowed) ok = ok || item.key() == k;
    if (!ok) {
      throw Error(Errc::kBadConfig,
                  "unknown key '" + item.key() + "' in " + where);
    }
  }
}

json parse_json(std::string_view text, Errc code, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(code, what + ": " + e.what());
  }
}

json mlp_to_json(const Mlp& net) {
  json layers = json::array();
  for (const auto& l : net.layers) {
    json jl;
    jl["in"] = l.in_dim();
    jl["out"] = l.out_dim();
    jl["activation"] =
        l.activation == Activation::kReLU ? "relu" : "identity";
    jl["weight"] = std::vector<double>(l.weight.data(),
                                       l.weight.data() + l.weight.size());
    jl["bias"] =
        std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back(std::move(jl));
  }
  return json{{"layers", std::move(layers)}};
}

Mlp mlp_from_json(const json& j) {
  Mlp net;
  for (const auto& jl : j.at("layers")) {
    const auto in = jl.at("in").get<Index>();
    const auto out = jl.at("out").get<Index>();
    const auto act = jl.at("activation").get<std::string>();
    const auto w = jl.at("weight").get<std::vector<double>>();
    const auto b = jl.at("bias").get<std::vector<double>>();
    if (in <= 0 || out <= 0 || static_cast<Index>(w.size()) != in * out ||
        static_cast<Index>(b.size()) != out) {
      throw Error(Errc::kDimensionMismatch, "checkpoint layer shape mismatch");
    }
    Layer l;
    if (act == "relu") {
      l.activation = Activation::kReLU;
    } else if (act == "identity") {
      l.activation = Activation::kIdentity;
    } else {
      throw Error(Errc::kBadConfig, "unknown activation '" + act + "'");
    }
    l.weight = Eigen::Map<const Matrix>(w.data(), out, in);
    l.bias = Eigen::Map<const Vector>(b.data(), out);
    net.layers.push_back(std::move(l));
  }
  check_well_formed(net);
  return net;
}

std::size_t parse_row_index(std::string_view s, std::size_t line_no) {
  std::size_t v = 0;
  if (s.empty()) {
    throw Error(Errc::kBadConfig, "empty row index on line " +
                                      std::to_string(line_no));
  }
  for (char c : s) {
    if (c < '0' || c > '9') {
      throw Error(Errc::kBadConfig,
                  "bad row index on line " + std::to_string(line_no));
    }
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OutputTransaction::~OutputTransaction() {
  if (committed_) return;
  for (const auto& [tmp, final_path] : staged_) {
    std::error_code ec;
    fs::remove(tmp, ec);
  }
}

void OutputTransaction::stage(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(staged_.size());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(Errc::kIo, "write failed for " + tmp.string());
  }
  staged_.emplace_back(std::move(tmp), path);
}

void OutputTransaction::commit() {
  for (const auto& [tmp, final_path] : staged_) {
    std::error_code ec;
    fs::rename(tmp, final_path, ec);
    if (ec) {
      throw Error(Errc::kIo, "cannot rename into " + final_path.string() +
                                 ": " + ec.message());
    }
  }
  committed_ = true;
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  OutputTransaction tx;
  tx.stage(path, bytes);
  tx.commit();
}

std::string encode_embeddings(const Matrix& m) {
  std::string out;
  out.reserve(12 + 4 * static_cast<std::size_t>(m.size()));
  out.append(kEmbMagic);
  put_le(out, checked_u32(m.rows(), "count"));
  put_le(out, checked_u32(m.cols(), "dim"));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) put_le(out, narrow(m(r, c)));
  }
  return out;
}

Matrix decode_embeddings(std::string_view bytes) {
  Reader in(bytes);
  if (in.remaining() < 4 || in.take(4) != kEmbMagic) {
    throw Error(Errc::kBadMagic, "not an EMB1 file");
  }
  const auto count = in.get<std::uint32_t>();
  const auto dim = in.get<std::uint32_t>();
  const std::uint64_t payload = 4ULL * count * dim;
  if (in.remaining() < payload) {
    throw Error(Errc::kTruncatedFile,
                "header promises " + std::to_string(count) + "x" +
                    std::to_string(dim) + " floats");
  }
  if (in.remaining() > payload) {
    throw Error(Errc::kTruncatedFile, "trailing bytes after EMB1 payload");
  }
  Matrix m(count, dim);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const float v = in.get<float>();
      if (!std::isfinite(v)) {
        throw Error(Errc::kNonFinitePayload,
                    "row " + std::to_string(r) + " has a non-finite value");
      }
      m(r, c) = v;
    }
  }
  return m;
}

Matrix read_embeddings(const fs::path& path) {
  return decode_embeddings(read_file(path));
}

void write_embeddings(const fs::path& path, const Matrix& m) {
  write_file_atomic(path, encode_embeddings(m));
}

std::string encode_token_table(const TokenTable& table) {
  std::string out(kTokMagic);
  put_le(out, checked_u32(static_cast<Index>(table.size()), "count"));
  put_le(out, checked_u32(table.dim(), "dim"));
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string& w = table.words()[i];
    if (w.size() > UINT16_MAX) {
      throw Error(Errc::kDimensionMismatch, "token longer than 65535 bytes");
    }
    put_le(out, static_cast<std::uint16_t>(w.size()));
    out.append(w);
    const Vector& v = table.vector(i);
    for (Index k = 0; k < v.size(); ++k) put_le(out, narrow(v(k)));
  }
  return out;
}

TokenTable decode_token_table(std::string_view bytes) {
  Reader in(bytes);
  if (in.remaining() < 4 || in.take(4) != kTokMagic) {
    throw Error(Errc::kBadMagic, "not a TOK1 file");
  }
  const auto count = in.get<std::uint32_t>();
  const auto dim = in.get<std::uint32_t>();
  TokenTable table(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = in.get<std::uint16_t>();
    std::string word(in.take(len));
    Vector v(dim);
    for (std::uint32_t k = 0; k < dim; ++k) {
      const float f = in.get<float>();
      if (!std::isfinite(f)) {
        throw Error(Errc::kNonFinitePayload, "token '" + word + "' not finite");
      }
      v(k) = f;
    }
    table.add(std::move(word), std::move(v));
  }
  if (in.remaining() != 0) {
    throw Error(Errc::kTruncatedFile, "trailing bytes after TOK1 entries");
  }
  return table;
}

TokenTable read_token_table(const fs::path& path) {
  return decode_token_table(read_file(path));
}

void write_token_table(const fs::path& path, const TokenTable& table) {
  write_file_atomic(path, encode_token_table(table));
}

SensitiveMap parse_sensitive_map(std::string_view text) {
  SensitiveMap map;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(Errc::kBadConfig,
                  "sensitive map line " + std::to_string(line_no) +
                      " has no TAB");
    }
    const std::size_t row = parse_row_index(line.substr(0, tab), line_no);
    auto& words = map[row];
    std::string_view rest = line.substr(tab + 1);
    while (!rest.empty()) {
      const auto sp = rest.find(' ');
      const auto w = rest.substr(0, sp);
      if (!w.empty()) words.emplace_back(w);
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
  }
  return map;
}

std::string format_sensitive_map(const SensitiveMap& map) {
  std::string out;
  for (const auto& [row, words] : map) {
    if (words.empty()) continue;
    out += std::to_string(row);
    out.push_back('\t');
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0) out.push_back(' ');
      out += words[i];
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<int> parse_labels(std::string_view text) {
  std::vector<int> labels;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    if (line == "0") {
      labels.push_back(0);
    } else if (line == "1") {
      labels.push_back(1);
    } else {
      throw Error(Errc::kBadConfig,
                  "label line " + std::to_string(line_no) + " is not 0 or 1");
    }
  }
  return labels;
}

std::string format_labels(const std::vector<int>& labels) {
  std::string out;
  out.reserve(labels.size() * 2);
  for (int l : labels) {
    out.push_back(l != 0 ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

std::string checkpoint_to_json(const FairFilModel& m) {
  json j;
  j["format"] = kCheckpointFormat;
  j["embed_dim"] = m.embed_dim;
  j["token_dim"] = m.token_dim;
  j["seed"] = m.seed;
  j["filter"] = mlp_to_json(m.filter);
  j["score"] = mlp_to_json(m.score.net);
  j["qtheta"] = json{{"mu", mlp_to_json(m.qtheta.mu_net)},
                     {"logvar", mlp_to_json(m.qtheta.logvar_net)}};
  return j.dump() + "\n";
}

FairFilModel checkpoint_from_json(std::string_view text) {
  const json j = parse_json(text, Errc::kBadConfig, "checkpoint");
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) {
      throw Error(Errc::kBadMagic, "unsupported checkpoint format");
    }
    FairFilModel m;
    m.embed_dim = j.at("embed_dim").get<Index>();
    m.token_dim = j.at("token_dim").get<Index>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.filter = mlp_from_json(j.at("filter"));
    m.score.net = mlp_from_json(j.at("score"));
    m.qtheta.mu_net = mlp_from_json(j.at("qtheta").at("mu"));
    m.qtheta.logvar_net = mlp_from_json(j.at("qtheta").at("logvar"));
    validate(m);
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::kBadConfig, std::string("checkpoint: ") + e.what());
  }
}

RunConfig parse_run_config(std::string_view text) {
  const json j = parse_json(text, Errc::kBadConfig, "run config");
  check_keys(j,
             {"batch_size", "lr", "q_lr", "epochs", "beta", "use_regularizer",
              "seed", "momentum", "word_sampling", "score_hidden", "q_hidden",
              "filter_init", "emb", "emb_aug", "tokens", "map", "out"},
             "run config");
  RunConfig c;
  try {
    auto& t = c.train;
    if (j.contains("batch_size")) t.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("lr")) t.lr = j["lr"].get<double>();
    if (j.contains("q_lr")) t.q_lr = j["q_lr"].get<double>();
    if (j.contains("epochs")) t.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("beta")) t.beta = j["beta"].get<double>();
    if (j.contains("use_regularizer")) {
      t.use_regularizer = j["use_regularizer"].get<bool>();
    }
    if (j.contains("seed")) t.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("momentum")) t.momentum = j["momentum"].get<double>();
    if (j.contains("word_sampling")) {
      const auto s = j["word_sampling"].get<std::string>();
      if (s == "sample") {
        t.word_sampling = WordSampling::kSampleOne;
      } else if (s == "average") {
        t.word_sampling = WordSampling::kAverageAll;
      } else {
        throw Error(Errc::kBadConfig, "word_sampling must be sample|average");
      }
    }
    if (j.contains("score_hidden")) c.score_hidden = j["score_hidden"].get<Index>();
    if (j.contains("q_hidden")) c.q_hidden = j["q_hidden"].get<Index>();
    if (j.contains("filter_init")) {
      const auto s = j["filter_init"].get<std::string>();
      if (s == "identity") {
        c.filter_init = FilterInit::kIdentity;
      } else if (s == "glorot") {
        c.filter_init = FilterInit::kGlorot;
      } else {
        throw Error(Errc::kBadConfig, "filter_init must be identity|glorot");
      }
    }
    for (auto [key, slot] : {std::pair{"emb", &c.emb},
                             std::pair{"emb_aug", &c.emb_aug},
                             std::pair{"tokens", &c.tokens},
                             std::pair{"map", &c.map},
                             std::pair{"out", &c.out}}) {
      if (j.contains(key)) *slot = j[key].get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kBadConfig, std::string("run config: ") + e.what());
  }
  if (c.score_hidden < 0 || c.q_hidden < 0) {
    throw Error(Errc::kBadConfig, "hidden widths must be >= 0");
  }
  validate(c.train);
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["batch_size"] = c.train.batch_size;
  j["lr"] = c.train.lr;
  j["q_lr"] = c.train.q_lr;
  j["epochs"] = c.train.epochs;
  j["beta"] = c.train.beta;
  j["use_regularizer"] = c.train.use_regularizer;
  j["seed"] = c.train.seed;
  j["momentum"] = c.train.momentum;
  j["word_sampling"] =
      c.train.word_sampling == WordSampling::kSampleOne ? "sample" : "average";
  j["score_hidden"] = c.score_hidden;
  j["q_hidden"] = c.q_hidden;
  j["filter_init"] =
      c.filter_init == FilterInit::kIdentity ? "identity" : "glorot";
  if (c.emb) j["emb"] = *c.emb;
  if (c.emb_aug) j["emb_aug"] = *c.emb_aug;
  if (c.tokens) j["tokens"] = *c.tokens;
  if (c.map) j["map"] = *c.map;
  if (c.out) j["out"] = *c.out;
  return j.dump(2) + "\n";
}

SynthSpec parse_synth_spec(std::string_view text) {
  const json j = parse_json(text, Errc::kBadConfig, "synth spec");
  check_keys(j,
             {"n_per_group", "dim", "bias_strength", "noise_sigma", "seed",
              "token_scale", "test_per_group", "seat_tests", "seat_targets",
              "seat_attributes", "template_count", "attribute_scale",
              "attribute_tint", "attribute_noise"},
             "synth spec");
  SynthSpec s;
  try {
    auto set = [&](const char* key, auto& slot) {
      if (j.contains(key)) {
        slot = j[key].get<std::remove_reference_t<decltype(slot)>>();
      }
    };
    set("n_per_group", s.n_per_group);
    set("dim", s.dim);
    set("bias_strength", s.bias_strength);
    set("noise_sigma", s.noise_sigma);
    set("seed", s.seed);
    set("token_scale", s.token_scale);
    set("test_per_group", s.test_per_group);
    set("seat_tests", s.seat_tests);
    set("seat_targets", s.seat_targets);
    set("seat_attributes", s.seat_attributes);
    set("template_count", s.template_count);
    set("attribute_scale", s.attribute_scale);
    set("attribute_tint", s.attribute_tint);
    set("attribute_noise", s.attribute_noise);
  } catch (const json::exception& e) {
    throw Error(Errc::kBadConfig, std::string("synth spec: ") + e.what());
  }
  validate(s);
  return s;
}

std::string synth_spec_to_json(const SynthSpec& s) {
  json j{{"n_per_group", s.n_per_group},
         {"dim", s.dim},
         {"bias_strength", s.bias_strength},
         {"noise_sigma", s.noise_sigma},
         {"seed", s.seed},
         {"token_scale", s.token_scale},
         {"test_per_group", s.test_per_group},
         {"seat_tests", s.seat_tests},
         {"seat_targets", s.seat_targets},
         {"seat_attributes", s.seat_attributes},
         {"template_count", s.template_count},
         {"attribute_scale", s.attribute_scale},
         {"attribute_tint", s.attribute_tint},
         {"attribute_noise", s.attribute_noise}};
  return j.dump(2) + "\n";
}

SeatTestSpec parse_seat_test(std::string_view text) {
  const json j = parse_json(text, Errc::kBadConfig, "SEAT test");
  check_keys(j,
             {"name", "targets_x", "targets_y", "attributes_a", "attributes_b"},
             "SEAT test");
  try {
    SeatTestSpec s;
    s.name = j.at("name").get<std::string>();
    s.targets_x = j.at("targets_x").get<std::vector<std::string>>();
    s.targets_y = j.at("targets_y").get<std::vector<std::string>>();
    s.attributes_a = j.at("attributes_a").get<std::vector<std::string>>();
    s.attributes_b = j.at("attributes_b").get<std::vector<std::string>>();
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::kBadConfig, std::string("SEAT test: ") + e.what());
  }
}

std::string seat_test_to_json(const SeatTestSpec& s) {
  json j{{"name", s.name},
         {"targets_x", s.targets_x},
         {"targets_y", s.targets_y},
         {"attributes_a", s.attributes_a},
         {"attributes_b", s.attributes_b}};
  return j.dump(2) + "\n";
}

Manifest parse_manifest(std::string_view text) {
  const json j = parse_json(text, Errc::kBadConfig, "manifest");
  if (!j.is_object()) throw Error(Errc::kBadConfig, "manifest must be an object");
  Manifest m;
  try {
    for (const auto& item : j.items()) {
      auto& ranges = m[item.key()];
      for (const auto& r : item.value()) {
        const auto begin = r.at(0).get<std::size_t>();
        const auto end = r.at(1).get<std::size_t>();
        if (r.size() != 2 || end < begin) {
          throw Error(Errc::kBadConfig,
                      "bad row range for '" + item.key() + "'");
        }
        ranges.emplace_back(begin, end);
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kBadConfig, std::string("manifest: ") + e.what());
  }
  return m;
}

std::string manifest_to_json(const Manifest& manifest) {
  json j = json::object();
  for (const auto& [word, ranges] : manifest) {
    json arr = json::array();
    for (const auto& [b, e] : ranges) arr.push_back({b, e});
    j[word] = std::move(arr);
  }
  return j.dump(2) + "\n";
}

AssociationTest resolve_seat_test(const SeatTestSpec& spec,
                                  const Manifest& manifest,
                                  const Matrix& embeddings) {
  auto gather = [&](const std::vector<std::string>& words) {
    std::vector<Index> rows;
    for (const auto& w : words) {
      const auto it = manifest.find(w);
      if (it == manifest.end()) {
        throw Error(Errc::kUnknownWord,
                    "'" + w + "' missing from manifest (test " + spec.name + ")");
      }
      for (const auto& [b, e] : it->second) {
        if (e > static_cast<std::size_t>(embeddings.rows())) {
          throw Error(Errc::kRowCountMismatch,
                      "manifest range for '" + w + "' beyond embeddings");
        }
        for (std::size_t r = b; r < e; ++r) rows.push_back(static_cast<Index>(r));
      }
    }
    Matrix m(static_cast<Index>(rows.size()), embeddings.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      m.row(static_cast<Index>(i)) = embeddings.row(rows[i]);
    }
    return m;
  };
  AssociationTest t;
  t.name = spec.name;
  t.x = gather(spec.targets_x);
  t.y = gather(spec.targets_y);
  t.a = gather(spec.attributes_a);
  t.b = gather(spec.attributes_b);
  return t;
}

std::string report_to_json(const EffectSizeReport& report) {
  json tests = json::array();
  for (const auto& t : report.tests) {
    tests.push_back({{"name", t.name},
                     {"effect_size", t.effect_size},
                     {"abs_effect_size", t.abs_effect_size}});
  }
  json j{{"tests", std::move(tests)},
         {"average_abs_effect_size", report.average_abs_effect_size}};
  return j.dump(2) + "\n";
}

std::string epoch_stats_to_json_line(const EpochStats& s) {
  json j{{"epoch", s.epoch},     {"batches", s.batches}, {"loss", s.loss},
         {"i_nce", s.i_nce},     {"i_club", s.i_club},
         {"q_loglik", s.q_loglik}};
  return j.dump() + "\n";
}

}  // namespace fairfil::io
