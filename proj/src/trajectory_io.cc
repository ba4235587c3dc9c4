//
// Copyright 2026 The renyigen Authors
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

#include "renyigen/trajectory_io.h"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "renyigen/error.h"

namespace renyigen {
namespace {

constexpr std::array<std::uint8_t, 8> kMagic = {'R', 'G', 'T', 'R',
                                                'A', 'J', 0, 1};

class Writer {
 public:
  void U64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Reals(std::span<const double> v) {
    U64(v.size());
    for (double x : v) F64(x);
  }
  void Sizes(std::span<const std::size_t> v) {
    U64(v.size());
    for (std::size_t x : v) U64(x);
  }
  void Bytes(std::span<const std::uint8_t> b) {
    out_.insert(out_.end(), b.begin(), b.end());
  }
  // Appends `section` prefixed by its length.
  void Section(const Writer& section) {
    U64(section.out_.size());
    Bytes(section.out_);
  }
  std::vector<std::uint8_t> Take() && { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t base)
      : bytes_(bytes), base_(base) {}

  std::uint64_t U64() {
    Require(8, "u64");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) {
      v |= static_cast<std::uint64_t>(bytes_[pos_ + k]) << (8 * k);
    }
    pos_ += 8;
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::size_t Count(std::size_t element_size) {
    const std::size_t at = pos_;
    const std::uint64_t n = U64();
    if (n > (bytes_.size() - pos_) / element_size) {
      Fail(at, "count " + std::to_string(n) + " exceeds remaining bytes");
    }
    return n;
  }
  std::vector<double> Reals() {
    std::vector<double> v(Count(8));
    for (double& x : v) x = F64();
    return v;
  }
  std::vector<std::size_t> Sizes() {
    std::vector<std::size_t> v(Count(8));
    for (std::size_t& x : v) x = U64();
    return v;
  }
  bool Flag() {
    const std::size_t at = pos_;
    const std::uint64_t v = U64();
    if (v > 1) Fail(at, "flag must be 0 or 1");
    return v == 1;
  }
  // Returns a reader over the next length-prefixed section.
  Reader Section(const char* name) {
    const std::size_t at = pos_;
    const std::uint64_t n = U64();
    if (n > bytes_.size() - pos_) {
      Fail(at, std::string(name) + " length " + std::to_string(n) +
                   " exceeds remaining bytes");
    }
    Reader sub(bytes_.subspan(pos_, n), base_ + pos_);
    pos_ += n;
    return sub;
  }
  void ExpectEnd(const char* name) const {
    if (pos_ != bytes_.size()) {
      Fail(pos_, std::string(name) + " has " +
                     std::to_string(bytes_.size() - pos_) + " trailing bytes");
    }
  }
  std::size_t offset() const { return base_ + pos_; }

  [[noreturn]] void Fail(std::size_t local, const std::string& message) const {
    throw Error(ErrorCode::kFormatError,
                "trajectory at byte offset " + std::to_string(base_ + local) +
                    ": " + message);
  }

 private:
  void Require(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      Fail(pos_, std::string("truncated while reading ") + what);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

void EncodeStep(const StepRecord& s, Writer& w) {
  w.U64(s.step);
  w.U64(static_cast<std::uint64_t>(s.epoch));
  w.Sizes(s.batch);
  w.F64(s.batch_loss);
  w.Reals(s.params_before);
  w.Reals(s.params_after);
  w.U64(s.grads.size());
  w.U64(s.grads.dim());
  for (double x : s.grads.data()) w.F64(x);
  w.Reals(s.noise);
  w.Reals(s.aux_noise);
  w.Reals(s.aux_offset);
}

StepRecord DecodeStep(Reader& r) {
  StepRecord s;
  s.step = r.U64();
  s.epoch = static_cast<int>(r.U64());
  s.batch = r.Sizes();
  s.batch_loss = r.F64();
  s.params_before = r.Reals();
  s.params_after = r.Reals();
  const std::size_t at = r.offset();
  const std::uint64_t rows = r.U64();
  const std::uint64_t cols = r.U64();
  if (cols == 0 ? rows != 0 : rows > (1ull << 40) / cols) {
    throw Error(ErrorCode::kFormatError,
                "trajectory at byte offset " + std::to_string(at) +
                    ": implausible gradient shape");
  }
  std::vector<double> flat(rows * cols);
  for (double& x : flat) x = r.F64();
  s.grads = cols == 0 ? SampleSet() : SampleSet(cols, std::move(flat));
  s.noise = r.Reals();
  s.aux_noise = r.Reals();
  s.aux_offset = r.Reals();
  return s;
}

std::vector<std::uint8_t> ReadBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* AlgorithmName(Algorithm a) {
  return a == Algorithm::kSgd ? "sgd" : "sgld";
}

const char* LossName(LossKind k) {
  return k == LossKind::kMse ? "mse" : "softmax_cross_entropy";
}

}  // namespace

std::vector<std::uint8_t> EncodeTrajectory(const Trajectory& t) {
  Writer header;
  const TrainConfig& c = t.config;
  header.U64(static_cast<std::uint64_t>(c.algorithm));
  header.F64(c.eta);
  header.F64(c.sigma2);
  header.U64(static_cast<std::uint64_t>(c.epochs));
  header.U64(c.batch_size);
  header.U64(c.seed);
  header.U64(static_cast<std::uint64_t>(c.record_every));
  header.U64(static_cast<std::uint64_t>(c.loss.kind));
  header.U64(t.bias ? 1 : 0);
  header.Sizes(t.layer_sizes);
  header.U64(t.has_auxiliary ? 1 : 0);
  header.F64(t.virtual_sigma2);
  header.U64(t.aux_seed);
  header.Reals(t.initial_params);
  header.Reals(t.final_params);
  header.Reals(t.train_loss);
  header.Reals(t.test_loss);
  header.Reals(t.final_aux_offset);

  Writer out;
  out.Bytes(kMagic);
  out.Section(header);
  out.U64(t.steps.size());
  for (const StepRecord& s : t.steps) {
    Writer block;
    EncodeStep(s, block);
    out.Section(block);
  }
  return std::move(out).Take();
}

Trajectory DecodeTrajectory(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, 0);
  if (bytes.size() < kMagic.size() ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    r.Fail(0, "bad magic or unsupported version");
  }
  Reader body(bytes.subspan(kMagic.size()), kMagic.size());

  Trajectory t;
  Reader h = body.Section("header");
  TrainConfig& c = t.config;
  const std::size_t alg_at = h.offset();
  const std::uint64_t alg = h.U64();
  if (alg > static_cast<std::uint64_t>(Algorithm::kSgld)) {
    throw Error(ErrorCode::kFormatError, "trajectory at byte offset " +
                                             std::to_string(alg_at) +
                                             ": unknown algorithm");
  }
  c.algorithm = static_cast<Algorithm>(alg);
  c.eta = h.F64();
  c.sigma2 = h.F64();
  c.epochs = static_cast<int>(h.U64());
  c.batch_size = h.U64();
  c.seed = h.U64();
  c.record_every = static_cast<int>(h.U64());
  const std::size_t loss_at = h.offset();
  const std::uint64_t loss = h.U64();
  if (loss > static_cast<std::uint64_t>(LossKind::kSoftmaxCrossEntropy)) {
    throw Error(ErrorCode::kFormatError, "trajectory at byte offset " +
                                             std::to_string(loss_at) +
                                             ": unknown loss kind");
  }
  c.loss.kind = static_cast<LossKind>(loss);
  t.bias = h.Flag();
  t.layer_sizes = h.Sizes();
  t.has_auxiliary = h.Flag();
  t.virtual_sigma2 = h.F64();
  t.aux_seed = h.U64();
  t.initial_params = h.Reals();
  t.final_params = h.Reals();
  t.train_loss = h.Reals();
  t.test_loss = h.Reals();
  t.final_aux_offset = h.Reals();
  h.ExpectEnd("header");

  const std::size_t count = body.Count(8);
  t.steps.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Reader block = body.Section("step block");
    t.steps.push_back(DecodeStep(block));
    block.ExpectEnd("step block");
  }
  body.ExpectEnd("trajectory");
  return t;
}

nlohmann::json TrainConfigToJson(const TrainConfig& c) {
  return {{"algorithm", AlgorithmName(c.algorithm)},
          {"eta", c.eta},
          {"sigma2", c.sigma2},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"record_every", c.record_every},
          {"loss", LossName(c.loss.kind)}};
}

void TrainConfigFromJson(const nlohmann::json& j, TrainConfig& c) {
  try {
    if (j.contains("algorithm")) {
      const auto name = j.at("algorithm").get<std::string>();
      if (name == "sgd") {
        c.algorithm = Algorithm::kSgd;
      } else if (name == "sgld") {
        c.algorithm = Algorithm::kSgld;
      } else {
        throw Error(ErrorCode::kInvalidInput, "unknown algorithm " + name);
      }
    }
    if (j.contains("eta")) c.eta = j.at("eta").get<double>();
    if (j.contains("sigma2")) c.sigma2 = j.at("sigma2").get<double>();
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("record_every")) c.record_every = j.at("record_every").get<int>();
    if (j.contains("loss")) {
      const auto name = j.at("loss").get<std::string>();
      if (name == "mse") {
        c.loss.kind = LossKind::kMse;
      } else if (name == "softmax_cross_entropy") {
        c.loss.kind = LossKind::kSoftmaxCrossEntropy;
      } else {
        throw Error(ErrorCode::kInvalidInput, "unknown loss " + name);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("config: ") + e.what());
  }
}

nlohmann::json TrajectorySidecar(const Trajectory& t) {
  nlohmann::json j;
  j["format"] = "renyigen-trajectory";
  j["version"] = 1;
  j["config"] = TrainConfigToJson(t.config);
  j["layer_sizes"] = t.layer_sizes;
  j["bias"] = t.bias;
  j["steps"] = t.steps.size();
  j["param_count"] = t.initial_params.size();
  j["has_auxiliary"] = t.has_auxiliary;
  if (t.has_auxiliary) {
    j["virtual_sigma2"] = t.virtual_sigma2;
    j["aux_seed"] = t.aux_seed;
  }
  return j;
}

void WriteTrajectory(const Trajectory& t, const std::filesystem::path& path) {
  const auto bytes = EncodeTrajectory(t);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
  }
  auto sidecar = path;
  sidecar += ".json";
  std::ofstream js(sidecar, std::ios::trunc);
  if (!js) throw Error(ErrorCode::kIoError, "cannot write " + sidecar.string());
  js << TrajectorySidecar(t).dump(2) << '\n';
}

Trajectory ReadTrajectory(const std::filesystem::path& path) {
  return DecodeTrajectory(ReadBytes(path));
}

}  // namespace renyigen
