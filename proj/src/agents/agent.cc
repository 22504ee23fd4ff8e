// Copyright 2026 The Obverter Authors
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

#include "obverter/agents/agent.h"

#include <fmt/format.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "obverter/diff/ops.h"
#include "obverter/random.h"

namespace obverter::agents {
namespace {

using diff::Tensor;

Tensor UniformTensor(diff::Shape shape, float bound, Rng& rng) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<float> dist(-bound, bound);
  for (float& v : t.data()) v = dist(rng);
  return t;
}

std::string JoinInts(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> SplitInts(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stoi(item));
  return out;
}

void PutU32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

std::uint32_t GetU32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw std::runtime_error("agent checkpoint truncated");
  }
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

AgentConfig AgentConfig::Micro() {
  AgentConfig c;
  c.resolution = 32;
  c.conv_channels = 8;
  c.strides = {2, 2, 2, 2};
  c.hidden_size = 32;
  return c;
}

std::vector<int> AgentConfig::SpatialSizes() const {
  std::vector<int> sizes;
  int side = resolution;
  for (int s : strides) {
    if (side < 3) {
      throw std::invalid_argument(fmt::format(
          "resolution {} is too small for {} conv layers", resolution, strides.size()));
    }
    side = diff::ValidOutputSize(side, 3, s);
    sizes.push_back(side);
  }
  return sizes;
}

int AgentConfig::FlatSize() const {
  const auto sizes = SpatialSizes();
  const int side = sizes.empty() ? resolution : sizes.back();
  const int channels = sizes.empty() ? 3 : conv_channels;
  return side * side * channels;
}

void AgentConfig::Validate() const {
  if (strides.empty()) throw std::invalid_argument("at least one conv layer is required");
  for (int s : strides) {
    if (s < 1) throw std::invalid_argument("conv strides must be positive");
  }
  if (conv_channels < 1 || embedding_size < 1 || hidden_size < 1 || decision_size < 1) {
    throw std::invalid_argument("layer sizes must be positive");
  }
  if (vocab_size < 2) {
    throw std::invalid_argument(fmt::format("vocab_size must be >= 2, got {}", vocab_size));
  }
  SpatialSizes();
}

std::map<std::string, std::string> AgentConfig::ToFields() const {
  return {{"agent.resolution", std::to_string(resolution)},
          {"agent.conv_channels", std::to_string(conv_channels)},
          {"agent.strides", JoinInts(strides)},
          {"agent.embedding_size", std::to_string(embedding_size)},
          {"agent.hidden_size", std::to_string(hidden_size)},
          {"agent.decision_size", std::to_string(decision_size)},
          {"agent.vocab_size", std::to_string(vocab_size)}};
}

AgentConfig AgentConfig::FromFields(const std::map<std::string, std::string>& f) {
  auto get = [&f](const char* key) -> const std::string& {
    auto it = f.find(key);
    if (it == f.end()) throw std::runtime_error(std::string("checkpoint lacks ") + key);
    return it->second;
  };
  AgentConfig c;
  c.resolution = std::stoi(get("agent.resolution"));
  c.conv_channels = std::stoi(get("agent.conv_channels"));
  c.strides = SplitInts(get("agent.strides"));
  c.embedding_size = std::stoi(get("agent.embedding_size"));
  c.hidden_size = std::stoi(get("agent.hidden_size"));
  c.decision_size = std::stoi(get("agent.decision_size"));
  c.vocab_size = std::stoi(get("agent.vocab_size"));
  c.Validate();
  return c;
}

namespace names {
std::string ConvKernel(int layer) { return fmt::format("visual/conv{}/kernel", layer); }
std::string BnGamma(int layer) { return fmt::format("visual/conv{}/bn_gamma", layer); }
std::string BnBeta(int layer) { return fmt::format("visual/conv{}/bn_beta", layer); }
std::string BnMean(int layer) { return fmt::format("visual/conv{}/bn_running_mean", layer); }
std::string BnVar(int layer) { return fmt::format("visual/conv{}/bn_running_var", layer); }
}  // namespace names

Agent::Agent(const AgentConfig& config, std::uint64_t seed) : config_(config) {
  config_.Validate();
  Rng rng(DeriveSeed(seed, {Tag(Stream::kInit)}));
  const int k = config_.conv_channels;
  int in_channels = 3;
  for (std::size_t l = 0; l < config_.strides.size(); ++l) {
    const int i = static_cast<int>(l);
    const float bound = std::sqrt(6.0f / (9.0f * in_channels));
    params_.Add(names::ConvKernel(i), UniformTensor({k, 3, 3, in_channels}, bound, rng));
    params_.Add(names::BnGamma(i), Tensor({k}, 1.0f));
    params_.Add(names::BnBeta(i), Tensor({k}, 0.0f));
    params_.Add(names::BnMean(i), Tensor({k}, 0.0f), false);
    params_.Add(names::BnVar(i), Tensor({k}, 1.0f), false);
    in_channels = k;
  }
  const int flat = config_.FlatSize();
  const int e = config_.embedding_size;
  const int h = config_.hidden_size;
  const int d = config_.decision_size;
  const int v = config_.vocab_size;
  params_.Add(names::kFcWeight, UniformTensor({flat, e}, std::sqrt(6.0f / flat), rng));
  params_.Add(names::kFcBias, Tensor({e}, 0.0f));
  const float gru_bound = 1.0f / std::sqrt(static_cast<float>(h));
  params_.Add(names::kGruInput, UniformTensor({v, 3 * h}, gru_bound, rng));
  params_.Add(names::kGruHidden, UniformTensor({h, 3 * h}, gru_bound, rng));
  params_.Add(names::kGruBias, Tensor({3 * h}, 0.0f));
  const float dec_bound = std::sqrt(6.0f / static_cast<float>(h + e));
  params_.Add(names::kDecisionMsg, UniformTensor({h, d}, dec_bound, rng));
  params_.Add(names::kDecisionImg, UniformTensor({e, d}, dec_bound, rng));
  params_.Add(names::kDecisionBias, Tensor({d}, 0.0f));
  params_.Add(names::kOutWeight,
              UniformTensor({d, 1}, 1.0f / std::sqrt(static_cast<float>(d)), rng));
  params_.Add(names::kOutBias, Tensor({1}, 0.0f));
}

Agent::Agent(const AgentConfig& config, diff::ParamStore params) : config_(config) {
  config_.Validate();
  const Agent reference(config_, 0);
  if (params.size() != reference.params_.size()) {
    throw std::invalid_argument(fmt::format(
        "parameter count {} does not match the configured layout ({})", params.size(),
        reference.params_.size()));
  }
  // Check names and shapes by copying into a correctly laid out store.
  params_ = reference.params_;
  params_.AssignValuesFrom(params);
}

void WriteAgent(std::ostream& out, const Agent& agent,
                const std::map<std::string, std::string>& metadata) {
  std::map<std::string, std::string> fields = metadata;
  for (auto& [k, v] : agent.config().ToFields()) fields[k] = v;
  std::string header;
  for (const auto& [k, v] : fields) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw std::invalid_argument("checkpoint metadata key/value is not line-safe: " + k);
    }
    header += k + "=" + v + "\n";
  }
  out.write(kAgentMagic.data(), static_cast<std::streamsize>(kAgentMagic.size()));
  PutU32(out, static_cast<std::uint32_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  agent.params().Write(out);
}

void SaveAgent(const std::string& path, const Agent& agent,
               const std::map<std::string, std::string>& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  WriteAgent(out, agent, metadata);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path);
}

AgentCheckpoint ReadAgent(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::string_view(magic, 8) != kAgentMagic) {
    throw std::runtime_error("not an agent checkpoint (bad magic)");
  }
  const std::uint32_t len = GetU32(in);
  std::string header(len, '\0');
  if (!in.read(header.data(), len)) throw std::runtime_error("agent checkpoint truncated");
  AgentCheckpoint ckpt;
  std::map<std::string, std::string> fields;
  std::istringstream lines(header);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad checkpoint header line");
    const std::string key = line.substr(0, eq);
    if (key.starts_with("agent.")) {
      fields[key] = line.substr(eq + 1);
    } else {
      ckpt.metadata[key] = line.substr(eq + 1);
    }
  }
  ckpt.config = AgentConfig::FromFields(fields);
  ckpt.params = diff::ParamStore::Read(in);
  return ckpt;
}

AgentCheckpoint LoadAgent(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint not found: " + path);
  return ReadAgent(in);
}

Agent ToAgent(AgentCheckpoint checkpoint) {
  return Agent(checkpoint.config, std::move(checkpoint.params));
}

}  // namespace obverter::agents
