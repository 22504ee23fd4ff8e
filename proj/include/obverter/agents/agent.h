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

#ifndef OBVERTER_AGENTS_AGENT_H_
#define OBVERTER_AGENTS_AGENT_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "obverter/diff/param_store.h"

namespace obverter::agents {

// Layer sizes of one agent. Defaults are the full-scale model: eight 3x3
// conv layers of 32 filters on 128x128 input, a 256-wide embedding, a GRU
// with 64 hidden units and a 128-wide decision layer.
struct AgentConfig {
  int resolution = 128;
  int conv_channels = 32;
  std::vector<int> strides = {2, 1, 1, 2, 1, 2, 1, 2};
  int embedding_size = 256;
  int hidden_size = 64;
  int decision_size = 128;
  int vocab_size = 5;

  static AgentConfig Paper() { return {}; }
  // 32x32 input, four stride-2 layers of 8 filters, GRU of 32.
  static AgentConfig Micro();

  // Spatial side length after each conv layer. Throws std::invalid_argument
  // when the input shrinks below the kernel before the last layer.
  std::vector<int> SpatialSizes() const;
  int FlatSize() const;
  void Validate() const;

  // Flat key=value form stored in checkpoint headers.
  std::map<std::string, std::string> ToFields() const;
  static AgentConfig FromFields(const std::map<std::string, std::string>& fields);

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

// Parameter names, shared by initialization and the forward pass.
namespace names {
std::string ConvKernel(int layer);
std::string BnGamma(int layer);
std::string BnBeta(int layer);
std::string BnMean(int layer);
std::string BnVar(int layer);
inline constexpr const char* kFcWeight = "visual/fc/weight";
inline constexpr const char* kFcBias = "visual/fc/bias";
inline constexpr const char* kGruInput = "language/gru/input_weights";
inline constexpr const char* kGruHidden = "language/gru/hidden_weights";
inline constexpr const char* kGruBias = "language/gru/bias";
// The first decision layer acts on [h, z]; its weight is stored as the two
// row blocks so the image half can be applied once per image.
inline constexpr const char* kDecisionMsg = "decision/hidden/weight_message";
inline constexpr const char* kDecisionImg = "decision/hidden/weight_image";
inline constexpr const char* kDecisionBias = "decision/hidden/bias";
inline constexpr const char* kOutWeight = "decision/out/weight";
inline constexpr const char* kOutBias = "decision/out/bias";
}  // namespace names

class Agent {
 public:
  // Fresh random initialization, deterministic in `seed`.
  Agent(const AgentConfig& config, std::uint64_t seed);
  // Adopts existing parameters; shapes are checked against `config`.
  Agent(const AgentConfig& config, diff::ParamStore params);

  const AgentConfig& config() const { return config_; }
  const diff::ParamStore& params() const { return params_; }
  diff::ParamStore& params() { return params_; }

 private:
  AgentConfig config_;
  diff::ParamStore params_;
};

// Checkpoint file: "OBVAGNT1", u32 LE header length, header text of
// `key=value` lines (agent layout plus caller metadata), then the
// parameter store in its own serialized form.
inline constexpr std::string_view kAgentMagic = "OBVAGNT1";

struct AgentCheckpoint {
  AgentConfig config;
  std::map<std::string, std::string> metadata;
  diff::ParamStore params;
};

void WriteAgent(std::ostream& out, const Agent& agent,
                const std::map<std::string, std::string>& metadata);
void SaveAgent(const std::string& path, const Agent& agent,
               const std::map<std::string, std::string>& metadata);
// Throws std::runtime_error on a malformed file.
AgentCheckpoint ReadAgent(std::istream& in);
AgentCheckpoint LoadAgent(const std::string& path);
Agent ToAgent(AgentCheckpoint checkpoint);

}  // namespace obverter::agents

#endif  // OBVERTER_AGENTS_AGENT_H_
