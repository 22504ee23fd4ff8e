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

#include "obverter/agents/model.h"

#include <algorithm>
#include <stdexcept>

namespace obverter::agents {

using diff::BoundParams;
using diff::Mode;
using diff::Tape;
using diff::Tensor;
using diff::Var;

std::string MessageToString(const Message& m) {
  std::string out;
  for (int s : m) {
    if (s < 0 || s > 9) throw std::invalid_argument("symbol out of digit range");
    out.push_back(static_cast<char>('0' + s));
  }
  return out;
}

Message MessageFromString(std::string_view s) {
  Message m;
  for (char c : s) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("message '" + std::string(s) + "' is not a digit string");
    }
    m.push_back(c - '0');
  }
  return m;
}

Var Embed(const BoundParams& p, const AgentConfig& config, Var images, Mode mode,
          const diff::ParamStore& store, diff::ParamStore* running) {
  const diff::Shape& s = images.shape();
  if (s.size() != 4 || s[1] != config.resolution || s[2] != config.resolution || s[3] != 3) {
    throw diff::ShapeError("agent expects [N x " + std::to_string(config.resolution) +
                           " x " + std::to_string(config.resolution) + " x 3] images, got " +
                           diff::ShapeToString(s));
  }
  Var x = images;
  for (std::size_t l = 0; l < config.strides.size(); ++l) {
    const int i = static_cast<int>(l);
    x = diff::Conv2dValid(x, p(names::ConvKernel(i)), config.strides[l]);
    diff::BatchNormRunning stats;
    if (mode == Mode::kEval) {
      stats.mean = &store.Get(names::BnMean(i));
      stats.var = &store.Get(names::BnVar(i));
    } else if (running != nullptr) {
      stats.update_mean = &running->Get(names::BnMean(i));
      stats.update_var = &running->Get(names::BnVar(i));
    }
    x = diff::BatchNorm(x, p(names::BnGamma(i)), p(names::BnBeta(i)), mode, stats);
    x = diff::Relu(x);
  }
  x = diff::Reshape(x, {s[0], config.FlatSize()});
  return diff::Relu(diff::Affine(x, p(names::kFcWeight), p(names::kFcBias)));
}

Var ImageProjection(const BoundParams& p, Var embedding) {
  return diff::Affine(embedding, p(names::kDecisionImg), p(names::kDecisionBias));
}

Var DecisionScore(const BoundParams& p, Var hidden, Var image_projection) {
  Var d = diff::Relu(diff::Add(diff::MatMul(hidden, p(names::kDecisionMsg)), image_projection));
  return diff::Sigmoid(diff::Affine(d, p(names::kOutWeight), p(names::kOutBias)));
}

Tensor OneHot(std::span<const int> symbols, int vocab_size) {
  Tensor t({static_cast<int>(symbols.size()), vocab_size}, 0.0f);
  for (std::size_t r = 0; r < symbols.size(); ++r) {
    const int s = symbols[r];
    if (s >= vocab_size) {
      throw std::invalid_argument("symbol " + std::to_string(s) + " outside vocabulary of " +
                                  std::to_string(vocab_size));
    }
    if (s >= 0) t[r * vocab_size + s] = 1.0f;
  }
  return t;
}

Var ReadMessages(Tape& tape, const BoundParams& p, const AgentConfig& config,
                 std::span<const Message> messages) {
  const int n = static_cast<int>(messages.size());
  std::size_t longest = 0;
  for (const Message& m : messages) longest = std::max(longest, m.size());
  const diff::GruWeights w{p(names::kGruInput), p(names::kGruHidden), p(names::kGruBias)};
  Var h = tape.Constant(Tensor({n, config.hidden_size}, 0.0f));
  std::vector<int> symbols(n);
  std::vector<std::uint8_t> active(n);
  for (std::size_t t = 0; t < longest; ++t) {
    for (int r = 0; r < n; ++r) {
      const bool on = t < messages[r].size();
      active[r] = on ? 1 : 0;
      symbols[r] = on ? messages[r][t] : -1;
    }
    Var x = tape.Constant(OneHot(symbols, config.vocab_size));
    h = diff::SelectRows(diff::GruCell(x, h, w), h, active);
  }
  return h;
}

Var ConsumeForward(Tape& tape, const BoundParams& p, const AgentConfig& config,
                   const diff::ParamStore& store, Var images,
                   std::span<const Message> messages, Mode mode,
                   diff::ParamStore* running) {
  if (images.shape()[0] != static_cast<int>(messages.size())) {
    throw diff::ShapeError("image count " + std::to_string(images.shape()[0]) +
                           " != message count " + std::to_string(messages.size()));
  }
  Var z = Embed(p, config, images, mode, store, running);
  Var proj = ImageProjection(p, z);
  Var h = ReadMessages(tape, p, config, messages);
  return DecisionScore(p, h, proj);
}

float ClampScore(float raw) {
  return std::clamp(raw, diff::kProbEpsilon, 1.0f - diff::kProbEpsilon);
}

Tensor EmbedImages(const Agent& agent, const Tensor& images) {
  Tape tape;
  BoundParams p(tape, agent.params(), false);
  Var x = tape.Ref(images, false);
  return Embed(p, agent.config(), x, Mode::kEval, agent.params(), nullptr).value();
}

std::vector<float> ConsumeScores(const Agent& agent, const Tensor& images,
                                 std::span<const Message> messages) {
  Tape tape;
  BoundParams p(tape, agent.params(), false);
  Var x = tape.Ref(images, false);
  const Tensor& raw = ConsumeForward(tape, p, agent.config(), agent.params(), x, messages,
                                     Mode::kEval, nullptr)
                          .value();
  std::vector<float> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = ClampScore(raw[i]);
  return out;
}

}  // namespace obverter::agents
