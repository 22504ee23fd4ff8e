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

// Forward computation of an agent on a tape. Training and inference share
// these functions; inference simply binds the parameters without gradients.

#ifndef OBVERTER_AGENTS_MODEL_H_
#define OBVERTER_AGENTS_MODEL_H_

#include <span>
#include <string>
#include <vector>

#include "obverter/agents/agent.h"
#include "obverter/diff/ops.h"
#include "obverter/diff/param_store.h"
#include "obverter/diff/tape.h"

namespace obverter::agents {

// Symbol ids in [0, vocab_size).
using Message = std::vector<int>;

// "01123"-style rendering used in every CSV.
std::string MessageToString(const Message& m);
Message MessageFromString(std::string_view s);

// images [N x R x R x 3] -> embeddings [N x E], all entries >= 0. Eval mode
// reads batch-norm running averages from `store`; train mode writes its
// moving averages into `running` when it is not null.
// Throws diff::ShapeError when R differs from the configured resolution.
diff::Var Embed(const diff::BoundParams& p, const AgentConfig& config, diff::Var images,
                diff::Mode mode, const diff::ParamStore& store,
                diff::ParamStore* running);

// z W_img + b for the first decision layer; [N x D].
diff::Var ImageProjection(const diff::BoundParams& p, diff::Var embedding);

// Sigmoid score [N x 1] from hidden states [N x H] and image projections.
diff::Var DecisionScore(const diff::BoundParams& p, diff::Var hidden,
                        diff::Var image_projection);

// One-hot [N x V] rows; a negative symbol gives an all-zero row.
diff::Tensor OneHot(std::span<const int> symbols, int vocab_size);

// Final GRU state after reading each message from a zero state. Messages may
// differ in length; a row stops changing once its message ends, and an empty
// message leaves the zero state.
diff::Var ReadMessages(diff::Tape& tape, const diff::BoundParams& p,
                       const AgentConfig& config, std::span<const Message> messages);

// Full listener pass: scores [N x 1] for (image, message) pairs.
diff::Var ConsumeForward(diff::Tape& tape, const diff::BoundParams& p,
                         const AgentConfig& config, const diff::ParamStore& store,
                         diff::Var images, std::span<const Message> messages,
                         diff::Mode mode, diff::ParamStore* running);

// Clamps a raw sigmoid output into [kProbEpsilon, 1 - kProbEpsilon].
float ClampScore(float raw);

// Inference helpers; eval-mode batch norm, no gradients, agent untouched.
diff::Tensor EmbedImages(const Agent& agent, const diff::Tensor& images);
std::vector<float> ConsumeScores(const Agent& agent, const diff::Tensor& images,
                                 std::span<const Message> messages);

}  // namespace obverter::agents

#endif  // OBVERTER_AGENTS_MODEL_H_
