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

#ifndef OBVERTER_AGENTS_OBVERTER_H_
#define OBVERTER_AGENTS_OBVERTER_H_

#include <vector>

#include "obverter/agents/agent.h"
#include "obverter/agents/model.h"
#include "obverter/diff/tensor.h"

namespace obverter::agents {

struct ObverterOptions {
  int max_length = 20;
  float threshold = 0.95f;
};

struct Utterance {
  Message message;
  float score = 0.0f;  // the speaker's own clamped score for the message
};

// Speaks about each image by asking, one symbol at a time, which extension
// the speaker itself would find most convincing. At every step each symbol
// is tried from the current GRU state and scored against the speaker's own
// embedding; the best (lowest index on ties) is kept. Generation stops once
// that score exceeds the threshold or the message reaches max_length, so
// every message has at least one symbol.
//
// Runs with eval-mode batch norm and never modifies the agent. Each image is
// processed independently: the result for an image does not depend on the
// other images in the batch.
std::vector<Utterance> GenerateObverter(const Agent& speaker, const diff::Tensor& images,
                                        const ObverterOptions& options);

}  // namespace obverter::agents

#endif  // OBVERTER_AGENTS_OBVERTER_H_
