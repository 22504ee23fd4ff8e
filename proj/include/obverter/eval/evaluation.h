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

// Post-training evaluation of a pair of image-game agents: the per-type
// accuracy matrix, zero-shot reports, probe logs, embedding export, and the
// CSV forms of each.

#ifndef OBVERTER_EVAL_EVALUATION_H_
#define OBVERTER_EVAL_EVALUATION_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "obverter/agents/agent.h"
#include "obverter/agents/obverter.h"
#include "obverter/eval/metrics.h"
#include "obverter/scene/object_spec.h"
#include "obverter/scene/render.h"

namespace obverter::eval {

struct EvalOptions {
  int trials_per_pair = 10;  // the first half with agent 0 speaking
  std::uint64_t seed = 0;
  scene::SceneConfig scene;
  agents::ObverterOptions obverter;
  int chunk_size = 64;  // images per forward pass; does not affect results
};

struct TrialTally {
  int correct = 0;
  int trials = 0;
  double accuracy() const { return trials == 0 ? 0.0 : static_cast<double>(correct) / trials; }
};

struct AccuracyMatrix {
  std::vector<scene::ObjectSpec> types;
  std::vector<TrialTally> cells;  // row = speaker type, column = listener type

  const TrialTally& at(int speaker, int listener) const {
    return cells.at(static_cast<std::size_t>(speaker) * types.size() + listener);
  }
  double Overall() const;
};

// Every ordered pair of `types` is played trials_per_pair times with fresh
// images; a trial is correct when the listener's rounded score equals
// whether the two types match.
AccuracyMatrix ComputeAccuracyMatrix(const agents::Agent& agent0, const agents::Agent& agent1,
                                     std::span<const scene::ObjectSpec> types,
                                     const EvalOptions& options);

struct ZeroShotRow {
  scene::ObjectSpec type;
  std::string case_name;  // "speaker", "listener" or "both"
  TrialTally tally;
};

struct ZeroShotPartition {
  std::string name;  // "both_heldout", "speaker_only", "listener_only", "neither"
  TrialTally tally;
};

struct ZeroShotReport {
  std::vector<ZeroShotRow> rows;
  std::vector<ZeroShotPartition> partition;
};

// For each held-out type: given to the speaker against every type in
// `types`, to the listener against every type, and to both. Cells use the
// same trials as ComputeAccuracyMatrix over `types`. The mixed test set of
// `mixed_trials` pairs, drawn with the default composition over all types,
// is split by which side saw a held-out type.
ZeroShotReport ZeroShotEval(const agents::Agent& agent0, const agents::Agent& agent1,
                            std::span<const scene::ObjectSpec> types,
                            const scene::HoldoutSet& holdout, const EvalOptions& options,
                            int mixed_trials);

// Throws std::invalid_argument unless the checkpoint metadata records
// `holdout` (the "game.holdout" field).
void VerifyHoldout(const std::map<std::string, std::string>& metadata,
                   const scene::HoldoutSet& holdout);

// Both agents describe the same n_per_type fresh images of every type.
MessageLog ProbeMessages(const agents::Agent& agent0, const agents::Agent& agent1,
                         std::span<const scene::ObjectSpec> types, int n_per_type,
                         const EvalOptions& options);

struct EmbeddingRow {
  scene::ObjectSpec type;
  int agent = 0;
  std::vector<float> values;
};

// n_per_type renders per type, embedded by every agent in `agents`.
std::vector<EmbeddingRow> ExportEmbeddings(std::span<const agents::Agent* const> agents,
                                           std::span<const scene::ObjectSpec> types,
                                           int n_per_type, const EvalOptions& options);

// "color,shape" columns; a count above one is appended to the shape as _x2.
std::string SpecColumns(const scene::ObjectSpec& spec);

void WriteMatrixCsv(std::ostream& out, const AccuracyMatrix& matrix);
void WriteZeroShotCsv(std::ostream& out, const ZeroShotReport& report);
void WriteMessageTableCsv(std::ostream& out, std::span<const MessageTableRow> rows);
void WriteEmbeddingsCsv(std::ostream& out, std::span<const EmbeddingRow> rows);

}  // namespace obverter::eval

#endif  // OBVERTER_EVAL_EVALUATION_H_
