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

// The two-agent image description game. In every game the teacher describes
// its images with obverter messages and the learner, seeing its own images,
// is trained to tell whether both saw the same object type. Roles swap
// every round.

#ifndef OBVERTER_ARENA_ARENA_H_
#define OBVERTER_ARENA_ARENA_H_

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "obverter/agents/agent.h"
#include "obverter/agents/obverter.h"
#include "obverter/arena/game_config.h"
#include "obverter/diff/optimizer.h"
#include "obverter/scene/pair_sampler.h"

namespace obverter::arena {

struct GameResult {
  float loss = 0.0f;
  double accuracy = 0.0;
  double distinctness = 0.0;
  double avg_msg_len = 0.0;
  std::vector<agents::Utterance> utterances;
  std::vector<float> scores;  // learner outputs before the update
};

// Teacher speaks about batch.speaker_images, the learner scores its
// listener images against those messages, and one optimizer step is taken
// on the learner's binary cross-entropy. The teacher is only read.
// Throws diff::NonFiniteError when the loss is not finite.
GameResult PlayGame(const agents::Agent& teacher, agents::Agent& learner,
                    diff::Optimizer& learner_optimizer, const scene::PairBatch& batch,
                    const agents::ObverterOptions& options);

struct RoundStats {
  int round = 0;
  double accuracy = 0.0;
  double loss = 0.0;  // mean of the per-game losses
  double avg_msg_len = 0.0;
  double distinctness = 0.0;
};

struct GameLogRow {
  int round = 0;
  int game = 0;
  int speaker = 0;
  float loss = 0.0f;
  double accuracy = 0.0;
  double distinctness = 0.0;
  double avg_msg_len = 0.0;
};

struct ProbeRecord {
  int round = 0;  // rounds completed when the probe ran
  std::vector<scene::ObjectSpec> types;
  std::vector<agents::Message> messages[2];
};

// Two agents with their optimizers and the training-time batch sampler.
class Arena {
 public:
  explicit Arena(const GameConfig& config);

  const GameConfig& config() const { return config_; }
  const agents::Agent& agent(int i) const { return agents_.at(i); }
  agents::Agent& agent(int i) { return agents_.at(i); }
  const scene::PairSampler& sampler() const { return sampler_; }

  // Agent 0 speaks in even rounds, agent 1 in odd ones.
  static int Speaker(int round) { return round % 2; }

  RoundStats PlayRound(int round, std::vector<GameLogRow>* games = nullptr);

  // Both agents describe the same images.
  ProbeRecord Probe(int round, const std::vector<scene::SceneSample>& scenes) const;
  // The fixed probe set of a run: probe_size images of uniformly drawn
  // training types.
  std::vector<scene::SceneSample> ProbeScenes() const;

 private:
  GameConfig config_;
  std::vector<agents::Agent> agents_;
  std::vector<diff::Optimizer> optimizers_;
  scene::PairSampler sampler_;
};

struct TrainOptions {
  // Called after every round; may be empty.
  std::function<void(const RoundStats&)> on_round;
  bool write_checkpoints = true;
};

struct TrainResult {
  std::vector<RoundStats> stats;
  std::vector<ProbeRecord> probes;
  std::vector<std::filesystem::path> files;  // every artifact written
};

// Runs config.rounds rounds and writes, under `out_dir`:
//   round_stats.csv, game_log.csv, probes.csv, probe_metrics.csv and
//   checkpoints/agent{0,1}_round<R>.ckpt every checkpoint_interval rounds
//   plus checkpoints/agent{0,1}_final.ckpt.
// On a non-finite value both agents are saved as agent{i}_abort.ckpt and
// the diff::NonFiniteError is rethrown.
TrainResult Train(const GameConfig& config, const std::filesystem::path& out_dir,
                  const TrainOptions& options = {});

// Checkpoint header fields for one agent of a run.
std::map<std::string, std::string> CheckpointMetadata(const GameConfig& config, int agent_id,
                                                      int round);
// Recovers the game configuration stored by CheckpointMetadata.
GameConfig GameConfigFromMetadata(const std::map<std::string, std::string>& metadata);

}  // namespace obverter::arena

#endif  // OBVERTER_ARENA_ARENA_H_
