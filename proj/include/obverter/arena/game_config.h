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

#ifndef OBVERTER_ARENA_GAME_CONFIG_H_
#define OBVERTER_ARENA_GAME_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "obverter/agents/agent.h"
#include "obverter/agents/obverter.h"
#include "obverter/diff/optimizer.h"
#include "obverter/scene/object_spec.h"
#include "obverter/scene/pair_sampler.h"
#include "obverter/scene/render.h"

namespace obverter::arena {

struct GameConfig {
  int rounds = 20000;
  int games_per_round = 20;
  int batch_size = 50;
  int max_len = 20;
  float threshold = 0.95f;
  scene::CompositionRatios ratios;
  scene::TypeSpace space = scene::TypeSpace::Full();
  scene::HoldoutSet holdout;
  double min_scale = 0.25;
  double max_scale = 0.45;
  agents::AgentConfig agent;  // also carries resolution and vocab_size
  diff::OptimizerConfig optimizer;
  int probe_interval = 10;
  int probe_size = 1000;
  int checkpoint_interval = 500;
  std::uint64_t seed = 0;

  // Two colors by two shapes on 32x32 images with the reduced visual stack.
  static GameConfig Micro();

  scene::SceneConfig Scene() const;
  agents::ObverterOptions Obverter() const { return {max_len, threshold}; }

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;

  // Text key/value access shared by config files and checkpoint headers.
  // Set throws std::invalid_argument for unknown keys or unparsable values.
  void Set(std::string_view key, std::string_view value);
  std::map<std::string, std::string> ToFields() const;
  static const std::vector<std::string>& Keys();
};

}  // namespace obverter::arena

#endif  // OBVERTER_ARENA_GAME_CONFIG_H_
