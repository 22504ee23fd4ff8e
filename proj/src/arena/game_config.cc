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

#include "obverter/arena/game_config.h"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "obverter/config_values.h"

namespace obverter::arena {

using config_values::JoinList;
using config_values::ParseDouble;
using config_values::ParseFloat;
using config_values::ParseInt;
using config_values::ParseIntList;
using config_values::ParseU64;
using config_values::SplitList;

GameConfig GameConfig::Micro() {
  GameConfig c;
  c.rounds = 1000;
  c.games_per_round = 10;
  c.batch_size = 20;
  c.space.colors = {scene::Color::kBlue, scene::Color::kRed};
  c.space.shapes = {scene::ShapeKind::kBox, scene::ShapeKind::kSphere};
  c.min_scale = 0.55;
  c.max_scale = 0.7;
  c.agent = agents::AgentConfig::Micro();
  c.optimizer.learning_rate = 1e-3f;
  c.seed = 1;
  c.probe_size = 40;
  c.probe_interval = 50;
  c.checkpoint_interval = 500;
  return c;
}

scene::SceneConfig GameConfig::Scene() const {
  scene::SceneConfig s;
  s.resolution = agent.resolution;
  s.min_scale = min_scale;
  s.max_scale = max_scale;
  return s;
}

void GameConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(rounds > 0, "rounds must be positive");
  require(games_per_round > 0, "games_per_round must be positive");
  require(batch_size >= 2, "batch_size must be at least 2 (batch norm needs two rows)");
  require(max_len >= 1, "max_len must be positive");
  require(threshold > 0.0f && threshold < 1.0f, "threshold must lie in (0, 1)");
  require(probe_interval > 0, "probe_interval must be positive");
  require(probe_size > 0, "probe_size must be positive");
  require(checkpoint_interval > 0, "checkpoint_interval must be positive");
  require(agent.resolution >= 32, "resolution must be at least 32");
  require(min_scale > 0.0 && min_scale <= max_scale && max_scale <= 0.7,
          "scale range must satisfy 0 < min_scale <= max_scale <= 0.7");
  require(optimizer.learning_rate > 0.0f, "learning_rate must be positive");
  for (int c : space.counts) require(c == 1 || c == 2, "counts must be 1 or 2");
  agent.Validate();
  // Surfaces infeasible compositions and bad ratios.
  scene::PairSampler(space, holdout, ratios);
}

const std::vector<std::string>& GameConfig::Keys() {
  static const std::vector<std::string> keys = {
      "rounds",         "games_per_round", "batch_size",     "max_len",
      "threshold",      "ratios",          "colors",         "shapes",
      "counts",         "holdout",         "min_scale",      "max_scale",
      "resolution",     "conv_channels",   "strides",        "embedding_size",
      "hidden_size",    "decision_size",   "vocab_size",     "optimizer",
      "learning_rate",  "beta1",           "beta2",          "adam_epsilon",
      "probe_interval", "probe_size",      "checkpoint_interval", "seed"};
  return keys;
}

void GameConfig::Set(std::string_view key, std::string_view value) {
  if (key == "rounds") {
    rounds = ParseInt(key, value);
  } else if (key == "games_per_round") {
    games_per_round = ParseInt(key, value);
  } else if (key == "batch_size") {
    batch_size = ParseInt(key, value);
  } else if (key == "max_len") {
    max_len = ParseInt(key, value);
  } else if (key == "threshold") {
    threshold = ParseFloat(key, value);
  } else if (key == "ratios") {
    const auto parts = SplitList(value);
    if (parts.size() != 4) {
      throw std::invalid_argument("ratios needs four comma-separated values");
    }
    for (int i = 0; i < 4; ++i) ratios.values[i] = ParseDouble(key, parts[i]);
  } else if (key == "colors") {
    space.colors.clear();
    for (const auto& p : SplitList(value)) space.colors.push_back(scene::ParseColor(p));
  } else if (key == "shapes") {
    space.shapes.clear();
    for (const auto& p : SplitList(value)) space.shapes.push_back(scene::ParseShape(p));
  } else if (key == "counts") {
    space.counts = ParseIntList(key, value);
  } else if (key == "holdout") {
    holdout = scene::HoldoutSet::Parse(value);
  } else if (key == "min_scale") {
    min_scale = ParseDouble(key, value);
  } else if (key == "max_scale") {
    max_scale = ParseDouble(key, value);
  } else if (key == "resolution") {
    agent.resolution = ParseInt(key, value);
  } else if (key == "conv_channels") {
    agent.conv_channels = ParseInt(key, value);
  } else if (key == "strides") {
    agent.strides = ParseIntList(key, value);
  } else if (key == "embedding_size") {
    agent.embedding_size = ParseInt(key, value);
  } else if (key == "hidden_size") {
    agent.hidden_size = ParseInt(key, value);
  } else if (key == "decision_size") {
    agent.decision_size = ParseInt(key, value);
  } else if (key == "vocab_size") {
    agent.vocab_size = ParseInt(key, value);
  } else if (key == "optimizer") {
    optimizer.kind = diff::ParseOptimizerKind(value);
  } else if (key == "learning_rate") {
    optimizer.learning_rate = ParseFloat(key, value);
  } else if (key == "beta1") {
    optimizer.beta1 = ParseFloat(key, value);
  } else if (key == "beta2") {
    optimizer.beta2 = ParseFloat(key, value);
  } else if (key == "adam_epsilon") {
    optimizer.epsilon = ParseFloat(key, value);
  } else if (key == "probe_interval") {
    probe_interval = ParseInt(key, value);
  } else if (key == "probe_size") {
    probe_size = ParseInt(key, value);
  } else if (key == "checkpoint_interval") {
    checkpoint_interval = ParseInt(key, value);
  } else if (key == "seed") {
    seed = ParseU64(key, value);
  } else {
    throw std::invalid_argument("unknown game key '" + std::string(key) + "'");
  }
}

std::map<std::string, std::string> GameConfig::ToFields() const {
  std::vector<std::string> colors, shapes;
  for (auto c : space.colors) colors.emplace_back(scene::ColorName(c));
  for (auto s : space.shapes) shapes.emplace_back(scene::ShapeName(s));
  std::vector<std::string> ratio_text;
  for (double r : ratios.values) ratio_text.push_back(fmt::format("{}", r));
  std::vector<std::string> counts, strides;
  for (int c : space.counts) counts.push_back(std::to_string(c));
  for (int s : agent.strides) strides.push_back(std::to_string(s));
  return {
      {"rounds", std::to_string(rounds)},
      {"games_per_round", std::to_string(games_per_round)},
      {"batch_size", std::to_string(batch_size)},
      {"max_len", std::to_string(max_len)},
      {"threshold", fmt::format("{}", threshold)},
      {"ratios", JoinList(ratio_text)},
      {"colors", JoinList(colors)},
      {"shapes", JoinList(shapes)},
      {"counts", JoinList(counts)},
      {"holdout", holdout.ToString()},
      {"min_scale", fmt::format("{}", min_scale)},
      {"max_scale", fmt::format("{}", max_scale)},
      {"resolution", std::to_string(agent.resolution)},
      {"conv_channels", std::to_string(agent.conv_channels)},
      {"strides", JoinList(strides)},
      {"embedding_size", std::to_string(agent.embedding_size)},
      {"hidden_size", std::to_string(agent.hidden_size)},
      {"decision_size", std::to_string(agent.decision_size)},
      {"vocab_size", std::to_string(agent.vocab_size)},
      {"optimizer", std::string(diff::OptimizerKindName(optimizer.kind))},
      {"learning_rate", fmt::format("{}", optimizer.learning_rate)},
      {"beta1", fmt::format("{}", optimizer.beta1)},
      {"beta2", fmt::format("{}", optimizer.beta2)},
      {"adam_epsilon", fmt::format("{}", optimizer.epsilon)},
      {"probe_interval", std::to_string(probe_interval)},
      {"probe_size", std::to_string(probe_size)},
      {"checkpoint_interval", std::to_string(checkpoint_interval)},
      {"seed", std::to_string(seed)},
  };
}

}  // namespace obverter::arena
