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

#include "obverter/cli/run_config.h"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "obverter/config_values.h"

namespace obverter::cli {
namespace {

using config_values::ParseDouble;
using config_values::ParseInt;
using config_values::ParseU64;
using config_values::SplitList;
using config_values::Trim;

constexpr std::string_view kBataliPrefix = "batali.";
constexpr std::string_view kEvalPrefix = "eval.";

constexpr std::array<std::pair<Mode, std::string_view>, 8> kModes = {{
    {Mode::kTrainImage, "train-image"},
    {Mode::kTrainBatali, "train-batali"},
    {Mode::kEvalMatrix, "eval-matrix"},
    {Mode::kZeroShot, "zero-shot"},
    {Mode::kExportEmbeddings, "export-embeddings"},
    {Mode::kReport, "report"},
    {Mode::kExportDataset, "export-dataset"},
    {Mode::kRenderIndex, "render-index"},
}};

const std::vector<std::string>& BataliKeys() {
  static const std::vector<std::string> keys = {
      "population", "teachers",   "max_length", "threshold",    "learning_rate",
      "init_range", "holdout",    "max_rounds", "target_error"};
  return keys;
}

const std::vector<std::string>& EvalKeys() {
  static const std::vector<std::string> keys = {"trials_per_pair", "mixed_trials",
                                                "n_per_type", "top_k", "chunk_size"};
  return keys;
}

void SetBataliKey(std::string_view key, std::string_view value,
                  batali::PopulationConfig* p) {
  if (key == "population") {
    p->population = ParseInt(key, value);
  } else if (key == "teachers") {
    p->teachers = ParseInt(key, value);
  } else if (key == "max_length") {
    p->max_length = ParseInt(key, value);
  } else if (key == "threshold") {
    p->threshold = ParseDouble(key, value);
  } else if (key == "learning_rate") {
    p->learning_rate = ParseDouble(key, value);
  } else if (key == "init_range") {
    p->init_range = ParseDouble(key, value);
  } else if (key == "holdout") {
    p->holdout = ParseMeaningList(value);
  } else if (key == "max_rounds") {
    p->max_rounds = ParseInt(key, value);
  } else if (key == "target_error") {
    p->target_error = ParseDouble(key, value);
  } else {
    throw std::invalid_argument("unknown key");
  }
}

void SetEvalKey(std::string_view key, std::string_view value, EvalSettings* e) {
  if (key == "trials_per_pair") {
    e->trials_per_pair = ParseInt(key, value);
  } else if (key == "mixed_trials") {
    e->mixed_trials = ParseInt(key, value);
  } else if (key == "n_per_type") {
    e->n_per_type = ParseInt(key, value);
  } else if (key == "top_k") {
    e->top_k = ParseInt(key, value);
  } else if (key == "chunk_size") {
    e->chunk_size = ParseInt(key, value);
  } else {
    throw std::invalid_argument("unknown key");
  }
}

bool IsKnownKey(std::string_view key) {
  const auto keys = AllKeys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

int EditDistance(std::string_view a, std::string_view b) {
  std::vector<int> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace

std::string_view ModeName(Mode mode) {
  for (const auto& [m, name] : kModes) {
    if (m == mode) return name;
  }
  return "unknown";
}

Mode ParseMode(std::string_view name) {
  for (const auto& [m, n] : kModes) {
    if (n == name) return m;
  }
  throw std::invalid_argument(fmt::format("unknown mode '{}'", name));
}

void EvalSettings::Validate() const {
  if (trials_per_pair < 1) throw std::invalid_argument("eval.trials_per_pair must be positive");
  if (mixed_trials < 0) throw std::invalid_argument("eval.mixed_trials must not be negative");
  if (n_per_type < 1) throw std::invalid_argument("eval.n_per_type must be positive");
  if (top_k < 1) throw std::invalid_argument("eval.top_k must be positive");
  if (chunk_size < 2) throw std::invalid_argument("eval.chunk_size must be at least 2");
}

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::invalid_argument(line > 0 ? fmt::format("{}:{}: {}", source, line, message)
                                     : fmt::format("{}: {}", source, message)),
      line_(line) {}

const std::vector<std::string>& PresetNames() {
  static const std::vector<std::string> names = {"paper", "desk64", "desk32", "micro"};
  return names;
}

void ApplyPreset(std::string_view name, RunConfig* config) {
  arena::GameConfig game;
  if (name == "paper") {
    // Library defaults.
  } else if (name == "desk64") {
    game.agent.resolution = 64;
  } else if (name == "desk32") {
    game.agent = agents::AgentConfig::Micro();
  } else if (name == "micro") {
    game = arena::GameConfig::Micro();
  } else {
    throw std::invalid_argument(
        fmt::format("unknown preset '{}' (expected paper, desk64, desk32 or micro)", name));
  }
  config->game = game;
  config->seed = game.seed;
  config->preset = std::string(name);
}

std::vector<std::string> AllKeys() {
  std::vector<std::string> keys = {"preset"};
  for (const auto& k : arena::GameConfig::Keys()) keys.push_back(k);
  for (const auto& k : BataliKeys()) keys.push_back(std::string(kBataliPrefix) + k);
  for (const auto& k : EvalKeys()) keys.push_back(std::string(kEvalPrefix) + k);
  return keys;
}

std::string SuggestKey(std::string_view key) {
  std::string best;
  int best_distance = 4;
  for (const auto& k : AllKeys()) {
    const int d = EditDistance(key, k);
    if (d < best_distance) {
      best_distance = d;
      best = k;
    }
  }
  return best;
}

std::vector<int> ParseMeaningList(std::string_view text) {
  const std::string_view trimmed = Trim(text);
  if (trimmed == "none" || trimmed.empty()) return {};
  if (trimmed == "diagonal") return batali::DiagonalIndices();
  std::vector<int> out;
  for (const auto& item : SplitList(trimmed)) {
    if (!item.empty() && std::isdigit(static_cast<unsigned char>(item[0]))) {
      out.push_back(ParseInt("batali.holdout", item));
    } else {
      out.push_back(batali::MeaningIndex(item));
    }
  }
  return out;
}

void SetKey(std::string_view key, std::string_view value, RunConfig* config) {
  if (!IsKnownKey(key)) {
    const std::string suggestion = SuggestKey(key);
    throw std::invalid_argument(
        suggestion.empty() ? fmt::format("unknown key '{}'", key)
                           : fmt::format("unknown key '{}' (did you mean '{}'?)", key, suggestion));
  }
  if (key == "preset") {
    ApplyPreset(Trim(value), config);
  } else if (key == "seed") {
    config->seed = ParseU64(key, value);
  } else if (key.starts_with(kBataliPrefix)) {
    SetBataliKey(key.substr(kBataliPrefix.size()), value, &config->population);
  } else if (key.starts_with(kEvalPrefix)) {
    SetEvalKey(key.substr(kEvalPrefix.size()), value, &config->eval);
  } else {
    config->game.Set(key, value);
  }
  config->keys_set.emplace_back(key);
}

void ParseConfigText(std::string_view text, const std::string& source, RunConfig* config) {
  std::set<std::string> seen;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source, line_no, fmt::format("expected 'key = value', got '{}'", line));
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "missing key before '='");
    if (!seen.insert(key).second) {
      throw ConfigError(source, line_no, fmt::format("duplicate key '{}'", key));
    }
    if (key == "preset" && seen.size() > 1) {
      throw ConfigError(source, line_no, "preset must be the first setting");
    }
    try {
      SetKey(key, value, config);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, line_no, e.what());
    }
  }
}

void LoadConfig(const std::filesystem::path& path, RunConfig* config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "config file not found or unreadable");
  std::ostringstream text;
  text << in.rdbuf();
  ParseConfigText(text.str(), path.string(), config);
}

namespace {

bool KeyAppliesTo(std::string_view key, Mode mode) {
  if (key == "seed") return true;
  const bool batali_key = key.starts_with(kBataliPrefix);
  const bool eval_key = key.starts_with(kEvalPrefix);
  const bool game_key = !batali_key && !eval_key;  // includes preset
  switch (mode) {
    case Mode::kTrainImage:
    case Mode::kRenderIndex:
      return game_key;
    case Mode::kExportDataset:
      return game_key || key == "eval.n_per_type";
    case Mode::kTrainBatali:
      return batali_key;
    case Mode::kEvalMatrix:
    case Mode::kZeroShot:
    case Mode::kExportEmbeddings:
    case Mode::kReport:
      return eval_key;
  }
  return false;
}

}  // namespace

void RunConfig::Finalize() {
  for (const auto& key : keys_set) {
    if (!KeyAppliesTo(key, mode)) {
      throw std::invalid_argument(
          fmt::format("key '{}' does not apply to mode {}", key, ModeName(mode)));
    }
  }
  game.seed = seed;
  population.seed = seed;
  eval.Validate();
  switch (mode) {
    case Mode::kTrainImage:
    case Mode::kExportDataset:
      game.Validate();
      break;
    case Mode::kTrainBatali:
      population.Validate();
      break;
    case Mode::kEvalMatrix:
    case Mode::kZeroShot:
    case Mode::kReport:
      if (checkpoints.size() != 2) {
        throw std::invalid_argument(fmt::format(
            "{} needs two --checkpoint files (agent 0 and agent 1)", ModeName(mode)));
      }
      break;
    case Mode::kExportEmbeddings:
      if (checkpoints.empty()) {
        throw std::invalid_argument("export-embeddings needs at least one --checkpoint");
      }
      break;
    case Mode::kRenderIndex:
      if (dataset_dir.empty()) throw std::invalid_argument("render-index needs --dataset");
      break;
  }
  if (out_dir.empty()) throw std::invalid_argument("--out is required");
}

std::map<std::string, std::string> RunConfig::ToFields() const {
  std::map<std::string, std::string> fields;
  fields["mode"] = std::string(ModeName(mode));
  fields["seed"] = std::to_string(seed);
  fields["preset"] = preset;
  const bool image_mode = mode == Mode::kTrainImage || mode == Mode::kExportDataset;
  if (image_mode) {
    for (const auto& [k, v] : game.ToFields()) fields["game." + k] = v;
  }
  if (mode == Mode::kTrainBatali) {
    std::vector<std::string> holdout;
    for (int h : population.holdout) holdout.push_back(std::to_string(h));
    fields["batali.population"] = std::to_string(population.population);
    fields["batali.teachers"] = std::to_string(population.teachers);
    fields["batali.max_length"] = std::to_string(population.max_length);
    fields["batali.threshold"] = fmt::format("{}", population.threshold);
    fields["batali.learning_rate"] = fmt::format("{}", population.learning_rate);
    fields["batali.init_range"] = fmt::format("{}", population.init_range);
    fields["batali.holdout"] = holdout.empty() ? "none" : config_values::JoinList(holdout);
    fields["batali.max_rounds"] = std::to_string(population.max_rounds);
    fields["batali.target_error"] = fmt::format("{}", population.target_error);
  }
  if (!image_mode && mode != Mode::kTrainBatali) {
    fields["eval.trials_per_pair"] = std::to_string(eval.trials_per_pair);
    fields["eval.mixed_trials"] = std::to_string(eval.mixed_trials);
    fields["eval.n_per_type"] = std::to_string(eval.n_per_type);
    fields["eval.top_k"] = std::to_string(eval.top_k);
    fields["eval.chunk_size"] = std::to_string(eval.chunk_size);
  }
  if (mode == Mode::kExportDataset) {
    fields["eval.n_per_type"] = std::to_string(eval.n_per_type);
  }
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    fields[fmt::format("checkpoint{}", i)] = checkpoints[i].string();
  }
  if (!dataset_dir.empty()) fields["dataset"] = dataset_dir.string();
  return fields;
}

}  // namespace obverter::cli
