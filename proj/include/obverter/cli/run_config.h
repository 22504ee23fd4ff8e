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

// Run configuration for the command-line runner.
//
// Config files are line oriented:
//
//   # comment
//   preset = micro
//   rounds = 2000
//   batali.holdout = diagonal
//   eval.trials_per_pair = 20
//
// Bare keys are image-game settings, `batali.` keys configure the
// population experiment and `eval.` keys the evaluation pipelines. A
// `preset` line, if any, must come first.

#ifndef OBVERTER_CLI_RUN_CONFIG_H_
#define OBVERTER_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "obverter/arena/game_config.h"
#include "obverter/batali/batali.h"

namespace obverter::cli {

enum class Mode {
  kTrainImage,
  kTrainBatali,
  kEvalMatrix,
  kZeroShot,
  kExportEmbeddings,
  kReport,
  kExportDataset,
  kRenderIndex,
};

std::string_view ModeName(Mode mode);
Mode ParseMode(std::string_view name);

struct EvalSettings {
  int trials_per_pair = 10;
  int mixed_trials = 1000;
  int n_per_type = 40;
  int top_k = 5;
  int chunk_size = 64;

  void Validate() const;
};

struct RunConfig {
  Mode mode = Mode::kTrainImage;
  arena::GameConfig game;
  batali::PopulationConfig population;
  EvalSettings eval;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> checkpoints;
  std::filesystem::path dataset_dir;  // render-index input
  std::string preset = "paper";
  // Every key set from a config file, in file order.
  std::vector<std::string> keys_set;

  // Copies the master seed into the module configs and checks the fields
  // the mode needs. Throws std::invalid_argument.
  void Finalize();
  // Flat snapshot for the manifest.
  std::map<std::string, std::string> ToFields() const;
};

// A config problem tied to a source line (line 0 when not line specific).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// Named starting points: paper (128x128), desk64, desk32 and micro.
void ApplyPreset(std::string_view name, RunConfig* config);
const std::vector<std::string>& PresetNames();

// Every key a config file may contain.
std::vector<std::string> AllKeys();
// The closest known key within edit distance 3, or "" if none.
std::string SuggestKey(std::string_view key);

void SetKey(std::string_view key, std::string_view value, RunConfig* config);

// Parses config text into `config`; `source` names the text in errors.
void ParseConfigText(std::string_view text, const std::string& source, RunConfig* config);
// Throws ConfigError when the file is missing or malformed.
void LoadConfig(const std::filesystem::path& path, RunConfig* config);

std::vector<int> ParseMeaningList(std::string_view text);

}  // namespace obverter::cli

#endif  // OBVERTER_CLI_RUN_CONFIG_H_
