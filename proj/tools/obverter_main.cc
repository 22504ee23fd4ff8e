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

// obverter: single entry point for training, evaluation and export.
//
//   obverter train-image --config micro.cfg --seed 1 --out runs/micro
//   obverter eval-matrix --checkpoint a0.ckpt --checkpoint a1.ckpt --out runs/eval

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "obverter/cli/run_config.h"
#include "obverter/cli/runner.h"

namespace {

using obverter::cli::Mode;

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> checkpoints;
  std::string dataset;
};

CLI::App* AddMode(CLI::App& app, Mode mode, const std::string& help, Flags& flags) {
  CLI::App* sub = app.add_subcommand(std::string(obverter::cli::ModeName(mode)), help);
  sub->add_option("--config", flags.config, "key = value settings file");
  sub->add_option("--seed", flags.seed, "master seed (overrides the config file)");
  sub->add_option("--out", flags.out, "output directory")->required();
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Obverter emergent-language experiments"};
  app.require_subcommand(1);
  Flags flags;

  AddMode(app, Mode::kTrainImage, "train two agents on the image description game", flags);
  AddMode(app, Mode::kTrainBatali, "train the meaning-vector population", flags);
  for (auto [mode, help] : {std::pair{Mode::kEvalMatrix, "per-type accuracy matrix"},
                            std::pair{Mode::kZeroShot, "zero-shot report on held-out types"},
                            std::pair{Mode::kReport, "message tables and language metrics"}}) {
    AddMode(app, mode, help, flags)
        ->add_option("--checkpoint", flags.checkpoints, "agent 0 then agent 1 checkpoint")
        ->required()
        ->expected(2);
  }
  AddMode(app, Mode::kExportEmbeddings, "image embeddings of one or more agents", flags)
      ->add_option("--checkpoint", flags.checkpoints, "agent checkpoint (repeatable)")
      ->required();
  AddMode(app, Mode::kExportDataset, "write rendered images with an index", flags);
  AddMode(app, Mode::kRenderIndex, "regenerate every image of a dataset index", flags)
      ->add_option("--dataset", flags.dataset, "directory holding index.txt")
      ->required();

  CLI11_PARSE(app, argc, argv);
  CLI::App* chosen = app.get_subcommands().front();

  obverter::cli::RunConfig config;
  try {
    config.mode = obverter::cli::ParseMode(chosen->get_name());
    if (!flags.config.empty()) obverter::cli::LoadConfig(flags.config, &config);
    if (chosen->count("--seed") > 0) config.seed = flags.seed;
    config.out_dir = flags.out;
    for (const auto& c : flags.checkpoints) config.checkpoints.emplace_back(c);
    config.dataset_dir = flags.dataset;
    config.Finalize();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  obverter::cli::RunHooks hooks;
  hooks.log = [](const std::string& line) { std::printf("%s\n", line.c_str()); };
  try {
    const auto manifest = obverter::cli::Run(config, hooks);
    std::printf("%zu files listed in %s/%s\n", manifest.files.size(), flags.out.c_str(),
                std::string(obverter::cli::kManifestName).c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s (partial manifest written)\n", e.what());
    return 1;
  }
  return 0;
}
