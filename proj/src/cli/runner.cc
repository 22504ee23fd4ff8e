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

#include "obverter/cli/runner.h"

#include <fmt/format.h>

#include <fstream>
#include <vector>

#include "obverter/agents/agent.h"
#include "obverter/arena/arena.h"
#include "obverter/batali/batali.h"
#include "obverter/eval/evaluation.h"
#include "obverter/eval/metrics.h"
#include "obverter/scene/dataset.h"

namespace obverter::cli {
namespace {

namespace fs = std::filesystem;

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void Log(const RunHooks& hooks, const std::string& line) {
  if (hooks.log) hooks.log(line);
}

struct LoadedPair {
  std::vector<agents::Agent> agents;
  arena::GameConfig game;
  std::map<std::string, std::string> metadata0;
};

// Loads checkpoints and recovers the game they were trained in from the
// first one. All agents must share one architecture.
LoadedPair LoadAgents(const RunConfig& config) {
  LoadedPair loaded;
  for (std::size_t i = 0; i < config.checkpoints.size(); ++i) {
    agents::AgentCheckpoint ckpt = agents::LoadAgent(config.checkpoints[i].string());
    if (i == 0) {
      loaded.game = arena::GameConfigFromMetadata(ckpt.metadata);
      loaded.metadata0 = ckpt.metadata;
    } else if (!(ckpt.config == loaded.agents.front().config())) {
      throw std::invalid_argument(fmt::format("{} does not match the architecture of {}",
                                              config.checkpoints[i].string(),
                                              config.checkpoints[0].string()));
    }
    loaded.agents.push_back(agents::ToAgent(std::move(ckpt)));
  }
  return loaded;
}

eval::EvalOptions MakeEvalOptions(const RunConfig& config, const arena::GameConfig& game) {
  eval::EvalOptions o;
  o.trials_per_pair = config.eval.trials_per_pair;
  o.seed = config.seed;
  o.scene = game.Scene();
  o.obverter = game.Obverter();
  o.chunk_size = config.eval.chunk_size;
  return o;
}

void RunTrainImage(const RunConfig& config, const RunHooks& hooks) {
  arena::TrainOptions options;
  const int every = std::max(1, config.game.rounds / 20);
  options.on_round = [&](const arena::RoundStats& s) {
    if ((s.round + 1) % every == 0) {
      Log(hooks, fmt::format("round {:>6}  accuracy {:.3f}  loss {:.4f}  length {:.2f}",
                             s.round + 1, s.accuracy, s.loss, s.avg_msg_len));
    }
  };
  arena::Train(config.game, config.out_dir, options);
}

void RunTrainBatali(const RunConfig& config, const RunHooks& hooks) {
  batali::Population population(config.population);
  auto rounds_csv = OpenOut(config.out_dir / "batali_rounds.csv");
  rounds_csv << "round,learner,error\n";
  const int every = std::max(1, config.population.max_rounds / 20);
  const batali::TrainReport report =
      batali::TrainPopulation(population, [&](const batali::Population::RoundReport& r) {
        rounds_csv << fmt::format("{},{},{}\n", r.round, r.learner, r.learner_error);
        if ((r.round + 1) % every == 0) {
          Log(hooks, fmt::format("round {:>6}  learner error {:.4f}", r.round + 1,
                                 r.learner_error));
        }
      });

  auto table_csv = OpenOut(config.out_dir / "message_table.csv");
  table_csv << "subject,predicate,message,support_count\n";
  for (const auto& row : batali::MajorityTable(population)) {
    table_csv << fmt::format("{},{},{},{}\n", row.subject, row.predicate, row.message,
                             row.support_count);
  }

  const auto& training = population.training_meanings();
  auto summary_csv = OpenOut(config.out_dir / "batali_summary.csv");
  summary_csv << "metric,value\n";
  summary_csv << fmt::format("rounds,{}\n", report.rounds.size());
  summary_csv << fmt::format("rounds_to_target,{}\n", report.rounds_to_target);
  summary_csv << fmt::format("final_error,{}\n", report.final_error);
  summary_csv << fmt::format("self_decode_training,{}\n",
                             batali::SelfDecodeAccuracy(population, training));
  summary_csv << fmt::format("cross_decode_training,{}\n",
                             batali::CrossDecodeAccuracy(population, training));
  if (!config.population.holdout.empty()) {
    summary_csv << fmt::format(
        "cross_decode_heldout,{}\n",
        batali::CrossDecodeAccuracy(population, config.population.holdout));
  }
  Log(hooks, fmt::format("stopped after {} rounds, windowed error {:.4f}",
                         report.rounds.size(), report.final_error));
}

void RunEvalMatrix(const RunConfig& config, const RunHooks& hooks) {
  const LoadedPair loaded = LoadAgents(config);
  const auto types = scene::EnumerateTypes(loaded.game.space);
  Log(hooks, fmt::format("{} types, {} trials per ordered pair", types.size(),
                         config.eval.trials_per_pair));
  const eval::AccuracyMatrix matrix = eval::ComputeAccuracyMatrix(
      loaded.agents[0], loaded.agents[1], types, MakeEvalOptions(config, loaded.game));
  auto out = OpenOut(config.out_dir / "accuracy_matrix.csv");
  eval::WriteMatrixCsv(out, matrix);
  Log(hooks, fmt::format("overall accuracy {:.4f}", matrix.Overall()));
}

void RunZeroShot(const RunConfig& config, const RunHooks& hooks) {
  const LoadedPair loaded = LoadAgents(config);
  const scene::HoldoutSet& holdout = loaded.game.holdout;
  if (holdout.empty()) {
    throw std::invalid_argument("zero-shot needs agents trained with a holdout");
  }
  for (const auto& path : config.checkpoints) {
    eval::VerifyHoldout(agents::LoadAgent(path.string()).metadata, holdout);
  }
  const auto types = scene::EnumerateTypes(loaded.game.space);
  const eval::ZeroShotReport report =
      eval::ZeroShotEval(loaded.agents[0], loaded.agents[1], types, holdout,
                         MakeEvalOptions(config, loaded.game), config.eval.mixed_trials);
  auto out = OpenOut(config.out_dir / "zero_shot.csv");
  eval::WriteZeroShotCsv(out, report);
  Log(hooks, fmt::format("{} held-out rows for holdout {}", report.rows.size(),
                         holdout.ToString()));
}

void RunExportEmbeddings(const RunConfig& config, const RunHooks& hooks) {
  const LoadedPair loaded = LoadAgents(config);
  const auto types = scene::EnumerateTypes(loaded.game.space);
  std::vector<const agents::Agent*> agents;
  for (const auto& a : loaded.agents) agents.push_back(&a);
  const auto rows = eval::ExportEmbeddings(agents, types, config.eval.n_per_type,
                                           MakeEvalOptions(config, loaded.game));
  auto out = OpenOut(config.out_dir / "embeddings.csv");
  eval::WriteEmbeddingsCsv(out, rows);
  Log(hooks, fmt::format("{} embedding rows", rows.size()));
}

void RunReport(const RunConfig& config, const RunHooks& hooks) {
  const LoadedPair loaded = LoadAgents(config);
  const auto types = scene::EnumerateTypes(loaded.game.space, loaded.game.holdout);
  const eval::MessageLog log =
      eval::ProbeMessages(loaded.agents[0], loaded.agents[1], types, config.eval.n_per_type,
                          MakeEvalOptions(config, loaded.game));
  auto table = OpenOut(config.out_dir / "message_table.csv");
  const auto rows = eval::MessageTable(log, config.eval.top_k);
  eval::WriteMessageTableCsv(table, rows);

  auto metrics = OpenOut(config.out_dir / "metrics.csv");
  metrics << "metric,value\n";
  const double p0 = eval::Perplexity(log, 0);
  const double p1 = eval::Perplexity(log, 1);
  const double jaccard = eval::Jaccard(log, 0, log, 1);
  metrics << fmt::format("perplexity_agent0,{}\n", p0);
  metrics << fmt::format("perplexity_agent1,{}\n", p1);
  metrics << fmt::format("jaccard,{}\n", jaccard);
  Log(hooks, fmt::format("perplexity {:.3f} / {:.3f}, jaccard {:.3f}", p0, p1, jaccard));
}

void RunExportDataset(const RunConfig& config, const RunHooks& hooks) {
  const auto types = scene::EnumerateTypes(config.game.space);
  const auto entries = scene::ExportDataset(config.out_dir / "dataset", types,
                                            config.eval.n_per_type, config.seed,
                                            config.game.Scene());
  Log(hooks, fmt::format("{} images written", entries.size()));
}

void RunRenderIndex(const RunConfig& config, const RunHooks& hooks) {
  scene::SceneConfig scene_config = config.game.Scene();
  const auto entries = scene::ReadIndex(config.dataset_dir, &scene_config);
  for (const auto& e : entries) {
    const auto ppm = scene::EncodePpm(scene::RegenerateImage(e, scene_config));
    const fs::path path = config.out_dir / e.path;
    fs::create_directories(path.parent_path());
    auto out = OpenOut(path);
    out.write(reinterpret_cast<const char*>(ppm.data()),
              static_cast<std::streamsize>(ppm.size()));
  }
  Log(hooks, fmt::format("{} images regenerated", entries.size()));
}

}  // namespace

RunManifest Run(RunConfig config, const RunHooks& hooks) {
  config.Finalize();
  fs::create_directories(config.out_dir);

  RunManifest manifest;
  manifest.mode = std::string(ModeName(config.mode));
  manifest.seed = config.seed;
  manifest.config = config.ToFields();
  try {
    switch (config.mode) {
      case Mode::kTrainImage:
        RunTrainImage(config, hooks);
        break;
      case Mode::kTrainBatali:
        RunTrainBatali(config, hooks);
        break;
      case Mode::kEvalMatrix:
        RunEvalMatrix(config, hooks);
        break;
      case Mode::kZeroShot:
        RunZeroShot(config, hooks);
        break;
      case Mode::kExportEmbeddings:
        RunExportEmbeddings(config, hooks);
        break;
      case Mode::kReport:
        RunReport(config, hooks);
        break;
      case Mode::kExportDataset:
        RunExportDataset(config, hooks);
        break;
      case Mode::kRenderIndex:
        RunRenderIndex(config, hooks);
        break;
    }
  } catch (const std::exception& e) {
    manifest.error = e.what();
    manifest.files = ScanOutputs(config.out_dir);
    WriteManifest(config.out_dir, manifest);
    throw RunFailure(e.what(), manifest);
  }
  manifest.complete = true;
  manifest.files = ScanOutputs(config.out_dir);
  WriteManifest(config.out_dir, manifest);
  return manifest;
}

}  // namespace obverter::cli
