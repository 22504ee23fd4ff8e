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

#include "obverter/arena/arena.h"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "obverter/agents/model.h"
#include "obverter/diff/ops.h"
#include "obverter/diff/tape.h"
#include "obverter/eval/evaluation.h"
#include "obverter/eval/metrics.h"
#include "obverter/random.h"

namespace obverter::arena {
namespace {

constexpr std::string_view kGamePrefix = "game.";

std::ofstream OpenCsv(const std::filesystem::path& path, std::string_view header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << '\n';
  return out;
}

std::string CheckpointPath(const std::filesystem::path& dir, int agent,
                           std::string_view tag) {
  return (dir / fmt::format("agent{}_{}.ckpt", agent, tag)).string();
}

}  // namespace

GameResult PlayGame(const agents::Agent& teacher, agents::Agent& learner,
                    diff::Optimizer& learner_optimizer, const scene::PairBatch& batch,
                    const agents::ObverterOptions& options) {
  GameResult result;
  result.utterances = agents::GenerateObverter(teacher, batch.speaker_images, options);

  std::vector<agents::Message> messages;
  messages.reserve(result.utterances.size());
  double total_len = 0.0;
  for (const auto& u : result.utterances) {
    messages.push_back(u.message);
    total_len += static_cast<double>(u.message.size());
  }
  result.avg_msg_len = total_len / static_cast<double>(messages.size());
  result.distinctness = eval::Distinctness(std::span<const std::vector<int>>(messages));

  diff::ParamStore& store = learner.params();
  diff::Tape tape;
  diff::BoundParams p(tape, store, true);
  diff::Var images = tape.Ref(batch.listener_images, false);
  diff::Var scores = agents::ConsumeForward(tape, p, learner.config(), store, images,
                                            messages, diff::Mode::kTrain, &store);
  diff::Var loss = diff::BceLoss(scores, batch.plan.labels);
  result.loss = loss.value()[0];
  if (!std::isfinite(result.loss)) {
    throw diff::NonFiniteError(fmt::format("non-finite listener loss {}", result.loss));
  }
  result.scores.assign(scores.value().data().begin(), scores.value().data().end());
  result.accuracy = eval::Accuracy(result.scores, batch.plan.labels);

  tape.Backward(loss);
  learner_optimizer.Step(store, p.Gradients(store));
  return result;
}

Arena::Arena(const GameConfig& config)
    : config_(config), sampler_(config.space, config.holdout, config.ratios) {
  config_.Validate();
  for (int i = 0; i < 2; ++i) {
    agents_.emplace_back(config_.agent, DeriveSeed(config_.seed, {Tag(Stream::kInit),
                                                                  static_cast<std::uint64_t>(i)}));
    optimizers_.emplace_back(config_.optimizer);
  }
}

RoundStats Arena::PlayRound(int round, std::vector<GameLogRow>* games) {
  const int speaker = Speaker(round);
  const int listener = 1 - speaker;
  const auto options = config_.Obverter();
  const auto scene_config = config_.Scene();

  RoundStats stats;
  stats.round = round;
  for (int g = 0; g < config_.games_per_round; ++g) {
    Rng rng = MakeRng(config_.seed, {Tag(Stream::kGameBatch), static_cast<std::uint64_t>(round),
                                     static_cast<std::uint64_t>(g)});
    const scene::PairBatch batch = sampler_.Sample(config_.batch_size, rng, scene_config);
    const GameResult r =
        PlayGame(agents_[speaker], agents_[listener], optimizers_[listener], batch, options);
    stats.accuracy += r.accuracy;
    stats.loss += r.loss;
    stats.avg_msg_len += r.avg_msg_len;
    stats.distinctness += r.distinctness;
    if (games != nullptr) {
      games->push_back(
          {round, g, speaker, r.loss, r.accuracy, r.distinctness, r.avg_msg_len});
    }
  }
  const double n = config_.games_per_round;
  stats.accuracy /= n;
  stats.loss /= n;
  stats.avg_msg_len /= n;
  stats.distinctness /= n;
  return stats;
}

std::vector<scene::SceneSample> Arena::ProbeScenes() const {
  Rng rng = MakeRng(config_.seed, {Tag(Stream::kProbe)});
  const auto& types = sampler_.types();
  std::vector<scene::SceneSample> scenes;
  scenes.reserve(config_.probe_size);
  const auto scene_config = config_.Scene();
  for (int i = 0; i < config_.probe_size; ++i) {
    const auto& spec = types[UniformIndex(rng, static_cast<int>(types.size()))];
    scenes.push_back(scene::SampleScene(spec, rng(), scene_config));
  }
  return scenes;
}

ProbeRecord Arena::Probe(int round, const std::vector<scene::SceneSample>& scenes) const {
  ProbeRecord record;
  record.round = round;
  for (const auto& s : scenes) record.types.push_back(s.spec);
  const diff::Tensor images = scene::RenderBatch(scenes, config_.agent.resolution);
  for (int a = 0; a < 2; ++a) {
    for (auto& u : agents::GenerateObverter(agents_[a], images, config_.Obverter())) {
      record.messages[a].push_back(std::move(u.message));
    }
  }
  return record;
}

std::map<std::string, std::string> CheckpointMetadata(const GameConfig& config, int agent_id,
                                                      int round) {
  std::map<std::string, std::string> meta;
  for (const auto& [k, v] : config.ToFields()) meta[std::string(kGamePrefix) + k] = v;
  meta["agent_id"] = std::to_string(agent_id);
  meta["round"] = std::to_string(round);
  return meta;
}

GameConfig GameConfigFromMetadata(const std::map<std::string, std::string>& metadata) {
  GameConfig config;
  bool any = false;
  for (const auto& [k, v] : metadata) {
    if (k.starts_with(kGamePrefix)) {
      config.Set(std::string_view(k).substr(kGamePrefix.size()), v);
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("checkpoint carries no game configuration");
  return config;
}

TrainResult Train(const GameConfig& config, const std::filesystem::path& out_dir,
                  const TrainOptions& options) {
  Arena arena(config);
  TrainResult result;

  std::filesystem::create_directories(out_dir);
  const auto ckpt_dir = out_dir / "checkpoints";
  if (options.write_checkpoints) std::filesystem::create_directories(ckpt_dir);

  const auto stats_path = out_dir / "round_stats.csv";
  const auto games_path = out_dir / "game_log.csv";
  const auto probes_path = out_dir / "probes.csv";
  const auto probe_metrics_path = out_dir / "probe_metrics.csv";
  auto stats_csv = OpenCsv(stats_path, "round,accuracy,loss,avg_msg_len,distinctness");
  auto games_csv =
      OpenCsv(games_path, "round,game,speaker,loss,accuracy,distinctness,avg_msg_len");
  auto probes_csv = OpenCsv(probes_path, "round,color,shape,agent,message");
  auto probe_metrics_csv =
      OpenCsv(probe_metrics_path, "round,perplexity_agent0,perplexity_agent1,jaccard");
  result.files = {stats_path, games_path, probes_path, probe_metrics_path};

  auto save_both = [&](std::string_view tag, int round) {
    for (int a = 0; a < 2; ++a) {
      const std::string path = CheckpointPath(ckpt_dir, a, tag);
      agents::SaveAgent(path, arena.agent(a), CheckpointMetadata(config, a, round));
      result.files.emplace_back(path);
    }
  };

  const auto probe_scenes = arena.ProbeScenes();
  for (int round = 0; round < config.rounds; ++round) {
    std::vector<GameLogRow> games;
    RoundStats stats;
    try {
      stats = arena.PlayRound(round, &games);
    } catch (const diff::NonFiniteError&) {
      std::filesystem::create_directories(ckpt_dir);
      save_both("abort", round);
      throw;
    }
    result.stats.push_back(stats);
    stats_csv << fmt::format("{},{},{},{},{}\n", stats.round, stats.accuracy, stats.loss,
                             stats.avg_msg_len, stats.distinctness);
    for (const auto& g : games) {
      games_csv << fmt::format("{},{},{},{},{},{},{}\n", g.round, g.game, g.speaker, g.loss,
                               g.accuracy, g.distinctness, g.avg_msg_len);
    }

    const int completed = round + 1;
    if (completed % config.probe_interval == 0) {
      ProbeRecord probe = arena.Probe(completed, probe_scenes);
      eval::MessageLog log;
      for (int a = 0; a < 2; ++a) {
        for (std::size_t i = 0; i < probe.types.size(); ++i) {
          const std::string text = agents::MessageToString(probe.messages[a][i]);
          log.Add(a, scene::SpecName(probe.types[i]), text);
          probes_csv << fmt::format("{},{},{},{}\n", completed,
                                    eval::SpecColumns(probe.types[i]), a, text);
        }
      }
      probe_metrics_csv << fmt::format("{},{},{},{}\n", completed, eval::Perplexity(log, 0),
                                       eval::Perplexity(log, 1), eval::Jaccard(log, 0, log, 1));
      result.probes.push_back(std::move(probe));
    }
    if (options.write_checkpoints && completed % config.checkpoint_interval == 0) {
      save_both(fmt::format("round{:06d}", completed), completed);
    }
    if (options.on_round) options.on_round(stats);
  }
  if (options.write_checkpoints) save_both("final", config.rounds);
  return result;
}

}  // namespace obverter::arena
