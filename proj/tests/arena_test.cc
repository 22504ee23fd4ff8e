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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "obverter/arena/arena.h"
#include "obverter/eval/metrics.h"
#include "obverter/random.h"

namespace obverter::arena {
namespace {

namespace fs = std::filesystem;

GameConfig Tiny() {
  GameConfig c = GameConfig::Micro();
  c.rounds = 6;
  c.games_per_round = 2;
  c.batch_size = 6;
  c.max_len = 4;
  c.probe_interval = 3;
  c.probe_size = 8;
  c.checkpoint_interval = 4;
  c.seed = 11;
  return c;
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("obverter_arena_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int CountLines(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

TEST(GameConfigTest, MicroIsValidAndRoundTripsThroughFields) {
  const GameConfig c = GameConfig::Micro();
  EXPECT_NO_THROW(c.Validate());
  GameConfig back;
  for (const auto& [k, v] : c.ToFields()) back.Set(k, v);
  EXPECT_EQ(back.ToFields(), c.ToFields());
  EXPECT_EQ(back.agent, c.agent);
}

TEST(GameConfigTest, RejectsUnknownKeysAndBadValues) {
  GameConfig c;
  EXPECT_THROW(c.Set("round", "3"), std::invalid_argument);
  EXPECT_THROW(c.Set("rounds", "3x"), std::invalid_argument);
  EXPECT_THROW(c.Set("ratios", "0.5,0.5"), std::invalid_argument);
  c.Set("ratios", "0.5,0.5,0,0");
  EXPECT_NO_THROW(c.Validate());
  c.Set("ratios", "0.5,0.6,0,0");
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(ArenaTest, ConstantZeroListenerScoresThreeQuarters) {
  const GameConfig c;
  scene::PairSampler sampler(c.space, c.holdout, c.ratios);
  Rng rng = MakeRng(5, {Tag(Stream::kGameBatch)});
  double correct = 0.0;
  int total = 0;
  for (int b = 0; b < 400; ++b) {
    const auto plan = sampler.SamplePlan(100, rng);
    const std::vector<float> zeros(plan.labels.size(), 0.0f);
    correct += eval::Accuracy(zeros, plan.labels) * plan.size();
    total += plan.size();
  }
  EXPECT_NEAR(correct / total, 0.75, 0.02);
}

TEST(ArenaTest, GameUpdatesOnlyTheLearner) {
  const GameConfig c = Tiny();
  scene::PairSampler sampler(c.space, c.holdout, c.ratios);
  Rng rng = MakeRng(3, {Tag(Stream::kGameBatch)});
  const auto batch = sampler.Sample(c.batch_size, rng, c.Scene());
  agents::Agent teacher(c.agent, 1), learner(c.agent, 2);
  const diff::ParamStore teacher_before = teacher.params();
  const diff::ParamStore learner_before = learner.params();
  diff::Optimizer opt(c.optimizer);

  const GameResult r = PlayGame(teacher, learner, opt, batch, c.Obverter());
  EXPECT_TRUE(diff::BitIdentical(teacher.params(), teacher_before));
  EXPECT_FALSE(diff::BitIdentical(learner.params(), learner_before));
  EXPECT_EQ(r.utterances.size(), static_cast<std::size_t>(c.batch_size));
  EXPECT_EQ(r.scores.size(), static_cast<std::size_t>(c.batch_size));
  EXPECT_GE(r.accuracy, 0.0);
  EXPECT_LE(r.accuracy, 1.0);
  EXPECT_GT(r.distinctness, 0.0);
  EXPECT_LE(r.distinctness, 1.0);
  EXPECT_GE(r.avg_msg_len, 1.0);
  EXPECT_LE(r.avg_msg_len, c.max_len);
}

TEST(ArenaTest, RepeatedGamesOnOneBatchReduceLoss) {
  GameConfig c = GameConfig::Micro();
  c.optimizer.learning_rate = 1e-3f;
  scene::PairSampler sampler(c.space, c.holdout, c.ratios);
  Rng rng = MakeRng(8, {Tag(Stream::kGameBatch)});
  const auto batch = sampler.Sample(c.batch_size, rng, c.Scene());
  agents::Agent teacher(c.agent, 1), learner(c.agent, 2);
  diff::Optimizer opt(c.optimizer);
  const float first = PlayGame(teacher, learner, opt, batch, c.Obverter()).loss;
  float last = first;
  for (int i = 0; i < 200; ++i) last = PlayGame(teacher, learner, opt, batch, c.Obverter()).loss;
  EXPECT_LT(last, 0.5f * first);
}

TEST(ArenaTest, RolesAlternateBetweenRounds) {
  Arena arena(Tiny());
  const diff::ParamStore a0 = arena.agent(0).params();
  const diff::ParamStore a1 = arena.agent(1).params();
  arena.PlayRound(0);
  // Agent 0 spoke, so only agent 1 learned.
  EXPECT_TRUE(diff::BitIdentical(arena.agent(0).params(), a0));
  EXPECT_FALSE(diff::BitIdentical(arena.agent(1).params(), a1));
  const diff::ParamStore b1 = arena.agent(1).params();
  arena.PlayRound(1);
  EXPECT_FALSE(diff::BitIdentical(arena.agent(0).params(), a0));
  EXPECT_TRUE(diff::BitIdentical(arena.agent(1).params(), b1));
}

TEST(ArenaTest, RoundStatsAverageTheGames) {
  Arena arena(Tiny());
  std::vector<GameLogRow> games;
  const RoundStats s = arena.PlayRound(0, &games);
  ASSERT_EQ(games.size(), 2u);
  EXPECT_NEAR(s.loss, (double{games[0].loss} + double{games[1].loss}) / 2.0, 1e-12);
  EXPECT_NEAR(s.distinctness, (games[0].distinctness + games[1].distinctness) / 2.0, 1e-12);
  EXPECT_EQ(games[1].speaker, 0);
}

TEST(TrainTest, WritesLogsProbesAndCheckpoints) {
  const fs::path dir = FreshDir("artifacts");
  GameConfig c = Tiny();
  c.rounds = 9;
  const TrainResult r = Train(c, dir);
  ASSERT_EQ(r.stats.size(), 9u);
  ASSERT_EQ(r.probes.size(), 3u);
  EXPECT_EQ(r.probes[0].round, 3);
  EXPECT_EQ(r.probes[2].round, 9);

  EXPECT_EQ(CountLines(dir / "round_stats.csv"), 10);
  EXPECT_EQ(CountLines(dir / "game_log.csv"), 1 + 9 * 2);
  EXPECT_EQ(CountLines(dir / "probes.csv"), 1 + 3 * 2 * c.probe_size);
  EXPECT_EQ(CountLines(dir / "probe_metrics.csv"), 4);
  const std::string stats = Slurp(dir / "round_stats.csv");
  EXPECT_EQ(stats.substr(0, stats.find('\n')), "round,accuracy,loss,avg_msg_len,distinctness");
  const std::string probes = Slurp(dir / "probes.csv");
  EXPECT_EQ(probes.substr(0, probes.find('\n')), "round,color,shape,agent,message");

  for (const char* name : {"agent0_round000004.ckpt", "agent1_round000008.ckpt",
                           "agent0_final.ckpt", "agent1_final.ckpt"}) {
    EXPECT_TRUE(fs::exists(dir / "checkpoints" / name)) << name;
  }
  const auto ckpt = agents::LoadAgent((dir / "checkpoints" / "agent1_final.ckpt").string());
  EXPECT_EQ(ckpt.metadata.at("agent_id"), "1");
  EXPECT_EQ(ckpt.metadata.at("round"), "9");
  EXPECT_EQ(GameConfigFromMetadata(ckpt.metadata).ToFields(), c.ToFields());
  fs::remove_all(dir);
}

TEST(TrainTest, SameSeedGivesIdenticalArtifacts) {
  const fs::path a = FreshDir("det_a"), b = FreshDir("det_b");
  Train(Tiny(), a);
  Train(Tiny(), b);
  for (const char* f : {"round_stats.csv", "game_log.csv", "probes.csv", "probe_metrics.csv",
                        "checkpoints/agent0_final.ckpt", "checkpoints/agent1_final.ckpt"}) {
    EXPECT_EQ(Slurp(a / f), Slurp(b / f)) << f;
  }
  GameConfig other = Tiny();
  other.seed = 12;
  const fs::path o = FreshDir("det_other");
  Train(other, o);
  EXPECT_NE(Slurp(a / "round_stats.csv"), Slurp(o / "round_stats.csv"));
  for (const auto& d : {a, b, o}) fs::remove_all(d);
}

TEST(TrainTest, DivergenceSavesAbortCheckpoints) {
  const fs::path dir = FreshDir("abort");
  GameConfig c = Tiny();
  c.optimizer.kind = diff::OptimizerKind::kSgd;
  c.optimizer.learning_rate = 1e30f;
  c.rounds = 50;
  EXPECT_THROW(Train(c, dir), diff::NonFiniteError);
  EXPECT_TRUE(fs::exists(dir / "checkpoints" / "agent0_abort.ckpt"));
  EXPECT_TRUE(fs::exists(dir / "checkpoints" / "agent1_abort.ckpt"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace obverter::arena
