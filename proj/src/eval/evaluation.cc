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

#include "obverter/eval/evaluation.h"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "obverter/agents/model.h"
#include "obverter/random.h"
#include "obverter/scene/pair_sampler.h"

namespace obverter::eval {
namespace {

struct Trial {
  int speaker_agent = 0;
  scene::ObjectSpec speaker_type;
  scene::ObjectSpec listener_type;
  std::uint64_t speaker_seed = 0;
  std::uint64_t listener_seed = 0;
};

std::uint64_t U(int v) { return static_cast<std::uint64_t>(v); }

Trial CellTrial(const scene::ObjectSpec& s, const scene::ObjectSpec& l, int t,
                const EvalOptions& options) {
  const std::uint64_t key =
      DeriveSeed(options.seed, {Tag(Stream::kEval), 1, U(static_cast<int>(s.color)),
                                U(static_cast<int>(s.shape)), U(s.count),
                                U(static_cast<int>(l.color)), U(static_cast<int>(l.shape)),
                                U(l.count), U(t)});
  Trial trial;
  trial.speaker_agent = t < (options.trials_per_pair + 1) / 2 ? 0 : 1;
  trial.speaker_type = s;
  trial.listener_type = l;
  trial.speaker_seed = SplitMix64(key);
  trial.listener_seed = SplitMix64(key + 1);
  return trial;
}

// Whether the listener decided correctly, per trial.
std::vector<bool> RunTrials(const agents::Agent& agent0, const agents::Agent& agent1,
                            std::span<const Trial> trials, const EvalOptions& options) {
  const agents::Agent* team[2] = {&agent0, &agent1};
  const int res = options.scene.resolution;
  std::vector<bool> correct(trials.size());
  for (int speaker = 0; speaker < 2; ++speaker) {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      if (trials[i].speaker_agent == speaker) ids.push_back(i);
    }
    for (std::size_t begin = 0; begin < ids.size(); begin += options.chunk_size) {
      const std::size_t end = std::min(ids.size(), begin + options.chunk_size);
      std::vector<scene::SceneSample> seen, shown;
      for (std::size_t k = begin; k < end; ++k) {
        const Trial& t = trials[ids[k]];
        seen.push_back(scene::SampleScene(t.speaker_type, t.speaker_seed, options.scene));
        shown.push_back(scene::SampleScene(t.listener_type, t.listener_seed, options.scene));
      }
      const auto utterances = agents::GenerateObverter(
          *team[speaker], scene::RenderBatch(seen, res), options.obverter);
      std::vector<agents::Message> messages;
      for (const auto& u : utterances) messages.push_back(u.message);
      const auto scores =
          agents::ConsumeScores(*team[1 - speaker], scene::RenderBatch(shown, res), messages);
      for (std::size_t k = begin; k < end; ++k) {
        const Trial& t = trials[ids[k]];
        const bool said_same = scores[k - begin] >= 0.5f;
        correct[ids[k]] = said_same == (t.speaker_type == t.listener_type);
      }
    }
  }
  return correct;
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

double AccuracyMatrix::Overall() const {
  TrialTally total;
  for (const auto& c : cells) {
    total.correct += c.correct;
    total.trials += c.trials;
  }
  return total.accuracy();
}

AccuracyMatrix ComputeAccuracyMatrix(const agents::Agent& agent0, const agents::Agent& agent1,
                                     std::span<const scene::ObjectSpec> types,
                                     const EvalOptions& options) {
  Require(!types.empty(), "accuracy matrix over no object types");
  Require(options.trials_per_pair > 0, "trials_per_pair must be positive");
  std::vector<Trial> trials;
  for (const auto& s : types) {
    for (const auto& l : types) {
      for (int t = 0; t < options.trials_per_pair; ++t) {
        trials.push_back(CellTrial(s, l, t, options));
      }
    }
  }
  const auto correct = RunTrials(agent0, agent1, trials, options);
  AccuracyMatrix matrix;
  matrix.types.assign(types.begin(), types.end());
  matrix.cells.resize(types.size() * types.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    TrialTally& cell = matrix.cells[i / options.trials_per_pair];
    cell.correct += correct[i];
    ++cell.trials;
  }
  return matrix;
}

ZeroShotReport ZeroShotEval(const agents::Agent& agent0, const agents::Agent& agent1,
                            std::span<const scene::ObjectSpec> types,
                            const scene::HoldoutSet& holdout, const EvalOptions& options,
                            int mixed_trials) {
  Require(!types.empty(), "zero-shot evaluation over no object types");
  Require(mixed_trials >= 0, "mixed_trials must not be negative");
  std::vector<scene::ObjectSpec> held;
  for (const auto& t : types) {
    if (holdout.Contains(t)) held.push_back(t);
  }

  // Per held-out type: the speaker, listener and both cases, in that order.
  std::vector<Trial> trials;
  std::vector<std::size_t> row_of;
  ZeroShotReport report;
  for (const auto& h : held) {
    const std::size_t base = report.rows.size();
    for (const char* name : {"speaker", "listener", "both"}) report.rows.push_back({h, name, {}});
    for (const auto& other : types) {
      for (int t = 0; t < options.trials_per_pair; ++t) {
        trials.push_back(CellTrial(h, other, t, options));
        row_of.push_back(base);
        trials.push_back(CellTrial(other, h, t, options));
        row_of.push_back(base + 1);
      }
    }
    for (int t = 0; t < options.trials_per_pair; ++t) {
      trials.push_back(CellTrial(h, h, t, options));
      row_of.push_back(base + 2);
    }
  }

  // The mixed set, sampled with the training composition over every type.
  scene::TypeSpace space;
  space.counts.clear();
  for (const auto& t : types) {
    if (std::find(space.colors.begin(), space.colors.end(), t.color) == space.colors.end()) {
      space.colors.push_back(t.color);
    }
    if (std::find(space.shapes.begin(), space.shapes.end(), t.shape) == space.shapes.end()) {
      space.shapes.push_back(t.shape);
    }
    if (std::find(space.counts.begin(), space.counts.end(), t.count) == space.counts.end()) {
      space.counts.push_back(t.count);
    }
  }
  const std::size_t mixed_begin = trials.size();
  if (mixed_trials > 0) {
    scene::PairSampler sampler(space, scene::HoldoutSet{});
    Rng rng = MakeRng(options.seed, {Tag(Stream::kEval), 2});
    const auto plan = sampler.SamplePlan(mixed_trials, rng);
    for (int k = 0; k < mixed_trials; ++k) {
      Trial trial;
      trial.speaker_agent = k < (mixed_trials + 1) / 2 ? 0 : 1;
      trial.speaker_type = plan.speaker[k];
      trial.listener_type = plan.listener[k];
      trial.speaker_seed = rng();
      trial.listener_seed = rng();
      trials.push_back(trial);
    }
  }

  const auto correct = RunTrials(agent0, agent1, trials, options);
  for (std::size_t i = 0; i < mixed_begin; ++i) {
    TrialTally& tally = report.rows[row_of[i]].tally;
    tally.correct += correct[i];
    ++tally.trials;
  }
  report.partition = {{"both_heldout", {}}, {"speaker_only", {}}, {"listener_only", {}},
                      {"neither", {}}};
  for (std::size_t i = mixed_begin; i < trials.size(); ++i) {
    const bool s = holdout.Contains(trials[i].speaker_type);
    const bool l = holdout.Contains(trials[i].listener_type);
    const int slot = s && l ? 0 : s ? 1 : l ? 2 : 3;
    report.partition[slot].tally.correct += correct[i];
    ++report.partition[slot].tally.trials;
  }
  return report;
}

void VerifyHoldout(const std::map<std::string, std::string>& metadata,
                   const scene::HoldoutSet& holdout) {
  const auto it = metadata.find("game.holdout");
  if (it == metadata.end()) {
    throw std::invalid_argument("checkpoint does not record its holdout set");
  }
  if (!(scene::HoldoutSet::Parse(it->second) == holdout)) {
    throw std::invalid_argument("checkpoint was trained with holdout '" + it->second +
                                "' but evaluation asked for '" + holdout.ToString() + "'");
  }
}

MessageLog ProbeMessages(const agents::Agent& agent0, const agents::Agent& agent1,
                         std::span<const scene::ObjectSpec> types, int n_per_type,
                         const EvalOptions& options) {
  Require(n_per_type > 0, "n_per_type must be positive");
  Rng rng = MakeRng(options.seed, {Tag(Stream::kEval), 3});
  std::vector<scene::SceneSample> scenes;
  for (const auto& t : types) {
    for (int i = 0; i < n_per_type; ++i) {
      scenes.push_back(scene::SampleScene(t, rng(), options.scene));
    }
  }
  MessageLog log;
  const agents::Agent* team[2] = {&agent0, &agent1};
  for (std::size_t begin = 0; begin < scenes.size(); begin += options.chunk_size) {
    const std::size_t end = std::min(scenes.size(), begin + options.chunk_size);
    const std::span<const scene::SceneSample> chunk(scenes.data() + begin, end - begin);
    const auto images = scene::RenderBatch(chunk, options.scene.resolution);
    for (int a = 0; a < 2; ++a) {
      const auto utterances = agents::GenerateObverter(*team[a], images, options.obverter);
      for (std::size_t k = 0; k < utterances.size(); ++k) {
        log.Add(a, scene::SpecName(chunk[k].spec), agents::MessageToString(utterances[k].message));
      }
    }
  }
  return log;
}

std::vector<EmbeddingRow> ExportEmbeddings(std::span<const agents::Agent* const> agents,
                                           std::span<const scene::ObjectSpec> types,
                                           int n_per_type, const EvalOptions& options) {
  Require(n_per_type > 0, "n_per_type must be positive");
  Rng rng = MakeRng(options.seed, {Tag(Stream::kEmbedding)});
  std::vector<scene::SceneSample> scenes;
  for (const auto& t : types) {
    for (int i = 0; i < n_per_type; ++i) {
      scenes.push_back(scene::SampleScene(t, rng(), options.scene));
    }
  }
  std::vector<EmbeddingRow> rows;
  for (std::size_t a = 0; a < agents.size(); ++a) {
    for (std::size_t begin = 0; begin < scenes.size(); begin += options.chunk_size) {
      const std::size_t end = std::min(scenes.size(), begin + options.chunk_size);
      const std::span<const scene::SceneSample> chunk(scenes.data() + begin, end - begin);
      const auto z =
          agents::EmbedImages(*agents[a], scene::RenderBatch(chunk, options.scene.resolution));
      const int width = z.dim(1);
      for (std::size_t k = 0; k < chunk.size(); ++k) {
        const float* row = z.ptr() + k * width;
        rows.push_back({chunk[k].spec, static_cast<int>(a), std::vector<float>(row, row + width)});
      }
    }
  }
  return rows;
}

std::string SpecColumns(const scene::ObjectSpec& spec) {
  std::string shape(scene::ShapeName(spec.shape));
  if (spec.count > 1) shape += fmt::format("_x{}", spec.count);
  return fmt::format("{},{}", scene::ColorName(spec.color), shape);
}

void WriteMatrixCsv(std::ostream& out, const AccuracyMatrix& matrix) {
  out << "speaker_type,listener_type,accuracy,trials\n";
  for (std::size_t i = 0; i < matrix.types.size(); ++i) {
    for (std::size_t j = 0; j < matrix.types.size(); ++j) {
      const auto& c = matrix.at(static_cast<int>(i), static_cast<int>(j));
      out << fmt::format("{},{},{},{}\n", scene::SpecName(matrix.types[i]),
                         scene::SpecName(matrix.types[j]), c.accuracy(), c.trials);
    }
  }
}

void WriteZeroShotCsv(std::ostream& out, const ZeroShotReport& report) {
  out << "type,case,accuracy,samples\n";
  for (const auto& r : report.rows) {
    out << fmt::format("{},{},{},{}\n", scene::SpecName(r.type), r.case_name,
                       r.tally.accuracy(), r.tally.trials);
  }
  for (const auto& p : report.partition) {
    out << fmt::format("mixed,{},{},{}\n", p.name, p.tally.accuracy(), p.tally.trials);
  }
}

void WriteMessageTableCsv(std::ostream& out, std::span<const MessageTableRow> rows) {
  out << "agent,color,shape,message,count,rank\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{}\n", r.agent, SpecColumns(scene::ParseSpec(r.type)),
                       r.message, r.count, r.rank);
  }
}

void WriteEmbeddingsCsv(std::ostream& out, std::span<const EmbeddingRow> rows) {
  const std::size_t width = rows.empty() ? 0 : rows.front().values.size();
  out << "color,shape,agent";
  for (std::size_t i = 0; i < width; ++i) out << ",e_" << i;
  out << '\n';
  for (const auto& r : rows) {
    out << SpecColumns(r.type) << ',' << r.agent;
    for (float v : r.values) out << ',' << fmt::format("{}", v);
    out << '\n';
  }
}

}  // namespace obverter::eval
