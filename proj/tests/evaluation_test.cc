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

#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "obverter/eval/evaluation.h"

namespace obverter::eval {
namespace {

using scene::Color;
using scene::ShapeKind;

agents::AgentConfig SmallAgent() {
  agents::AgentConfig c = agents::AgentConfig::Micro();
  c.embedding_size = 16;
  c.hidden_size = 8;
  c.decision_size = 8;
  return c;
}

EvalOptions SmallOptions(int trials) {
  EvalOptions o;
  o.trials_per_pair = trials;
  o.seed = 21;
  o.scene.resolution = 32;
  o.obverter.max_length = 4;
  return o;
}

std::vector<scene::ObjectSpec> Types() {
  scene::TypeSpace space;
  space.colors = {Color::kBlue, Color::kRed};
  space.shapes = {ShapeKind::kBox, ShapeKind::kSphere};
  return scene::EnumerateTypes(space);
}

class EvaluationTest : public ::testing::Test {
 protected:
  agents::Agent a0_{SmallAgent(), 1};
  agents::Agent a1_{SmallAgent(), 2};
};

TEST_F(EvaluationTest, MatrixShapeAndDeterminism) {
  const auto types = Types();
  const auto m = ComputeAccuracyMatrix(a0_, a1_, types, SmallOptions(4));
  ASSERT_EQ(m.cells.size(), 16u);
  for (const auto& c : m.cells) EXPECT_EQ(c.trials, 4);
  EXPECT_GE(m.Overall(), 0.0);
  EXPECT_LE(m.Overall(), 1.0);

  EvalOptions chunked = SmallOptions(4);
  chunked.chunk_size = 3;
  const auto again = ComputeAccuracyMatrix(a0_, a1_, types, chunked);
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    EXPECT_EQ(m.cells[i].correct, again.cells[i].correct) << i;
  }
}

TEST_F(EvaluationTest, PaperProtocolHasTenTrialsPerCell) {
  const std::vector<scene::ObjectSpec> types = {Types()[0], Types()[3]};
  const auto m = ComputeAccuracyMatrix(a0_, a1_, types, SmallOptions(10));
  for (const auto& c : m.cells) EXPECT_EQ(c.trials, 10);
}

TEST_F(EvaluationTest, ZeroShotCasesMatchMatrixCells) {
  const auto types = Types();
  const EvalOptions options = SmallOptions(2);
  const auto m = ComputeAccuracyMatrix(a0_, a1_, types, options);
  scene::HoldoutSet holdout;
  holdout.AddSpec(types[1].color, types[1].shape);
  const auto report = ZeroShotEval(a0_, a1_, types, holdout, options, 0);
  ASSERT_EQ(report.rows.size(), 3u);

  int row = 0, column = 0;
  for (int j = 0; j < 4; ++j) {
    row += m.at(1, j).correct;
    column += m.at(j, 1).correct;
  }
  EXPECT_EQ(report.rows[0].case_name, "speaker");
  EXPECT_EQ(report.rows[0].tally.correct, row);
  EXPECT_EQ(report.rows[0].tally.trials, 8);
  EXPECT_EQ(report.rows[1].tally.correct, column);
  EXPECT_EQ(report.rows[2].tally.correct, m.at(1, 1).correct);
  EXPECT_EQ(report.rows[2].tally.trials, 2);
}

TEST_F(EvaluationTest, MixedPartitionCountsSumToTestSize) {
  const auto types = Types();
  scene::HoldoutSet holdout;
  holdout.AddSpec(types[0].color, types[0].shape);
  const auto report = ZeroShotEval(a0_, a1_, types, holdout, SmallOptions(1), 30);
  int total = 0;
  for (const auto& p : report.partition) total += p.tally.trials;
  EXPECT_EQ(total, 30);

  const auto none = ZeroShotEval(a0_, a1_, types, scene::HoldoutSet{}, SmallOptions(1), 12);
  EXPECT_TRUE(none.rows.empty());
  EXPECT_EQ(none.partition[3].name, "neither");
  EXPECT_EQ(none.partition[3].tally.trials, 12);
}

TEST(VerifyHoldoutTest, RejectsMismatch) {
  const std::map<std::string, std::string> meta = {{"game.holdout", "blue_box"}};
  scene::HoldoutSet same;
  same.AddSpec(Color::kBlue, ShapeKind::kBox);
  EXPECT_NO_THROW(VerifyHoldout(meta, same));
  EXPECT_THROW(VerifyHoldout(meta, scene::HoldoutSet{}), std::invalid_argument);
  EXPECT_THROW(VerifyHoldout({}, same), std::invalid_argument);
}

TEST_F(EvaluationTest, ProbeLogCoversEveryTypeForBothAgents) {
  const auto types = Types();
  const auto log = ProbeMessages(a0_, a1_, types, 3, SmallOptions(1));
  for (int a = 0; a < 2; ++a) {
    ASSERT_EQ(log.Types(a).size(), 4u);
    for (const auto& t : log.Types(a)) {
      long n = 0;
      for (const auto& [m, c] : log.Get(a, t)) n += c;
      EXPECT_EQ(n, 3);
    }
  }
  std::ostringstream csv;
  const auto rows = MessageTable(log, 1);
  WriteMessageTableCsv(csv, rows);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "agent,color,shape,message,count,rank");
}

TEST_F(EvaluationTest, EmbeddingExport) {
  const auto types = Types();
  const agents::Agent* team[] = {&a0_, &a1_};
  const auto rows = ExportEmbeddings(team, types, 2, SmallOptions(1));
  ASSERT_EQ(rows.size(), 2u * 4u * 2u);
  for (const auto& r : rows) EXPECT_EQ(r.values.size(), 16u);
  std::ostringstream csv;
  WriteEmbeddingsCsv(csv, rows);
  std::istringstream in(csv.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header.substr(0, 22), "color,shape,agent,e_0,");
  EXPECT_EQ(std::count(first.begin(), first.end(), ','), 2 + 16);
  EXPECT_EQ(first.substr(0, 9), "blue,box,");
}

TEST(SpecColumnsTest, CountSuffix) {
  EXPECT_EQ(SpecColumns({Color::kRed, ShapeKind::kSphere, 1}), "red,sphere");
  EXPECT_EQ(SpecColumns({Color::kRed, ShapeKind::kSphere, 2}), "red,sphere_x2");
}

TEST_F(EvaluationTest, MatrixCsvLayout) {
  const std::vector<scene::ObjectSpec> types = {Types()[0]};
  std::ostringstream csv;
  WriteMatrixCsv(csv, ComputeAccuracyMatrix(a0_, a1_, types, SmallOptions(2)));
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "speaker_type,listener_type,accuracy,trials");
  EXPECT_NE(csv.str().find("blue_box,blue_box,"), std::string::npos);
}

}  // namespace
}  // namespace obverter::eval
