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

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "obverter/eval/metrics.h"

namespace obverter::eval {
namespace {

std::vector<std::string> Batch(int size, int unique) {
  std::vector<std::string> out;
  for (int i = 0; i < size; ++i) out.push_back(std::to_string(i % unique));
  return out;
}

TEST(DistinctnessTest, FortyOfFifty) {
  const auto batch = Batch(50, 40);
  EXPECT_DOUBLE_EQ(Distinctness(std::span<const std::string>(batch)), 0.8);
}

TEST(DistinctnessTest, AllIdentical) {
  const auto batch = Batch(50, 1);
  EXPECT_DOUBLE_EQ(Distinctness(std::span<const std::string>(batch)), 0.02);
}

TEST(DistinctnessTest, SymbolSequences) {
  const std::vector<std::vector<int>> m = {{0, 1}, {0, 1}, {1}, {0, 1, 2}};
  EXPECT_DOUBLE_EQ(Distinctness(std::span<const std::vector<int>>(m)), 0.75);
  EXPECT_THROW(Distinctness(std::span<const std::vector<int>>()), std::invalid_argument);
}

TEST(AccuracyTest, ThresholdAtOneHalf) {
  const std::vector<float> scores = {0.5f, 0.49f, 0.9f, 0.1f};
  const std::vector<float> labels = {1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(Accuracy(scores, labels), 0.75);
  EXPECT_THROW(Accuracy(scores, std::vector<float>{1}), std::invalid_argument);
}

TEST(PerplexityTest, UniformOverKIsK) {
  for (int k : {1, 2, 4, 8}) {
    MessageLog log;
    for (int m = 0; m < k; ++m) log.Add(0, "blue_box", "m" + std::to_string(m), 5);
    EXPECT_DOUBLE_EQ(Perplexity(log, 0), k) << k;
  }
}

TEST(PerplexityTest, ThreeToOne) {
  MessageLog log;
  log.Add(0, "red_sphere", "0", 3);
  log.Add(0, "red_sphere", "1", 1);
  EXPECT_NEAR(Perplexity(log, 0), 1.7548, 1e-3);
}

TEST(PerplexityTest, AveragesOverTypes) {
  MessageLog log;
  log.Add(1, "a", "x");
  log.Add(1, "b", "x");
  log.Add(1, "b", "y");
  EXPECT_DOUBLE_EQ(Perplexity(log, 1), 1.5);
}

TEST(PerplexityTest, MissingTypeIsNamed) {
  MessageLog log;
  log.Add(0, "blue_box", "0");
  const std::vector<std::string> types = {"blue_box", "red_box"};
  try {
    Perplexity(log, 0, types);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("red_box"), std::string::npos);
  }
}

TEST(JaccardTest, Fixtures) {
  MessageLog a, b, c, d;
  a.Add(0, "t", "m1");
  a.Add(0, "t", "m2");
  b.Add(1, "t", "m1", 7);
  b.Add(1, "t", "m2");
  c.Add(0, "t", "m3");
  d.Add(0, "t", "m2");
  d.Add(0, "t", "m3");
  EXPECT_DOUBLE_EQ(Jaccard(a, 0, b, 1), 1.0);
  EXPECT_DOUBLE_EQ(Jaccard(a, 0, c, 0), 0.0);
  EXPECT_DOUBLE_EQ(Jaccard(a, 0, d, 0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(Jaccard(d, 0, a, 0), 1.0 / 3.0);
}

TEST(JaccardTest, RejectsDifferentTypes) {
  MessageLog a, b;
  a.Add(0, "t", "m");
  b.Add(0, "u", "m");
  EXPECT_THROW(Jaccard(a, 0, b, 0), std::invalid_argument);
}

TEST(MessageTableTest, RanksByCountThenText) {
  MessageLog log;
  log.Add(0, "t", "2", 4);
  log.Add(0, "t", "1", 4);
  log.Add(0, "t", "0", 1);
  log.Add(0, "t", "3", 9);
  const auto rows = MessageTable(log, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].message, "3");
  EXPECT_EQ(rows[1].message, "1");
  EXPECT_EQ(rows[2].message, "2");
  EXPECT_EQ(rows[2].rank, 3);
  EXPECT_EQ(rows[2].count, 4);
}

}  // namespace
}  // namespace obverter::eval
