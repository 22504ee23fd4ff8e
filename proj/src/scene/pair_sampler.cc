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

#include "obverter/scene/pair_sampler.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace obverter::scene {

std::string_view PairCategoryName(PairCategory c) {
  switch (c) {
    case PairCategory::kSameType:
      return "same-type";
    case PairCategory::kSameShape:
      return "same-shape-diff-color";
    case PairCategory::kSameColor:
      return "same-color-diff-shape";
    case PairCategory::kRandom:
      return "random";
  }
  return "?";
}

std::array<int, kNumPairCategories> CategoryCounts(int n,
                                                   const CompositionRatios& ratios) {
  if (n <= 0) throw std::invalid_argument("batch size must be positive");
  const auto& r = ratios.values;
  std::array<int, kNumPairCategories> counts{};
  int left = n;
  auto take = [&left](long long want) {
    const int k = static_cast<int>(std::clamp<long long>(want, 0, left));
    left -= k;
    return k;
  };
  counts[0] = take(static_cast<long long>(std::ceil(n * r[0] - 1e-9)));
  counts[1] = take(std::llround(n * r[1]));
  counts[2] = take(std::llround(n * r[2]));
  counts[3] = left;
  return counts;
}

PairSampler::PairSampler(const TypeSpace& space, const HoldoutSet& holdout,
                         const CompositionRatios& ratios)
    : types_(EnumerateTypes(space, holdout)), ratios_(ratios) {
  double total = 0.0;
  for (double r : ratios.values) {
    if (r < 0.0) throw std::invalid_argument("composition ratios must be >= 0");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument("composition ratios sum to " +
                                std::to_string(total) + ", expected 1");
  }
  std::set<Color> colors;
  std::set<ShapeKind> shapes;
  for (const ObjectSpec& t : types_) {
    colors.insert(t.color);
    shapes.insert(t.shape);
  }
  if (colors.size() < 2 || shapes.size() < 2) {
    throw std::invalid_argument(
        "holdout leaves " + std::to_string(colors.size()) + " color(s) and " +
        std::to_string(shapes.size()) + " shape(s); at least 2 of each are needed");
  }
  const int m = static_cast<int>(types_.size());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const ObjectSpec& a = types_[i];
      const ObjectSpec& b = types_[j];
      if (a.count != b.count) continue;
      if (i == j) pairs_[0].emplace_back(i, j);
      if (a.shape == b.shape && a.color != b.color) pairs_[1].emplace_back(i, j);
      if (a.color == b.color && a.shape != b.shape) pairs_[2].emplace_back(i, j);
    }
  }
  for (int c = 0; c < 3; ++c) {
    if (ratios.values[c] > 0.0 && pairs_[c].empty()) {
      throw std::invalid_argument(
          "no eligible " + std::string(PairCategoryName(static_cast<PairCategory>(c))) +
          " pair survives holdout '" + holdout.ToString() + "'");
    }
  }
}

PairPlan PairSampler::SamplePlan(int n, Rng& rng) const {
  const auto counts = CategoryCounts(n, ratios_);
  std::vector<PairCategory> order;
  order.reserve(n);
  for (int c = 0; c < kNumPairCategories; ++c) {
    order.insert(order.end(), counts[c], static_cast<PairCategory>(c));
  }
  std::shuffle(order.begin(), order.end(), rng);

  const int m = static_cast<int>(types_.size());
  PairPlan plan;
  for (PairCategory c : order) {
    int a, b;
    if (c == PairCategory::kRandom) {
      a = UniformIndex(rng, m);
      b = UniformIndex(rng, m);
    } else {
      const auto& pool = pairs_[static_cast<int>(c)];
      std::tie(a, b) = pool[UniformIndex(rng, static_cast<int>(pool.size()))];
    }
    plan.speaker.push_back(types_[a]);
    plan.listener.push_back(types_[b]);
    plan.category.push_back(c);
    plan.labels.push_back(types_[a] == types_[b] ? 1.0f : 0.0f);
  }
  return plan;
}

PairBatch PairSampler::Sample(int n, Rng& rng, const SceneConfig& config) const {
  PairBatch batch;
  batch.plan = SamplePlan(n, rng);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t s = rng();
    const std::uint64_t l = rng();
    batch.speaker_scenes.push_back(SampleScene(batch.plan.speaker[i], s, config));
    batch.listener_scenes.push_back(SampleScene(batch.plan.listener[i], l, config));
  }
  batch.speaker_images = RenderBatch(batch.speaker_scenes, config.resolution);
  batch.listener_images = RenderBatch(batch.listener_scenes, config.resolution);
  return batch;
}

}  // namespace obverter::scene
