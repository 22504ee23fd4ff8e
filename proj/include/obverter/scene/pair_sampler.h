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

#ifndef OBVERTER_SCENE_PAIR_SAMPLER_H_
#define OBVERTER_SCENE_PAIR_SAMPLER_H_

#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "obverter/diff/tensor.h"
#include "obverter/random.h"
#include "obverter/scene/object_spec.h"
#include "obverter/scene/render.h"

namespace obverter::scene {

enum class PairCategory { kSameType, kSameShape, kSameColor, kRandom };
inline constexpr int kNumPairCategories = 4;

std::string_view PairCategoryName(PairCategory c);

// Fractions of a batch per category, in PairCategory order.
struct CompositionRatios {
  std::array<double, kNumPairCategories> values = {0.25, 0.30, 0.20, 0.25};
};

// Same-type count is ceil(n * r), the two single-factor categories are
// rounded to nearest, and the random category takes the remainder.
std::array<int, kNumPairCategories> CategoryCounts(int n,
                                                   const CompositionRatios& ratios);

// Object types and labels of a batch, without pixels.
struct PairPlan {
  std::vector<ObjectSpec> speaker;
  std::vector<ObjectSpec> listener;
  std::vector<PairCategory> category;
  std::vector<float> labels;  // 1 iff speaker[i] == listener[i]

  int size() const { return static_cast<int>(labels.size()); }
};

struct PairBatch {
  PairPlan plan;
  std::vector<SceneSample> speaker_scenes;
  std::vector<SceneSample> listener_scenes;
  diff::Tensor speaker_images;   // [n x R x R x 3]
  diff::Tensor listener_images;  // [n x R x R x 3]
};

class PairSampler {
 public:
  // Throws std::invalid_argument when ratios are negative or do not sum to 1,
  // when fewer than two colors or two shapes survive the holdout, or when a
  // category with a nonzero ratio has no eligible pair.
  PairSampler(const TypeSpace& space, const HoldoutSet& holdout,
              const CompositionRatios& ratios = {});

  const std::vector<ObjectSpec>& types() const { return types_; }

  PairPlan SamplePlan(int n, Rng& rng) const;
  // Every image gets a fresh pose seed drawn from `rng`.
  PairBatch Sample(int n, Rng& rng, const SceneConfig& config) const;

 private:
  std::vector<ObjectSpec> types_;
  CompositionRatios ratios_;
  // Ordered (speaker, listener) index pairs into types_ for the three
  // constrained categories.
  std::array<std::vector<std::pair<int, int>>, 3> pairs_;
};

}  // namespace obverter::scene

#endif  // OBVERTER_SCENE_PAIR_SAMPLER_H_
