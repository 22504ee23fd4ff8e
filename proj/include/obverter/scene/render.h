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

// Deterministic 2D rasterizer for single-object scenes. Each shape is a flat
// silhouette in the palette color, shaded darker toward the bottom-right,
// over a fixed dark background. Coverage is binary (no anti-aliasing).

#ifndef OBVERTER_SCENE_RENDER_H_
#define OBVERTER_SCENE_RENDER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "obverter/diff/tensor.h"
#include "obverter/scene/object_spec.h"

namespace obverter::scene {

struct SceneConfig {
  int resolution = 128;
  // Object extent as a fraction of the image width.
  double min_scale = 0.25;
  double max_scale = 0.45;
  // Extent multiplier applied to each instance when count > 1.
  double multi_instance_scale = 0.6;
};

// One drawn instance, in normalized image coordinates (origin top-left,
// y pointing down).
struct Placement {
  double center_x = 0.5;
  double center_y = 0.5;
  double scale = 0.35;
  double orientation = 0.0;  // radians
};

struct SceneSample {
  ObjectSpec spec;
  std::vector<Placement> instances;  // spec.count entries
  std::uint64_t seed = 0;
};

// Radius of the circle enclosing a shape's silhouette, in units of half its
// extent. Used to keep every instance inside the frame at any rotation.
double BoundingRadius(ShapeKind shape);

// Pose drawn from `seed` alone: scale uniform in the configured range,
// orientation uniform in [0, pi), centers uniform subject to full
// containment and, for multiple instances, no overlap.
SceneSample SampleScene(const ObjectSpec& spec, std::uint64_t seed,
                        const SceneConfig& config);

// [resolution x resolution x 3] image with values in [0, 1].
// Throws std::invalid_argument for resolution < 32.
diff::Tensor Render(const SceneSample& sample, int resolution);

// Stacks renders into [N x resolution x resolution x 3].
diff::Tensor RenderBatch(std::span<const SceneSample> samples, int resolution);

// 8-bit binary PPM (P6) encoding of a rendered image.
std::vector<std::uint8_t> EncodePpm(const diff::Tensor& image);

}  // namespace obverter::scene

#endif  // OBVERTER_SCENE_RENDER_H_
