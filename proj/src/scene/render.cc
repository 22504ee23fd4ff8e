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

#include "obverter/scene/render.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>

#include "obverter/random.h"

namespace obverter::scene {
namespace {

constexpr double kShadingStrength = 0.2;
constexpr int kPlacementAttempts = 256;

// Point-in-silhouette test in the object's local frame, where the shape
// spans roughly [-1, 1] on each axis.
bool Inside(ShapeKind shape, double u, double v) {
  switch (shape) {
    case ShapeKind::kBox:
      return std::abs(u) <= 1.0 && std::abs(v) <= 1.0;
    case ShapeKind::kSphere:
      return u * u + v * v <= 1.0;
    case ShapeKind::kCylinder: {
      // Upright body plus the elliptical top face.
      if (std::abs(u) <= 0.55 && v >= -0.6 && v <= 0.8) return true;
      const double eu = u / 0.55, ev = (v + 0.6) / 0.25;
      return eu * eu + ev * ev <= 1.0;
    }
    case ShapeKind::kCapsule: {
      // Stadium: points within 0.45 of the segment v in [-0.55, 0.55].
      const double cv = std::clamp(v, -0.55, 0.55);
      const double dv = v - cv;
      return u * u + dv * dv <= 0.45 * 0.45;
    }
    case ShapeKind::kEllipsoid: {
      const double ev = v / 0.55;
      return u * u + ev * ev <= 1.0;
    }
  }
  return false;
}

}  // namespace

double BoundingRadius(ShapeKind shape) {
  return shape == ShapeKind::kBox ? std::numbers::sqrt2 : 1.0;
}

SceneSample SampleScene(const ObjectSpec& spec, std::uint64_t seed,
                        const SceneConfig& config) {
  if (spec.count < 1 || spec.count > 2) {
    throw std::invalid_argument("object count must be 1 or 2");
  }
  Rng rng(SplitMix64(seed));
  SceneSample sample{spec, {}, seed};
  const double shrink = spec.count > 1 ? config.multi_instance_scale : 1.0;
  const double radius_factor = BoundingRadius(spec.shape);
  for (int i = 0; i < spec.count; ++i) {
    Placement p;
    p.scale = shrink * UniformReal(rng, config.min_scale, config.max_scale);
    p.orientation = UniformReal(rng, 0.0, std::numbers::pi);
    const double reach = 0.5 * p.scale * radius_factor;
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      p.center_x = UniformReal(rng, reach, 1.0 - reach);
      p.center_y = UniformReal(rng, reach, 1.0 - reach);
      placed = std::all_of(
          sample.instances.begin(), sample.instances.end(),
          [&](const Placement& q) {
            const double min_gap = reach + 0.5 * q.scale * radius_factor;
            return std::hypot(p.center_x - q.center_x,
                              p.center_y - q.center_y) > min_gap;
          });
    }
    if (!placed) {
      // Side by side. At the multi-instance scale each reach is below 0.25,
      // so these slots never overlap and stay in frame.
      sample.instances.front().center_x = 0.25;
      sample.instances.front().center_y = 0.5;
      p.center_x = 0.75;
      p.center_y = 0.5;
    }
    sample.instances.push_back(p);
  }
  return sample;
}

diff::Tensor Render(const SceneSample& sample, int resolution) {
  if (resolution < 32) {
    throw std::invalid_argument("resolution must be at least 32, got " +
                                std::to_string(resolution));
  }
  diff::Tensor image({resolution, resolution, 3}, 0.0f);
  for (int i = 0; i < resolution * resolution; ++i) {
    image[3 * i] = kBackground.r;
    image[3 * i + 1] = kBackground.g;
    image[3 * i + 2] = kBackground.b;
  }
  const Rgb base = PaletteColor(sample.spec.color);
  for (const Placement& p : sample.instances) {
    const double half = 0.5 * p.scale * resolution;  // pixels
    const double cx = p.center_x * resolution, cy = p.center_y * resolution;
    const double cos_t = std::cos(p.orientation), sin_t = std::sin(p.orientation);
    const double reach = half * BoundingRadius(sample.spec.shape);
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int x1 = std::min(resolution - 1, static_cast<int>(std::ceil(cx + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int y1 = std::min(resolution - 1, static_cast<int>(std::ceil(cy + reach)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = (x + 0.5 - cx) / half;
        const double dy = (y + 0.5 - cy) / half;
        // Rotate into the object frame.
        const double u = cos_t * dx + sin_t * dy;
        const double v = -sin_t * dx + cos_t * dy;
        if (!Inside(sample.spec.shape, u, v)) continue;
        // Lit from the top-left of the image.
        const double t = std::clamp(0.5 + (dx + dy) / 4.0, 0.0, 1.0);
        const float shade = static_cast<float>(1.0 - kShadingStrength * t);
        float* px = image.ptr() + 3 * (static_cast<std::size_t>(y) * resolution + x);
        px[0] = base.r * shade;
        px[1] = base.g * shade;
        px[2] = base.b * shade;
      }
    }
  }
  return image;
}

diff::Tensor RenderBatch(std::span<const SceneSample> samples, int resolution) {
  const std::size_t per = static_cast<std::size_t>(resolution) * resolution * 3;
  diff::Tensor batch({static_cast<int>(samples.size()), resolution, resolution, 3},
                     0.0f);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const diff::Tensor img = Render(samples[i], resolution);
    std::memcpy(batch.ptr() + i * per, img.ptr(), per * sizeof(float));
  }
  return batch;
}

std::vector<std::uint8_t> EncodePpm(const diff::Tensor& image) {
  if (image.rank() != 3 || image.dim(2) != 3) {
    throw diff::ShapeError("PPM needs an HxWx3 image, got " +
                           diff::ShapeToString(image.shape()));
  }
  const std::string header = "P6\n" + std::to_string(image.dim(1)) + " " +
                             std::to_string(image.dim(0)) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.size());
  for (float v : image.data()) {
    out.push_back(static_cast<std::uint8_t>(
        std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
  }
  return out;
}

}  // namespace obverter::scene
