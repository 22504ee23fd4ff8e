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

#ifndef OBVERTER_SCENE_OBJECT_SPEC_H_
#define OBVERTER_SCENE_OBJECT_SPEC_H_

#include <array>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace obverter::scene {

enum class Color { kBlue, kRed, kWhite, kGray, kYellow, kGreen, kCyan, kMagenta };
enum class ShapeKind { kBox, kSphere, kCylinder, kCapsule, kEllipsoid };

inline constexpr int kNumColors = 8;
inline constexpr int kNumShapes = 5;

struct Rgb {
  float r, g, b;
};

std::string_view ColorName(Color c);
std::string_view ShapeName(ShapeKind s);
// Throw std::invalid_argument on unknown names.
Color ParseColor(std::string_view name);
ShapeKind ParseShape(std::string_view name);

Rgb PaletteColor(Color c);
inline constexpr Rgb kBackground{0.08f, 0.08f, 0.10f};

// Semantic identity of an object: what the agents must agree on.
struct ObjectSpec {
  Color color = Color::kBlue;
  ShapeKind shape = ShapeKind::kBox;
  int count = 1;

  friend auto operator<=>(const ObjectSpec&, const ObjectSpec&) = default;
};

// "blue_box", or "blue_box_x2" for two instances.
std::string SpecName(const ObjectSpec& spec);
ObjectSpec ParseSpec(std::string_view name);

// The colors, shapes and counts a run draws from. Defaults to the full
// 8 x 5 grid with single objects.
struct TypeSpace {
  std::vector<Color> colors;
  std::vector<ShapeKind> shapes;
  std::vector<int> counts = {1};

  static TypeSpace Full();
};

// Object types excluded from training. A listed (color, shape) pair matches
// every count.
class HoldoutSet {
 public:
  HoldoutSet() = default;

  // Blue box, red sphere, white cylinder, gray capsule, yellow ellipsoid.
  static HoldoutSet Diagonal();
  static HoldoutSet WithoutColor(Color c);
  static HoldoutSet WithoutShape(ShapeKind s);
  // Comma-separated tokens: none, diagonal, no-blue, no-box,
  // no-blue-no-box, color:<name>, shape:<name>, or <color>_<shape>.
  static HoldoutSet Parse(std::string_view text);

  void AddSpec(Color c, ShapeKind s);
  void AddColor(Color c);
  void AddShape(ShapeKind s);

  bool Contains(const ObjectSpec& spec) const;
  bool empty() const { return pairs_.empty() && colors_.empty() && shapes_.empty(); }

  // Canonical (sorted) text form accepted by Parse; "none" when empty.
  std::string ToString() const;

  friend bool operator==(const HoldoutSet& a, const HoldoutSet& b) {
    return a.ToString() == b.ToString();
  }

 private:
  std::vector<std::pair<Color, ShapeKind>> pairs_;
  std::vector<Color> colors_;
  std::vector<ShapeKind> shapes_;
};

// Eligible types in fixed order: colors outer, shapes inner, counts
// innermost.
std::vector<ObjectSpec> EnumerateTypes(const TypeSpace& space,
                                       const HoldoutSet& holdout = {});

}  // namespace obverter::scene

#endif  // OBVERTER_SCENE_OBJECT_SPEC_H_
