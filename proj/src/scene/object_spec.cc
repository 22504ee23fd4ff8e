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

#include "obverter/scene/object_spec.h"

#include <algorithm>
#include <stdexcept>

namespace obverter::scene {
namespace {

constexpr std::array<std::string_view, kNumColors> kColorNames = {
    "blue", "red", "white", "gray", "yellow", "green", "cyan", "magenta"};
constexpr std::array<std::string_view, kNumShapes> kShapeNames = {
    "box", "sphere", "cylinder", "capsule", "ellipsoid"};

constexpr std::array<Rgb, kNumColors> kPalette = {{
    {0.10f, 0.20f, 0.90f},
    {0.90f, 0.10f, 0.10f},
    {0.95f, 0.95f, 0.95f},
    {0.50f, 0.50f, 0.50f},
    {0.92f, 0.88f, 0.10f},
    {0.10f, 0.75f, 0.20f},
    {0.10f, 0.85f, 0.85f},
    {0.85f, 0.15f, 0.80f},
}};

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
void AddUnique(std::vector<T>& v, T x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace

std::string_view ColorName(Color c) { return kColorNames[static_cast<int>(c)]; }
std::string_view ShapeName(ShapeKind s) { return kShapeNames[static_cast<int>(s)]; }

Color ParseColor(std::string_view name) {
  for (int i = 0; i < kNumColors; ++i) {
    if (kColorNames[i] == name) return static_cast<Color>(i);
  }
  throw std::invalid_argument("unknown color '" + std::string(name) + "'");
}

ShapeKind ParseShape(std::string_view name) {
  for (int i = 0; i < kNumShapes; ++i) {
    if (kShapeNames[i] == name) return static_cast<ShapeKind>(i);
  }
  throw std::invalid_argument("unknown shape '" + std::string(name) + "'");
}

Rgb PaletteColor(Color c) { return kPalette[static_cast<int>(c)]; }

std::string SpecName(const ObjectSpec& spec) {
  std::string out = std::string(ColorName(spec.color)) + "_" +
                    std::string(ShapeName(spec.shape));
  if (spec.count != 1) out += "_x" + std::to_string(spec.count);
  return out;
}

ObjectSpec ParseSpec(std::string_view name) {
  const auto sep = name.find('_');
  if (sep == std::string_view::npos) {
    throw std::invalid_argument("object type '" + std::string(name) +
                                "' is not <color>_<shape>");
  }
  ObjectSpec spec;
  spec.color = ParseColor(name.substr(0, sep));
  std::string_view rest = name.substr(sep + 1);
  const auto count_sep = rest.find("_x");
  if (count_sep != std::string_view::npos) {
    spec.count = std::stoi(std::string(rest.substr(count_sep + 2)));
    rest = rest.substr(0, count_sep);
  }
  spec.shape = ParseShape(rest);
  return spec;
}

TypeSpace TypeSpace::Full() {
  TypeSpace space;
  for (int c = 0; c < kNumColors; ++c) space.colors.push_back(static_cast<Color>(c));
  for (int s = 0; s < kNumShapes; ++s) space.shapes.push_back(static_cast<ShapeKind>(s));
  return space;
}

HoldoutSet HoldoutSet::Diagonal() {
  HoldoutSet h;
  for (int i = 0; i < kNumShapes; ++i) {
    h.AddSpec(static_cast<Color>(i), static_cast<ShapeKind>(i));
  }
  return h;
}

HoldoutSet HoldoutSet::WithoutColor(Color c) {
  HoldoutSet h;
  h.AddColor(c);
  return h;
}

HoldoutSet HoldoutSet::WithoutShape(ShapeKind s) {
  HoldoutSet h;
  h.AddShape(s);
  return h;
}

HoldoutSet HoldoutSet::Parse(std::string_view text) {
  HoldoutSet h;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view token = Trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{}
                                           : text.substr(comma + 1);
    if (token.empty() || token == "none") continue;
    if (token == "diagonal") {
      for (const auto& p : Diagonal().pairs_) h.AddSpec(p.first, p.second);
    } else if (token == "no-blue") {
      h.AddColor(Color::kBlue);
    } else if (token == "no-box") {
      h.AddShape(ShapeKind::kBox);
    } else if (token == "no-blue-no-box") {
      h.AddColor(Color::kBlue);
      h.AddShape(ShapeKind::kBox);
    } else if (token.starts_with("color:")) {
      h.AddColor(ParseColor(token.substr(6)));
    } else if (token.starts_with("shape:")) {
      h.AddShape(ParseShape(token.substr(6)));
    } else {
      const ObjectSpec spec = ParseSpec(token);
      h.AddSpec(spec.color, spec.shape);
    }
  }
  return h;
}

void HoldoutSet::AddSpec(Color c, ShapeKind s) { AddUnique(pairs_, {c, s}); }
void HoldoutSet::AddColor(Color c) { AddUnique(colors_, c); }
void HoldoutSet::AddShape(ShapeKind s) { AddUnique(shapes_, s); }

bool HoldoutSet::Contains(const ObjectSpec& spec) const {
  if (std::find(colors_.begin(), colors_.end(), spec.color) != colors_.end()) {
    return true;
  }
  if (std::find(shapes_.begin(), shapes_.end(), spec.shape) != shapes_.end()) {
    return true;
  }
  return std::find(pairs_.begin(), pairs_.end(),
                   std::pair{spec.color, spec.shape}) != pairs_.end();
}

std::string HoldoutSet::ToString() const {
  if (empty()) return "none";
  std::vector<std::string> tokens;
  for (Color c : colors_) tokens.push_back("color:" + std::string(ColorName(c)));
  for (ShapeKind s : shapes_) tokens.push_back("shape:" + std::string(ShapeName(s)));
  for (const auto& [c, s] : pairs_) tokens.push_back(SpecName({c, s, 1}));
  std::sort(tokens.begin(), tokens.end());
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ",";
    out += tokens[i];
  }
  return out;
}

std::vector<ObjectSpec> EnumerateTypes(const TypeSpace& space,
                                       const HoldoutSet& holdout) {
  std::vector<ObjectSpec> out;
  for (Color c : space.colors) {
    for (ShapeKind s : space.shapes) {
      for (int n : space.counts) {
        ObjectSpec spec{c, s, n};
        if (!holdout.Contains(spec)) out.push_back(spec);
      }
    }
  }
  return out;
}

}  // namespace obverter::scene
