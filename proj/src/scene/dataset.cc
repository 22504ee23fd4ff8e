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

#include "obverter/scene/dataset.h"

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "obverter/random.h"

namespace obverter::scene {

std::string FormatIndexLine(const IndexEntry& entry) {
  return fmt::format("{} {} {} {} {}", entry.path, ColorName(entry.spec.color),
                     ShapeName(entry.spec.shape), entry.spec.count, entry.seed);
}

IndexEntry ParseIndexLine(std::string_view line) {
  std::istringstream in{std::string(line)};
  IndexEntry e;
  std::string color, shape, extra;
  if (!(in >> e.path >> color >> shape >> e.spec.count >> e.seed) || (in >> extra)) {
    throw std::invalid_argument("malformed index line: '" + std::string(line) + "'");
  }
  e.spec.color = ParseColor(color);
  e.spec.shape = ParseShape(shape);
  return e;
}

std::vector<IndexEntry> ExportDataset(const std::filesystem::path& dir,
                                      const std::vector<ObjectSpec>& types,
                                      int per_type, std::uint64_t seed,
                                      const SceneConfig& config) {
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "index.txt", std::ios::binary);
  if (!index) throw std::runtime_error("cannot write " + (dir / "index.txt").string());
  index << "# resolution " << config.resolution << "\n";
  Rng rng = MakeRng(seed, {Tag(Stream::kDataset)});
  std::vector<IndexEntry> entries;
  for (const ObjectSpec& spec : types) {
    for (int k = 0; k < per_type; ++k) {
      IndexEntry e{fmt::format("{}_{:04d}.ppm", SpecName(spec), k), spec, rng()};
      const auto ppm = EncodePpm(RegenerateImage(e, config));
      std::ofstream out(dir / e.path, std::ios::binary);
      out.write(reinterpret_cast<const char*>(ppm.data()),
                static_cast<std::streamsize>(ppm.size()));
      if (!out) throw std::runtime_error("cannot write " + (dir / e.path).string());
      index << FormatIndexLine(e) << "\n";
      entries.push_back(std::move(e));
    }
  }
  return entries;
}

diff::Tensor RegenerateImage(const IndexEntry& entry, const SceneConfig& config) {
  return Render(SampleScene(entry.spec, entry.seed, config), config.resolution);
}

std::vector<IndexEntry> ReadIndex(const std::filesystem::path& dir,
                                  SceneConfig* config) {
  std::ifstream in(dir / "index.txt");
  if (!in) throw std::runtime_error("cannot read " + (dir / "index.txt").string());
  std::vector<IndexEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.starts_with("# resolution ")) {
      config->resolution = std::stoi(line.substr(13));
      continue;
    }
    if (line.starts_with("#")) continue;
    entries.push_back(ParseIndexLine(line));
  }
  return entries;
}

}  // namespace obverter::scene
