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

// On-disk image sets: one PPM per image plus `index.txt`. The index starts
// with a `# resolution R` line followed by `path color shape count seed`
// lines; any line can be turned back into the exact same pixels.

#ifndef OBVERTER_SCENE_DATASET_H_
#define OBVERTER_SCENE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "obverter/diff/tensor.h"
#include "obverter/scene/object_spec.h"
#include "obverter/scene/render.h"

namespace obverter::scene {

struct IndexEntry {
  std::string path;  // relative to the dataset directory
  ObjectSpec spec;
  std::uint64_t seed = 0;
};

std::string FormatIndexLine(const IndexEntry& entry);
// Throws std::invalid_argument on malformed lines.
IndexEntry ParseIndexLine(std::string_view line);

// Writes `per_type` images of every type and returns the index entries.
std::vector<IndexEntry> ExportDataset(const std::filesystem::path& dir,
                                      const std::vector<ObjectSpec>& types,
                                      int per_type, std::uint64_t seed,
                                      const SceneConfig& config);

diff::Tensor RegenerateImage(const IndexEntry& entry, const SceneConfig& config);

// Reads `dir/index.txt`; the resolution header overrides config.resolution.
std::vector<IndexEntry> ReadIndex(const std::filesystem::path& dir,
                                  SceneConfig* config);

}  // namespace obverter::scene

#endif  // OBVERTER_SCENE_DATASET_H_
