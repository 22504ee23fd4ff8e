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

#ifndef OBVERTER_CLI_MANIFEST_H_
#define OBVERTER_CLI_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace obverter::cli {

inline constexpr std::string_view kToolkitVersion = "0.1.0";
inline constexpr std::string_view kManifestName = "manifest.json";

// Lowercase hex SHA-256 of a file's bytes.
std::string Sha256File(const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;  // relative to the output directory, '/' separated
  std::uintmax_t bytes = 0;
  std::string sha256;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct RunManifest {
  std::string mode;
  std::string version{kToolkitVersion};
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::vector<ManifestEntry> files;  // sorted by path
  bool complete = false;
  std::string error;
};

// Every regular file under `dir` except the manifest itself, sorted.
std::vector<ManifestEntry> ScanOutputs(const std::filesystem::path& dir);

std::string ManifestToJson(const RunManifest& manifest);
RunManifest ManifestFromJson(std::string_view json);

void WriteManifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest ReadManifest(const std::filesystem::path& dir);

// Paths whose current checksum differs from the manifest, including
// missing files.
std::vector<std::string> VerifyManifest(const std::filesystem::path& dir,
                                        const RunManifest& manifest);

}  // namespace obverter::cli

#endif  // OBVERTER_CLI_MANIFEST_H_
