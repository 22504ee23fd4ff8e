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

#include "obverter/cli/manifest.h"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace obverter::cli {
namespace {

using Json = nlohmann::ordered_json;

struct DigestDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

}  // namespace

std::string Sha256File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, DigestDeleter> ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialization failed");
  }
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), in.gcount());
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::vector<ManifestEntry> ScanOutputs(const std::filesystem::path& dir) {
  std::vector<ManifestEntry> entries;
  if (!std::filesystem::exists(dir)) return entries;
  for (const auto& item : std::filesystem::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    const std::string rel = item.path().lexically_relative(dir).generic_string();
    if (rel == kManifestName) continue;
    entries.push_back({rel, item.file_size(), Sha256File(item.path())});
  }
  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  return entries;
}

std::string ManifestToJson(const RunManifest& manifest) {
  Json j;
  j["mode"] = manifest.mode;
  j["version"] = manifest.version;
  j["seed"] = manifest.seed;
  j["complete"] = manifest.complete;
  if (!manifest.error.empty()) j["error"] = manifest.error;
  j["config"] = Json::object();
  for (const auto& [k, v] : manifest.config) j["config"][k] = v;
  j["files"] = Json::array();
  for (const auto& f : manifest.files) {
    j["files"].push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  }
  return j.dump(2) + "\n";
}

RunManifest ManifestFromJson(std::string_view json) {
  const Json j = Json::parse(json);
  RunManifest m;
  m.mode = j.at("mode").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.complete = j.at("complete").get<bool>();
  if (j.contains("error")) m.error = j["error"].get<std::string>();
  for (const auto& [k, v] : j.at("config").items()) m.config[k] = v.get<std::string>();
  for (const auto& f : j.at("files")) {
    m.files.push_back({f.at("path").get<std::string>(), f.at("bytes").get<std::uintmax_t>(),
                       f.at("sha256").get<std::string>()});
  }
  return m;
}

void WriteManifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / kManifestName, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  out << ManifestToJson(manifest);
}

RunManifest ReadManifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / kManifestName, std::ios::binary);
  if (!in) throw std::runtime_error("no manifest in " + dir.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ManifestFromJson(text.str());
}

std::vector<std::string> VerifyManifest(const std::filesystem::path& dir,
                                        const RunManifest& manifest) {
  std::vector<std::string> mismatched;
  for (const auto& f : manifest.files) {
    const auto path = dir / f.path;
    if (!std::filesystem::is_regular_file(path) || Sha256File(path) != f.sha256) {
      mismatched.push_back(f.path);
    }
  }
  return mismatched;
}

}  // namespace obverter::cli
