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

#ifndef OBVERTER_CLI_RUNNER_H_
#define OBVERTER_CLI_RUNNER_H_

#include <functional>
#include <stdexcept>
#include <string>

#include "obverter/cli/manifest.h"
#include "obverter/cli/run_config.h"

namespace obverter::cli {

// Thrown by Run when a pipeline fails; the partial manifest has already
// been written and is attached.
class RunFailure : public std::runtime_error {
 public:
  RunFailure(const std::string& what, RunManifest manifest)
      : std::runtime_error(what), manifest_(std::move(manifest)) {}
  const RunManifest& manifest() const { return manifest_; }

 private:
  RunManifest manifest_;
};

struct RunHooks {
  // Progress lines for the terminal; may be empty.
  std::function<void(const std::string&)> log;
};

// Finalizes `config`, executes its mode into config.out_dir and writes
// manifest.json listing every file in the directory with its checksum.
RunManifest Run(RunConfig config, const RunHooks& hooks = {});

}  // namespace obverter::cli

#endif  // OBVERTER_CLI_RUNNER_H_
