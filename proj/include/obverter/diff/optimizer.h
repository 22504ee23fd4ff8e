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

#ifndef OBVERTER_DIFF_OPTIMIZER_H_
#define OBVERTER_DIFF_OPTIMIZER_H_

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "obverter/diff/param_store.h"

namespace obverter::diff {

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OptimizerKind { kAdam, kSgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  float learning_rate = 1e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon = 1e-8f;
};

OptimizerKind ParseOptimizerKind(std::string_view name);
std::string_view OptimizerKindName(OptimizerKind kind);

// Applies one update per Step to the trainable entries of a store. Moment
// estimates are kept per parameter name.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {}) : config_(config) {}

  // `grads` must name exactly the trainable entries. A non-finite gradient
  // throws NonFiniteError naming the parameter before anything is modified.
  void Step(ParamStore& store, const std::map<std::string, Tensor>& grads);

  const OptimizerConfig& config() const { return config_; }
  long steps() const { return steps_; }

 private:
  struct Moments {
    Tensor first;
    Tensor second;
  };

  OptimizerConfig config_;
  long steps_ = 0;
  std::map<std::string, Moments, std::less<>> moments_;
};

}  // namespace obverter::diff

#endif  // OBVERTER_DIFF_OPTIMIZER_H_
