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

#include "obverter/diff/optimizer.h"

#include <cmath>

namespace obverter::diff {

OptimizerKind ParseOptimizerKind(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) +
                              "' (expected adam or sgd)");
}

std::string_view OptimizerKindName(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

void Optimizer::Step(ParamStore& store,
                     const std::map<std::string, Tensor>& grads) {
  const std::vector<std::string> trainable = store.TrainableNames();
  if (grads.size() != trainable.size()) {
    throw std::invalid_argument(
        "gradient set covers " + std::to_string(grads.size()) +
        " entries but the store has " + std::to_string(trainable.size()) +
        " trainable parameters");
  }
  for (const std::string& name : trainable) {
    auto it = grads.find(name);
    if (it == grads.end()) {
      throw std::invalid_argument("missing gradient for " + name);
    }
    if (it->second.shape() != store.Get(name).shape()) {
      throw ShapeError("gradient for " + name + " has shape " +
                       ShapeToString(it->second.shape()));
    }
    if (!it->second.AllFinite()) {
      throw NonFiniteError("non-finite gradient for parameter " + name);
    }
  }

  ++steps_;
  const float lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::kSgd) {
    for (const std::string& name : trainable) {
      Tensor& p = store.Get(name);
      const Tensor& g = grads.at(name);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
    }
    return;
  }

  const double correction1 = 1.0 - std::pow(double{config_.beta1}, steps_);
  const double correction2 = 1.0 - std::pow(double{config_.beta2}, steps_);
  for (const std::string& name : trainable) {
    Tensor& p = store.Get(name);
    const Tensor& g = grads.at(name);
    auto [it, inserted] = moments_.try_emplace(name);
    if (inserted) {
      it->second.first = Tensor(p.shape(), 0.0f);
      it->second.second = Tensor(p.shape(), 0.0f);
    }
    Tensor& m = it->second.first;
    Tensor& v = it->second.second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0f - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0f - config_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= static_cast<float>(lr * m_hat / (std::sqrt(v_hat) + config_.epsilon));
    }
  }
}

}  // namespace obverter::diff
