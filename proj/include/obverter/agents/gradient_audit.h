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

#ifndef OBVERTER_AGENTS_GRADIENT_AUDIT_H_
#define OBVERTER_AGENTS_GRADIENT_AUDIT_H_

#include <span>
#include <string>
#include <vector>

#include "obverter/agents/agent.h"
#include "obverter/agents/model.h"
#include "obverter/diff/grad_check.h"

namespace obverter::agents {

// A 16x16 layout small enough to finite-difference every parameter.
AgentConfig GradientAuditConfig();

struct AgentGradientReport {
  diff::GradCheckResult result;
  // Name of the input holding the worst element: a parameter or "images".
  std::string worst_name;
};

// Finite-difference check of the listener training loss (train-mode batch
// norm, binary cross-entropy) with respect to every trainable parameter and
// the listener images.
AgentGradientReport AuditListenerGradients(const Agent& agent, const diff::Tensor& images,
                                           std::span<const Message> messages,
                                           std::span<const float> labels,
                                           const diff::GradCheckOptions& options);

}  // namespace obverter::agents

#endif  // OBVERTER_AGENTS_GRADIENT_AUDIT_H_
