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

#include "obverter/agents/gradient_audit.h"

#include <map>

#include "obverter/diff/ops.h"

namespace obverter::agents {

AgentConfig GradientAuditConfig() {
  AgentConfig c;
  c.resolution = 16;
  c.conv_channels = 4;
  c.strides = {2, 2};
  c.embedding_size = 8;
  c.hidden_size = 6;
  c.decision_size = 8;
  return c;
}

AgentGradientReport AuditListenerGradients(const Agent& agent, const diff::Tensor& images,
                                           std::span<const Message> messages,
                                           std::span<const float> labels,
                                           const diff::GradCheckOptions& options) {
  const diff::ParamStore& store = agent.params();
  const std::vector<std::string> trainable = store.TrainableNames();
  std::vector<diff::Tensor> inputs;
  for (const std::string& name : trainable) inputs.push_back(store.Get(name));
  inputs.push_back(images);

  const std::vector<Message> msgs(messages.begin(), messages.end());
  const std::vector<float> y(labels.begin(), labels.end());
  const AgentConfig config = agent.config();
  diff::ScalarFn fn = [&](diff::Tape& tape, std::span<const diff::Var> in) {
    std::map<std::string, diff::Var, std::less<>> vars;
    for (const diff::ParamStore::Entry* e : store.entries()) {
      if (!e->trainable) vars.emplace(e->name, tape.Ref(e->value, false));
    }
    for (std::size_t i = 0; i < trainable.size(); ++i) vars.emplace(trainable[i], in[i]);
    diff::BoundParams p(tape, std::move(vars));
    diff::Var scores = ConsumeForward(tape, p, config, store, in.back(), msgs,
                                      diff::Mode::kTrain, nullptr);
    return diff::BceLoss(scores, y);
  };
  AgentGradientReport report;
  report.result = diff::GradCheck(fn, inputs, options);
  const int w = report.result.worst_input;
  if (w >= 0) {
    report.worst_name = w < static_cast<int>(trainable.size()) ? trainable[w] : "images";
  }
  return report;
}

}  // namespace obverter::agents
