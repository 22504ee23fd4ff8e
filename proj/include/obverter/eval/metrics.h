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

// Language metrics over message logs. Everything here is a pure function of
// its inputs; object types and messages are plain strings so the same code
// serves image types ("blue_box") and meaning names ("one angry").

#ifndef OBVERTER_EVAL_METRICS_H_
#define OBVERTER_EVAL_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

namespace obverter::eval {

// Fraction of predictions (score >= 0.5 means 1) that match the labels.
// Throws std::invalid_argument on empty or mismatched input.
double Accuracy(std::span<const float> scores, std::span<const float> labels);

// Unique messages divided by batch size. Throws on an empty batch.
double Distinctness(std::span<const std::string> messages);
double Distinctness(std::span<const std::vector<int>> messages);

// (agent, object type) -> message -> count.
class MessageLog {
 public:
  using Counts = std::map<std::string, long>;

  void Add(int agent, const std::string& type, const std::string& message, long count = 1);

  // Empty counts when the pair was never logged.
  const Counts& Get(int agent, const std::string& type) const;
  std::vector<int> Agents() const;
  // Sorted types logged for `agent`.
  std::vector<std::string> Types(int agent) const;

  friend bool operator==(const MessageLog&, const MessageLog&) = default;

 private:
  std::map<int, std::map<std::string, Counts>> entries_;
};

// Mean over `types` of 2^H, where H is the base-2 entropy of the agent's
// message distribution for that type. Throws std::invalid_argument naming
// every type with no messages.
double Perplexity(const MessageLog& log, int agent, std::span<const std::string> types);
// Over every type the agent has logged.
double Perplexity(const MessageLog& log, int agent);

// Mean over types of |A ∩ B| / |A ∪ B| on the sets of messages each agent
// used. Both agents must cover the same types.
double Jaccard(const MessageLog& log_a, int agent_a, const MessageLog& log_b, int agent_b);

struct MessageTableRow {
  int agent = 0;
  std::string type;
  std::string message;
  long count = 0;
  int rank = 1;  // 1 = most frequent
};

// Per (agent, type): messages by count descending, ties in lexicographic
// order, keeping the first `top_k`.
std::vector<MessageTableRow> MessageTable(const MessageLog& log, int top_k);

}  // namespace obverter::eval

#endif  // OBVERTER_EVAL_METRICS_H_
