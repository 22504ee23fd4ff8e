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

#include "obverter/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace obverter::eval {
namespace {

template <typename T>
double DistinctnessOf(std::span<const T> messages) {
  if (messages.empty()) throw std::invalid_argument("distinctness of an empty batch");
  const std::set<T> unique(messages.begin(), messages.end());
  return static_cast<double>(unique.size()) / static_cast<double>(messages.size());
}

double TypePerplexity(const MessageLog::Counts& counts) {
  long total = 0;
  for (const auto& [m, c] : counts) total += c;
  double entropy = 0.0;
  for (const auto& [m, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    entropy -= p * std::log2(p);
  }
  return std::exp2(entropy);
}

}  // namespace

double Accuracy(std::span<const float> scores, std::span<const float> labels) {
  if (scores.empty()) throw std::invalid_argument("accuracy of an empty batch");
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("accuracy: " + std::to_string(scores.size()) +
                                " scores vs " + std::to_string(labels.size()) + " labels");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const float prediction = scores[i] >= 0.5f ? 1.0f : 0.0f;
    correct += prediction == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

double Distinctness(std::span<const std::string> messages) {
  return DistinctnessOf(messages);
}

double Distinctness(std::span<const std::vector<int>> messages) {
  return DistinctnessOf(messages);
}

void MessageLog::Add(int agent, const std::string& type, const std::string& message,
                     long count) {
  if (count <= 0) throw std::invalid_argument("message counts must be positive");
  entries_[agent][type][message] += count;
}

const MessageLog::Counts& MessageLog::Get(int agent, const std::string& type) const {
  static const Counts kEmpty;
  auto a = entries_.find(agent);
  if (a == entries_.end()) return kEmpty;
  auto t = a->second.find(type);
  return t == a->second.end() ? kEmpty : t->second;
}

std::vector<int> MessageLog::Agents() const {
  std::vector<int> out;
  for (const auto& [a, types] : entries_) out.push_back(a);
  return out;
}

std::vector<std::string> MessageLog::Types(int agent) const {
  std::vector<std::string> out;
  auto a = entries_.find(agent);
  if (a == entries_.end()) return out;
  for (const auto& [t, counts] : a->second) out.push_back(t);
  return out;
}

double Perplexity(const MessageLog& log, int agent, std::span<const std::string> types) {
  if (types.empty()) throw std::invalid_argument("perplexity over no object types");
  std::string missing;
  double sum = 0.0;
  for (const std::string& t : types) {
    const auto& counts = log.Get(agent, t);
    if (counts.empty()) {
      missing += (missing.empty() ? "" : ", ") + t;
      continue;
    }
    sum += TypePerplexity(counts);
  }
  if (!missing.empty()) {
    throw std::invalid_argument("agent " + std::to_string(agent) +
                                " has no messages for: " + missing);
  }
  return sum / static_cast<double>(types.size());
}

double Perplexity(const MessageLog& log, int agent) {
  const auto types = log.Types(agent);
  return Perplexity(log, agent, types);
}

double Jaccard(const MessageLog& log_a, int agent_a, const MessageLog& log_b, int agent_b) {
  const auto types = log_a.Types(agent_a);
  if (types != log_b.Types(agent_b)) {
    throw std::invalid_argument("jaccard: the two logs cover different object types");
  }
  if (types.empty()) throw std::invalid_argument("jaccard over no object types");
  double sum = 0.0;
  for (const std::string& t : types) {
    const auto& a = log_a.Get(agent_a, t);
    const auto& b = log_b.Get(agent_b, t);
    std::size_t shared = 0;
    for (const auto& [m, c] : a) shared += b.count(m);
    const std::size_t both = a.size() + b.size() - shared;
    sum += static_cast<double>(shared) / static_cast<double>(both);
  }
  return sum / static_cast<double>(types.size());
}

std::vector<MessageTableRow> MessageTable(const MessageLog& log, int top_k) {
  std::vector<MessageTableRow> rows;
  for (int agent : log.Agents()) {
    for (const std::string& type : log.Types(agent)) {
      std::vector<std::pair<std::string, long>> ranked(log.Get(agent, type).begin(),
                                                       log.Get(agent, type).end());
      // Map order is lexicographic, so a stable sort by count keeps ties sorted.
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& x, const auto& y) { return x.second > y.second; });
      const int keep = std::min<int>(top_k, static_cast<int>(ranked.size()));
      for (int r = 0; r < keep; ++r) {
        rows.push_back({agent, type, ranked[r].first, ranked[r].second, r + 1});
      }
    }
  }
  return rows;
}

}  // namespace obverter::eval
