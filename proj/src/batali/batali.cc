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

#include "obverter/batali/batali.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace obverter::batali {
namespace {

struct Row {
  const char* name;
  const char* bits;
};

constexpr Row kSubjects[] = {
    {"me", "1000"},  {"we", "1001"},   {"mip", "1011"}, {"you", "0100"}, {"yall", "0101"},
    {"yup", "0111"}, {"yumi", "1101"}, {"one", "0010"}, {"they", "0011"}, {"all", "1111"},
};

constexpr Row kPredicates[] = {
    {"happy", "011001"},   {"sad", "011100"},     {"angry", "101001"}, {"tired", "100011"},
    {"excited", "110001"}, {"sick", "100101"},    {"hungry", "100110"}, {"thirsty", "000111"},
    {"silly", "010101"},   {"scared", "010011"},
};

std::vector<std::string> Names(std::span<const Row> rows) {
  std::vector<std::string> out;
  for (const Row& r : rows) out.emplace_back(r.name);
  return out;
}

double Logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string Meaning::BitString() const {
  std::string s;
  for (double b : bits) s += b > 0.5 ? '1' : '0';
  return s;
}

const std::vector<std::string>& SubjectNames() {
  static const auto names = Names(kSubjects);
  return names;
}

const std::vector<std::string>& PredicateNames() {
  static const auto names = Names(kPredicates);
  return names;
}

std::vector<Meaning> BuildMeanings() {
  std::vector<Meaning> out;
  for (int s = 0; s < 10; ++s) {
    for (int p = 0; p < 10; ++p) {
      Meaning m;
      m.subject = s;
      m.predicate = p;
      m.subject_name = kSubjects[s].name;
      m.predicate_name = kPredicates[p].name;
      const std::string bits = std::string(kSubjects[s].bits) + kPredicates[p].bits;
      for (int i = 0; i < kMeaningSize; ++i) m.bits[i] = bits[i] == '1' ? 1.0 : 0.0;
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<int> DiagonalIndices() {
  std::vector<int> out;
  for (int i = 0; i < 10; ++i) out.push_back(i * 10 + i);
  return out;
}

int MeaningIndex(std::string_view name) {
  const auto space = name.find(' ');
  if (space != std::string_view::npos) {
    const auto& subjects = SubjectNames();
    const auto& predicates = PredicateNames();
    const auto s = std::find(subjects.begin(), subjects.end(), name.substr(0, space));
    const auto p = std::find(predicates.begin(), predicates.end(), name.substr(space + 1));
    if (s != subjects.end() && p != predicates.end()) {
      return static_cast<int>((s - subjects.begin()) * 10 + (p - predicates.begin()));
    }
  }
  throw std::invalid_argument("unknown meaning '" + std::string(name) + "'");
}

std::string MessageText(const Message& m) {
  std::string s;
  for (int sym : m) s += static_cast<char>('a' + sym);
  return s;
}

Message ParseMessageText(std::string_view text) {
  Message m;
  for (char c : text) {
    if (c < 'a' || c >= 'a' + kNumSymbols) {
      throw std::invalid_argument("bad symbol '" + std::string(1, c) + "' in message");
    }
    m.push_back(c - 'a');
  }
  return m;
}

RnnWeights& RnnWeights::operator+=(const RnnWeights& other) {
  for (int s = 0; s < kNumSymbols; ++s) {
    for (int j = 0; j < kMeaningSize; ++j) input[s][j] += other.input[s][j];
  }
  for (int i = 0; i < kMeaningSize; ++i) {
    for (int j = 0; j < kMeaningSize; ++j) hidden[i][j] += other.hidden[i][j];
    bias[i] += other.bias[i];
  }
  return *this;
}

RnnWeights& RnnWeights::operator*=(double s) {
  for (auto& row : input) for (double& v : row) v *= s;
  for (auto& row : hidden) for (double& v : row) v *= s;
  for (double& v : bias) v *= s;
  return *this;
}

RnnAgent::RnnAgent(Rng& rng, double init_range) {
  auto draw = [&] { return UniformReal(rng, -init_range, init_range); };
  for (auto& row : weights_.input) for (double& v : row) v = draw();
  for (auto& row : weights_.hidden) for (double& v : row) v = draw();
  for (double& v : weights_.bias) v = draw();
}

Vec RnnAgent::Step(const Vec& h, int symbol) const {
  if (symbol < 0 || symbol >= kNumSymbols) {
    throw std::out_of_range("symbol " + std::to_string(symbol) + " outside a-d");
  }
  Vec a = weights_.bias;
  for (int j = 0; j < kMeaningSize; ++j) a[j] += weights_.input[symbol][j];
  for (int i = 0; i < kMeaningSize; ++i) {
    if (h[i] == 0.0) continue;
    for (int j = 0; j < kMeaningSize; ++j) a[j] += h[i] * weights_.hidden[i][j];
  }
  for (double& v : a) v = Logistic(v);
  return a;
}

Vec RnnAgent::Comprehend(const Message& message) const {
  Vec h{};
  for (int s : message) h = Step(h, s);
  return h;
}

double RnnAgent::LossAndGradient(const Message& message, const Vec& target,
                                 RnnWeights* gradient) const {
  std::vector<Vec> states(message.size() + 1, Vec{});
  for (std::size_t t = 0; t < message.size(); ++t) states[t + 1] = Step(states[t], message[t]);
  const Vec& last = states.back();
  double loss = 0.0;
  Vec dh{};
  for (int j = 0; j < kMeaningSize; ++j) {
    const double diff = last[j] - target[j];
    loss += diff * diff;
    dh[j] = 2.0 * diff / kMeaningSize;
  }
  loss /= kMeaningSize;
  if (gradient == nullptr) return loss;

  *gradient = RnnWeights{};
  for (std::size_t t = message.size(); t-- > 0;) {
    const Vec& h = states[t + 1];
    const Vec& prev = states[t];
    Vec da;
    for (int j = 0; j < kMeaningSize; ++j) da[j] = dh[j] * h[j] * (1.0 - h[j]);
    Vec dprev{};
    for (int j = 0; j < kMeaningSize; ++j) {
      gradient->input[message[t]][j] += da[j];
      gradient->bias[j] += da[j];
    }
    for (int i = 0; i < kMeaningSize; ++i) {
      for (int j = 0; j < kMeaningSize; ++j) {
        gradient->hidden[i][j] += prev[i] * da[j];
        dprev[i] += weights_.hidden[i][j] * da[j];
      }
    }
    dh = dprev;
  }
  return loss;
}

double RnnAgent::TrainStep(const Message& message, const Vec& target, double learning_rate) {
  RnnWeights grad;
  const double loss = LossAndGradient(message, target, &grad);
  grad *= -learning_rate;
  weights_ += grad;
  return loss;
}

double SquaredDistance(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (int i = 0; i < kMeaningSize; ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

Message BataliGenerate(const RnnAgent& agent, const Vec& meaning, int max_length,
                       double threshold) {
  Message message;
  Vec h{};
  while (static_cast<int>(message.size()) < max_length) {
    int best = 0;
    Vec best_h = agent.Step(h, 0);
    double best_d = SquaredDistance(meaning, best_h);
    for (int s = 1; s < kNumSymbols; ++s) {
      const Vec next = agent.Step(h, s);
      const double d = SquaredDistance(meaning, next);
      if (d < best_d) {
        best = s;
        best_d = d;
        best_h = next;
      }
    }
    message.push_back(best);
    h = best_h;
    if (best_d < threshold) break;
  }
  return message;
}

int DecodeNearest(const RnnAgent& agent, const Message& message,
                  std::span<const Vec> candidates) {
  if (candidates.empty()) throw std::invalid_argument("decode over no candidate meanings");
  const Vec h = agent.Comprehend(message);
  int best = 0;
  double best_d = SquaredDistance(candidates[0], h);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double d = SquaredDistance(candidates[i], h);
    if (d < best_d) {
      best = static_cast<int>(i);
      best_d = d;
    }
  }
  return best;
}

void PopulationConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(teachers >= 1, "teachers must be positive");
  require(population >= teachers + 1, "population must exceed the number of teachers");
  require(max_length >= 1, "max_length must be positive");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(init_range > 0.0, "init_range must be positive");
  require(max_rounds >= 1, "max_rounds must be positive");
  require(target_error >= 0.0, "target_error must not be negative");
  for (int h : holdout) require(h >= 0 && h < 100, "holdout meaning index out of range");
}

Population::Population(const PopulationConfig& config)
    : config_(config), meanings_(BuildMeanings()) {
  config_.Validate();
  for (int i = 0; i < static_cast<int>(meanings_.size()); ++i) {
    if (std::find(config_.holdout.begin(), config_.holdout.end(), i) == config_.holdout.end()) {
      training_.push_back(i);
    }
  }
  for (int a = 0; a < config_.population; ++a) {
    Rng rng = MakeRng(config_.seed, {Tag(Stream::kInit), static_cast<std::uint64_t>(a)});
    agents_.emplace_back(rng, config_.init_range);
  }
}

Message Population::Speak(int agent, int meaning) const {
  return BataliGenerate(agents_.at(agent), meanings_.at(meaning).bits, config_.max_length,
                        config_.threshold);
}

Population::RoundReport Population::PlayRound(int round) {
  Rng rng = MakeRng(config_.seed, {Tag(Stream::kPopulation), static_cast<std::uint64_t>(round)});
  RoundReport report;
  report.round = round;
  report.learner = UniformIndex(rng, size());
  std::vector<int> others;
  for (int a = 0; a < size(); ++a) {
    if (a != report.learner) others.push_back(a);
  }
  std::shuffle(others.begin(), others.end(), rng);
  report.teachers.assign(others.begin(), others.begin() + config_.teachers);

  RnnAgent& learner = agents_[report.learner];
  double total = 0.0;
  long presentations = 0;
  for (int teacher : report.teachers) {
    std::vector<int> order = training_;
    std::shuffle(order.begin(), order.end(), rng);
    for (int m : order) {
      const Message message = Speak(teacher, m);
      total += learner.TrainStep(message, meanings_[m].bits, config_.learning_rate);
      ++presentations;
    }
  }
  report.learner_error = total / static_cast<double>(presentations);
  return report;
}

TrainReport TrainPopulation(Population& population,
                            const std::function<void(const Population::RoundReport&)>& on_round) {
  const auto& config = population.config();
  TrainReport report;
  const int window = config.population;
  double window_sum = 0.0;
  for (int r = 0; r < config.max_rounds; ++r) {
    report.rounds.push_back(population.PlayRound(r));
    window_sum += report.rounds.back().learner_error;
    if (r >= window) window_sum -= report.rounds[r - window].learner_error;
    const int filled = std::min(r + 1, window);
    report.final_error = window_sum / filled;
    if (on_round) on_round(report.rounds.back());
    if (filled == window && report.final_error < config.target_error) {
      report.rounds_to_target = r + 1;
      break;
    }
  }
  return report;
}

namespace {

double DecodeAccuracy(const Population& population, std::span<const int> meanings,
                      bool self) {
  std::vector<Vec> candidates;
  for (const auto& m : population.meanings()) candidates.push_back(m.bits);
  long hits = 0, trials = 0;
  for (int s = 0; s < population.size(); ++s) {
    for (int m : meanings) {
      const Message message = population.Speak(s, m);
      for (int l = 0; l < population.size(); ++l) {
        if ((l == s) != self) continue;
        hits += DecodeNearest(population.agent(l), message, candidates) == m;
        ++trials;
      }
    }
  }
  if (trials == 0) throw std::invalid_argument("decode accuracy over no trials");
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace

double CrossDecodeAccuracy(const Population& population, std::span<const int> meanings) {
  return DecodeAccuracy(population, meanings, false);
}

double SelfDecodeAccuracy(const Population& population, std::span<const int> meanings) {
  return DecodeAccuracy(population, meanings, true);
}

std::vector<TableRow> MajorityTable(const Population& population) {
  std::vector<TableRow> rows;
  for (int m = 0; m < static_cast<int>(population.meanings().size()); ++m) {
    std::map<std::string, int> counts;
    for (int a = 0; a < population.size(); ++a) ++counts[MessageText(population.Speak(a, m))];
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const auto& meaning = population.meanings()[m];
    rows.push_back({meaning.subject_name, meaning.predicate_name, best->first, best->second});
  }
  return rows;
}

}  // namespace obverter::batali
