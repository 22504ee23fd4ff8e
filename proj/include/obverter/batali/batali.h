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

// A replication of Batali's grammar emergence experiment: agents share a
// single vanilla RNN for speaking and listening, speakers pick symbols that
// move their own hidden state towards the intended meaning vector, and
// listeners regress their final hidden state onto that meaning.

#ifndef OBVERTER_BATALI_BATALI_H_
#define OBVERTER_BATALI_BATALI_H_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obverter/random.h"

namespace obverter::batali {

inline constexpr int kMeaningSize = 10;
inline constexpr int kSubjectBits = 4;
inline constexpr int kNumSymbols = 4;  // a, b, c, d

using Vec = std::array<double, kMeaningSize>;
using Message = std::vector<int>;

struct Meaning {
  int subject = 0;    // row of the subject table
  int predicate = 0;  // row of the predicate table
  std::string subject_name;
  std::string predicate_name;
  Vec bits{};

  std::string Name() const { return subject_name + " " + predicate_name; }
  std::string BitString() const;
};

// Ten subjects ("me", "we", ...) and ten predicates ("happy", ...).
const std::vector<std::string>& SubjectNames();
const std::vector<std::string>& PredicateNames();

// All 100 meanings, subject-major in table order.
std::vector<Meaning> BuildMeanings();
// Meaning index of (subject i, predicate i) for i = 0..9.
std::vector<int> DiagonalIndices();
// Throws std::invalid_argument for an unknown name like "one angry".
int MeaningIndex(std::string_view name);

// "abca" <-> {0, 1, 2, 0}.
std::string MessageText(const Message& m);
Message ParseMessageText(std::string_view text);

struct RnnWeights {
  std::array<Vec, kNumSymbols> input{};  // row per symbol
  std::array<Vec, kMeaningSize> hidden{};  // h W: row i feeds every unit j
  Vec bias{};

  RnnWeights& operator+=(const RnnWeights& other);
  RnnWeights& operator*=(double s);
  friend bool operator==(const RnnWeights&, const RnnWeights&) = default;
};

class RnnAgent {
 public:
  RnnAgent() = default;
  // Weights and biases uniform in [-init_range, init_range].
  RnnAgent(Rng& rng, double init_range);
  explicit RnnAgent(const RnnWeights& weights) : weights_(weights) {}

  const RnnWeights& weights() const { return weights_; }
  RnnWeights& weights() { return weights_; }

  // sigma(v_symbol W_i + h W_h + b).
  Vec Step(const Vec& h, int symbol) const;
  // Final hidden state after reading the message from a zero state.
  Vec Comprehend(const Message& message) const;

  // Mean over the ten units of (h_final - target)^2 and its gradient by
  // backpropagation through time.
  double LossAndGradient(const Message& message, const Vec& target,
                         RnnWeights* gradient) const;
  // One gradient descent step; returns the loss before the step.
  double TrainStep(const Message& message, const Vec& target, double learning_rate);

  friend bool operator==(const RnnAgent&, const RnnAgent&) = default;

 private:
  RnnWeights weights_;
};

double SquaredDistance(const Vec& a, const Vec& b);

// Greedy obverter generation: at every step the symbol whose next hidden
// state lies closest to `meaning` is appended (lowest index on ties), and
// generation stops once that distance drops below `threshold` or the message
// reaches `max_length`.
Message BataliGenerate(const RnnAgent& agent, const Vec& meaning, int max_length,
                       double threshold);

// Index of the candidate closest to the agent's understanding of `message`;
// lowest index on ties. Throws std::invalid_argument on no candidates.
int DecodeNearest(const RnnAgent& agent, const Message& message,
                  std::span<const Vec> candidates);

struct PopulationConfig {
  int population = 10;
  int teachers = 9;
  int max_length = 20;
  double threshold = 0.25;
  double learning_rate = 0.1;
  double init_range = 1.0;
  std::vector<int> holdout;  // meaning indices never shown in training
  int max_rounds = 5000;
  // Training stops once the learner error averaged over the last
  // `population` rounds falls below this value; 0 disables early stopping.
  double target_error = 0.05;
  std::uint64_t seed = 0;

  void Validate() const;
};

class Population {
 public:
  explicit Population(const PopulationConfig& config);

  const PopulationConfig& config() const { return config_; }
  const std::vector<Meaning>& meanings() const { return meanings_; }
  // Meaning indices used for training (all but the holdout).
  const std::vector<int>& training_meanings() const { return training_; }
  const RnnAgent& agent(int i) const { return agents_.at(i); }
  int size() const { return static_cast<int>(agents_.size()); }

  struct RoundReport {
    int round = 0;
    int learner = 0;
    std::vector<int> teachers;
    // Learner's mean per-dimension squared error over the round's
    // presentations, each measured before its update.
    double learner_error = 0.0;
  };

  // One learner and `teachers` distinct other agents are drawn; each
  // teacher speaks every training meaning in fresh random order and the
  // learner takes one step per message.
  RoundReport PlayRound(int round);

  Message Speak(int agent, int meaning) const;

 private:
  PopulationConfig config_;
  std::vector<Meaning> meanings_;
  std::vector<int> training_;
  std::vector<RnnAgent> agents_;
};

struct TrainReport {
  std::vector<Population::RoundReport> rounds;
  int rounds_to_target = -1;  // first round at which training stopped early
  double final_error = 0.0;   // windowed error at the end
};

TrainReport TrainPopulation(Population& population,
                            const std::function<void(const Population::RoundReport&)>&
                                on_round = {});

// Fraction of (speaker, listener != speaker, meaning) triples for which the
// listener decodes the speaker's message back to the meaning among all 100.
double CrossDecodeAccuracy(const Population& population, std::span<const int> meanings);
// Same with speaker == listener.
double SelfDecodeAccuracy(const Population& population, std::span<const int> meanings);

struct TableRow {
  std::string subject;
  std::string predicate;
  std::string message;
  int support_count = 0;  // agents using the majority message
};

// The majority message over the population for every meaning; ties go to
// the lexicographically smallest message.
std::vector<TableRow> MajorityTable(const Population& population);

}  // namespace obverter::batali

#endif  // OBVERTER_BATALI_BATALI_H_
