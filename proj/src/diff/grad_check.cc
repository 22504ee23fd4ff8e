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

#include "obverter/diff/grad_check.h"

#include <algorithm>
#include <cmath>

namespace obverter::diff {
namespace {

struct Evaluation {
  double value;
  std::uint64_t signature;
};

Evaluation Evaluate(const ScalarFn& fn, std::span<const Tensor> inputs) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const Tensor& t : inputs) leaves.push_back(tape.Leaf(t, false));
  const double value = fn(tape, leaves).value()[0];
  return {value, tape.branch_signature()};
}

}  // namespace

GradCheckResult GradCheck(const ScalarFn& fn, std::span<const Tensor> inputs,
                          const GradCheckOptions& options) {
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> leaves;
    for (const Tensor& t : inputs) leaves.push_back(tape.Leaf(t, true));
    Var loss = fn(tape, leaves);
    tape.Backward(loss);
    for (const Var& v : leaves) {
      const Tensor* g = tape.grad(v);
      analytic.push_back(g != nullptr ? *g : Tensor(v.shape(), 0.0f));
    }
  }

  GradCheckResult result;
  std::vector<Tensor> work(inputs.begin(), inputs.end());
  const std::uint64_t base_signature = Evaluate(fn, work).signature;
  for (std::size_t which = 0; which < work.size(); ++which) {
    for (std::size_t i = 0; i < work[which].size(); ++i) {
      const float original = work[which][i];
      bool smooth = false;
      double numeric = 0.0;
      for (float eps = options.epsilon;; eps /= 2.0f) {
        // The representable perturbation, not the requested one.
        const float up = original + eps;
        const float down = original - eps;
        work[which][i] = up;
        const Evaluation plus = Evaluate(fn, work);
        work[which][i] = down;
        const Evaluation minus = Evaluate(fn, work);
        work[which][i] = original;
        numeric = (plus.value - minus.value) /
                  (static_cast<double>(up) - static_cast<double>(down));
        smooth = !options.avoid_kinks || (plus.signature == base_signature &&
                                          minus.signature == base_signature);
        if (smooth || eps / 2.0f < options.min_epsilon) break;
      }
      if (!smooth) {
        ++result.unresolved_kinks;
        continue;
      }
      ++result.checked;
      const double a = analytic[which][i];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.floor});
      const double err = std::abs(a - numeric) / denom;
      if (err > result.max_relative_error || result.worst_input < 0) {
        result.max_relative_error = std::max(err, result.max_relative_error);
        result.worst_input = static_cast<int>(which);
        result.worst_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace obverter::diff
