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

#ifndef OBVERTER_DIFF_GRAD_CHECK_H_
#define OBVERTER_DIFF_GRAD_CHECK_H_

#include <functional>
#include <span>
#include <vector>

#include "obverter/diff/tape.h"
#include "obverter/diff/tensor.h"

namespace obverter::diff {

// Builds a scalar from leaves placed on a fresh tape, in the order given.
using ScalarFn = std::function<Var(Tape&, std::span<const Var>)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  int worst_input = -1;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
  // Elements where every tried step crossed a kink; not compared.
  std::size_t unresolved_kinks = 0;
};

struct GradCheckOptions {
  float epsilon = 1e-2f;
  // Relative error is |a - n| / max(|a|, |n|, floor).
  double floor = 1e-3;
  // When a step straddles a kink (the tape's branch signature differs from
  // the unperturbed one), retry with half the step until it would drop
  // below min_epsilon. Smaller steps drown in float32 rounding of the loss.
  bool avoid_kinks = true;
  float min_epsilon = 5e-3f;
};

// Compares tape gradients of `fn` against central differences
// (f(x + eps) - f(x - eps)) / 2eps for every element of every input.
GradCheckResult GradCheck(const ScalarFn& fn, std::span<const Tensor> inputs,
                          const GradCheckOptions& options = {});

}  // namespace obverter::diff

#endif  // OBVERTER_DIFF_GRAD_CHECK_H_
