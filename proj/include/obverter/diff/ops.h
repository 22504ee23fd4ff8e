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

// Differentiable operations recorded on a Tape. Only what the agent
// architectures need: no broadcasting beyond a bias row, no general
// reductions.
//
// Every kernel computes each output row of a batch with a loop order that
// does not depend on the other rows, so a row's result is bit-identical
// whether it is evaluated alone or inside a larger batch.

#ifndef OBVERTER_DIFF_OPS_H_
#define OBVERTER_DIFF_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "obverter/diff/tape.h"
#include "obverter/diff/tensor.h"

namespace obverter::diff {

enum class Mode { kTrain, kEval };

inline constexpr float kProbEpsilon = 1e-7f;

// [n x i] . [i x o]
Var MatMul(Var x, Var w);
// [n x i] . [i x o] + [o]
Var Affine(Var x, Var w, Var b);
// Elementwise; shapes must match exactly.
Var Add(Var a, Var b);
Var Mul(Var a, Var b);

Var Relu(Var x);
Var Sigmoid(Var x);
Var Tanh(Var x);

Var Reshape(Var x, Shape shape);

// Valid (unpadded) cross-correlation with 3x3 kernels and no bias.
// input [N x H x W x C] or [H x W x C], kernels [K x 3 x 3 x C].
Var Conv2dValid(Var input, Var kernels, int stride);
int ValidOutputSize(int input_size, int kernel_size, int stride);

struct BatchNormRunning {
  const Tensor* mean = nullptr;  // read in eval mode
  const Tensor* var = nullptr;
  Tensor* update_mean = nullptr;  // moving-average targets in train mode
  Tensor* update_var = nullptr;
};

struct BatchNormOptions {
  float epsilon = 1e-5f;
  float momentum = 0.9f;  // running = momentum * running + (1 - momentum) * batch
};

// Normalizes over every axis but the last, so a [N x H x W x C] activation
// is normalized per channel. Train mode needs at least two rows.
Var BatchNorm(Var x, Var gamma, Var beta, Mode mode,
              const BatchNormRunning& running,
              const BatchNormOptions& options = {});

// Gate blocks are laid out [reset | update | candidate] along the last axis.
struct GruWeights {
  Var input_weights;   // [d x 3H]
  Var hidden_weights;  // [H x 3H]
  Var bias;            // [3H]
};

// r = s(x Wr + h Ur + br), z = s(x Wz + h Uz + bz),
// n = tanh(x Wn + (r * h) Un + bn), h' = (1 - z) * h + z * n.
Var GruCell(Var x, Var h, const GruWeights& weights);

// Row r of the result is row r of `if_set` when mask[r] != 0, else of
// `if_clear`. Copies bits; no arithmetic.
Var SelectRows(Var if_set, Var if_clear, std::span<const std::uint8_t> mask);

// Mean binary cross-entropy. Predictions are clamped to
// [kProbEpsilon, 1 - kProbEpsilon]; the clamp passes no gradient.
Var BceLoss(Var y_hat, std::span<const float> labels);

// Mean over all elements of (y - target)^2.
Var MseLoss(Var y, const Tensor& target);

// Sum of x * weights; reduces any tensor to a scalar for gradient checks.
Var WeightedSum(Var x, const Tensor& weights);

}  // namespace obverter::diff

#endif  // OBVERTER_DIFF_OPS_H_
