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

#ifndef OBVERTER_DIFF_TAPE_H_
#define OBVERTER_DIFF_TAPE_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "obverter/diff/tensor.h"

namespace obverter::diff {

class Tape;

// Handle to a value recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
};

// Records operations in execution order, which is also a topological order,
// and replays them in reverse to accumulate gradients. Single-threaded.
class Tape {
 public:
  // Called once per node during Backward with the node's accumulated
  // gradient; pushes contributions into the inputs via MutableGrad.
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf owning a copy of `value`.
  Var Leaf(Tensor value, bool requires_grad);
  // Leaf aliasing external storage; `value` must outlive the tape.
  Var Ref(const Tensor& value, bool requires_grad);
  Var Constant(Tensor value) { return Leaf(std::move(value), false); }

  // Appends an operation node. `backward` is dropped when no input needs a
  // gradient, so inference-only tapes carry no closures.
  Var Record(Tensor value, std::initializer_list<Var> inputs,
             BackwardFn backward);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

  // Gradient buffer for `v`, zero-allocated on first access.
  Tensor& MutableGrad(int id);
  // Null when no gradient has reached `v`.
  const Tensor* grad(Var v) const;

  // Seeds d(loss)/d(loss) = 1 and runs every recorded backward rule once,
  // newest first. `loss` must hold a single element.
  void Backward(Var loss);

  int size() const { return static_cast<int>(nodes_.size()); }

  // Non-smooth operations report which side of each kink their inputs fell
  // on. Two evaluations with equal signatures took the same branches, so a
  // finite difference between them measures a smooth function.
  void NoteBranches(std::uint64_t fingerprint) {
    branch_signature_ = (branch_signature_ ^ fingerprint) * 0x100000001b3ULL;
  }
  std::uint64_t branch_signature() const { return branch_signature_; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  std::uint64_t branch_signature_ = 0xcbf29ce484222325ULL;
};

inline const Tensor& Var::value() const { return tape->value(*this); }

}  // namespace obverter::diff

#endif  // OBVERTER_DIFF_TAPE_H_
