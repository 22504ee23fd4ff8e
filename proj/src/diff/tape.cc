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

#include "obverter/diff/tape.h"

#include <stdexcept>
#include <utility>

namespace obverter::diff {

Var Tape::Leaf(Tensor value, bool requires_grad) {
  Node node;
  node.owned = std::move(value);
  node.requires_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return Var{this, size() - 1};
}

Var Tape::Ref(const Tensor& value, bool requires_grad) {
  Node node;
  node.external = &value;
  node.requires_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return Var{this, size() - 1};
}

Var Tape::Record(Tensor value, std::initializer_list<Var> inputs,
                 BackwardFn backward) {
  Node node;
  node.owned = std::move(value);
  for (const Var& in : inputs) {
    if (in.tape != this) throw std::logic_error("input from a different tape");
    node.requires_grad = node.requires_grad || nodes_[in.id].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{this, size() - 1};
}

const Tensor& Tape::value(Var v) const {
  const Node& node = nodes_.at(v.id);
  return node.external != nullptr ? *node.external : node.owned;
}

Tensor& Tape::MutableGrad(int id) {
  Node& node = nodes_.at(id);
  if (!node.has_grad) {
    const Tensor& v = node.external != nullptr ? *node.external : node.owned;
    node.grad = Tensor(v.shape(), 0.0f);
    node.has_grad = true;
  }
  return node.grad;
}

const Tensor* Tape::grad(Var v) const {
  const Node& node = nodes_.at(v.id);
  return node.has_grad ? &node.grad : nullptr;
}

void Tape::Backward(Var loss) {
  if (value(loss).size() != 1) {
    throw ShapeError("Backward needs a scalar, got " +
                     ShapeToString(value(loss).shape()));
  }
  MutableGrad(loss.id)[0] += 1.0f;
  for (int id = loss.id; id >= 0; --id) {
    Node& node = nodes_[id];
    if (!node.has_grad || !node.backward) continue;
    // The closure may grow other nodes' grads but never this one.
    node.backward(*this, node.grad);
  }
}

}  // namespace obverter::diff
