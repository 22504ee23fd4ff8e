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

#ifndef OBVERTER_DIFF_PARAM_STORE_H_
#define OBVERTER_DIFF_PARAM_STORE_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "obverter/diff/tape.h"
#include "obverter/diff/tensor.h"

namespace obverter::diff {

inline constexpr std::string_view kCheckpointMagic = "OBVCKPT1";

// Named tensors in insertion order. Entries are either trainable (updated by
// an Optimizer) or frozen (never touched by one; batch-norm running
// statistics live here). Tensor addresses are stable for the store's
// lifetime, so tapes may alias them.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    bool trainable = true;
  };

  ParamStore() = default;
  ParamStore(const ParamStore& other);
  ParamStore& operator=(const ParamStore& other);
  ParamStore(ParamStore&&) noexcept = default;
  ParamStore& operator=(ParamStore&&) noexcept = default;

  // Throws std::invalid_argument on a duplicate name.
  Tensor& Add(std::string name, Tensor value, bool trainable = true);

  bool Contains(std::string_view name) const;
  Tensor& Get(std::string_view name);
  const Tensor& Get(std::string_view name) const;
  bool IsTrainable(std::string_view name) const;
  void SetTrainable(std::string_view name, bool trainable);

  std::size_t size() const { return entries_.size(); }
  // Insertion order.
  std::vector<const Entry*> entries() const;
  std::vector<std::string> TrainableNames() const;

  // Overwrites values of every entry present in `other` with a matching
  // name and shape. Throws when a name is missing or a shape differs.
  void AssignValuesFrom(const ParamStore& other);

  // Byte-exact serialization: magic, then per entry the name length (u32
  // LE), name bytes, rank (u32), dims (u32 each), raw float32 LE values.
  std::string Serialize() const;
  void Write(std::ostream& out) const;
  // Entries come back trainable; trainability is not part of the format.
  static ParamStore Deserialize(std::string_view bytes);
  static ParamStore Read(std::istream& in);

  friend bool BitIdentical(const ParamStore& a, const ParamStore& b);

 private:
  const Entry* Find(std::string_view name) const;

  std::vector<std::unique_ptr<Entry>> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Names and values (bitwise) equal, in the same order.
bool BitIdentical(const ParamStore& a, const ParamStore& b);

// Leaves for every entry of a store, bound to one tape.
class BoundParams {
 public:
  // Trainable entries become gradient-carrying leaves when `track_grads`;
  // frozen entries never do. The tape aliases the store's tensors.
  BoundParams(Tape& tape, const ParamStore& store, bool track_grads);
  // Explicit bindings, e.g. leaves created by a gradient check.
  BoundParams(Tape& tape, std::map<std::string, Var, std::less<>> vars)
      : tape_(&tape), vars_(std::move(vars)) {}

  Var operator()(std::string_view name) const;

  // Gradients of every trainable entry; entries the loss never reached get
  // zeros so the map always covers the trainable set.
  std::map<std::string, Tensor> Gradients(const ParamStore& store) const;

 private:
  Tape* tape_;
  std::map<std::string, Var, std::less<>> vars_;
};

}  // namespace obverter::diff

#endif  // OBVERTER_DIFF_PARAM_STORE_H_
