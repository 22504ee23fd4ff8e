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

#include "obverter/diff/param_store.h"

#include <bit>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace obverter::diff {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void PutU32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  std::string_view Take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw std::runtime_error(std::string("truncated checkpoint while reading ") +
                               what);
    }
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint32_t U32(const char* what) {
    std::uint32_t v;
    std::memcpy(&v, Take(4, what).data(), 4);
    return v;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ParamStore::ParamStore(const ParamStore& other) : index_(other.index_) {
  entries_.reserve(other.entries_.size());
  for (const auto& e : other.entries_) {
    entries_.push_back(std::make_unique<Entry>(*e));
  }
}

ParamStore& ParamStore::operator=(const ParamStore& other) {
  if (this != &other) {
    ParamStore copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Tensor& ParamStore::Add(std::string name, Tensor value, bool trainable) {
  if (index_.contains(name)) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  index_.emplace(name, entries_.size());
  entries_.push_back(
      std::make_unique<Entry>(Entry{std::move(name), std::move(value), trainable}));
  return entries_.back()->value;
}

const ParamStore::Entry* ParamStore::Find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : entries_[it->second].get();
}

bool ParamStore::Contains(std::string_view name) const {
  return Find(name) != nullptr;
}

const Tensor& ParamStore::Get(std::string_view name) const {
  const Entry* e = Find(name);
  if (e == nullptr) {
    throw std::out_of_range("unknown parameter: " + std::string(name));
  }
  return e->value;
}

Tensor& ParamStore::Get(std::string_view name) {
  return const_cast<Tensor&>(std::as_const(*this).Get(name));
}

bool ParamStore::IsTrainable(std::string_view name) const {
  const Entry* e = Find(name);
  if (e == nullptr) {
    throw std::out_of_range("unknown parameter: " + std::string(name));
  }
  return e->trainable;
}

void ParamStore::SetTrainable(std::string_view name, bool trainable) {
  const Entry* e = Find(name);
  if (e == nullptr) {
    throw std::out_of_range("unknown parameter: " + std::string(name));
  }
  const_cast<Entry*>(e)->trainable = trainable;
}

std::vector<const ParamStore::Entry*> ParamStore::entries() const {
  std::vector<const Entry*> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.get());
  return out;
}

std::vector<std::string> ParamStore::TrainableNames() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e->trainable) out.push_back(e->name);
  }
  return out;
}

void ParamStore::AssignValuesFrom(const ParamStore& other) {
  for (const auto& e : entries_) {
    const Entry* src = other.Find(e->name);
    if (src == nullptr) {
      throw std::runtime_error("checkpoint lacks parameter " + e->name);
    }
    if (src->value.shape() != e->value.shape()) {
      throw ShapeError("parameter " + e->name + " has shape " +
                       ShapeToString(src->value.shape()) + ", expected " +
                       ShapeToString(e->value.shape()));
    }
  }
  for (auto& e : entries_) e->value = other.Find(e->name)->value;
}

std::string ParamStore::Serialize() const {
  std::string out(kCheckpointMagic);
  for (const auto& e : entries_) {
    PutU32(out, static_cast<std::uint32_t>(e->name.size()));
    out += e->name;
    PutU32(out, static_cast<std::uint32_t>(e->value.rank()));
    for (int d : e->value.shape()) PutU32(out, static_cast<std::uint32_t>(d));
    out.append(reinterpret_cast<const char*>(e->value.ptr()),
               e->value.size() * sizeof(float));
  }
  return out;
}

void ParamStore::Write(std::ostream& out) const {
  const std::string bytes = Serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ParamStore ParamStore::Deserialize(std::string_view bytes) {
  Reader reader(bytes);
  if (reader.Take(kCheckpointMagic.size(), "magic") != kCheckpointMagic) {
    throw std::runtime_error("not a parameter checkpoint (bad magic)");
  }
  ParamStore store;
  while (!reader.done()) {
    const std::uint32_t name_len = reader.U32("name length");
    std::string name(reader.Take(name_len, "name"));
    const std::uint32_t rank = reader.U32("rank");
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<int>(reader.U32("dimension"));
    Tensor value(shape, 0.0f);
    std::string_view raw = reader.Take(value.size() * sizeof(float), "values");
    if (!raw.empty()) std::memcpy(value.ptr(), raw.data(), raw.size());
    store.Add(std::move(name), std::move(value), true);
  }
  return store;
}

ParamStore ParamStore::Read(std::istream& in) {
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return Deserialize(bytes);
}

bool BitIdentical(const ParamStore& a, const ParamStore& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    if (a.entries_[i]->name != b.entries_[i]->name) return false;
    if (!BitIdentical(a.entries_[i]->value, b.entries_[i]->value)) return false;
  }
  return true;
}

BoundParams::BoundParams(Tape& tape, const ParamStore& store, bool track_grads)
    : tape_(&tape) {
  for (const ParamStore::Entry* e : store.entries()) {
    vars_.emplace(e->name, tape.Ref(e->value, track_grads && e->trainable));
  }
}

Var BoundParams::operator()(std::string_view name) const {
  auto it = vars_.find(name);
  if (it == vars_.end()) {
    throw std::out_of_range("unbound parameter: " + std::string(name));
  }
  return it->second;
}

std::map<std::string, Tensor> BoundParams::Gradients(
    const ParamStore& store) const {
  std::map<std::string, Tensor> out;
  for (const std::string& name : store.TrainableNames()) {
    const Var v = (*this)(name);
    const Tensor* g = tape_->grad(v);
    out.emplace(name, g != nullptr ? *g : Tensor(store.Get(name).shape(), 0.0f));
  }
  return out;
}

}  // namespace obverter::diff
