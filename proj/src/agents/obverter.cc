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

#include "obverter/agents/obverter.h"

#include <cstring>
#include <stdexcept>

#include "obverter/diff/ops.h"
#include "obverter/diff/param_store.h"

namespace obverter::agents {

using diff::Tensor;

namespace {

// Copies row `src_row` of a [N x W] tensor into row `dst_row` of another.
void CopyRow(const Tensor& src, int src_row, Tensor& dst, int dst_row) {
  const int w = src.dim(1);
  std::memcpy(dst.ptr() + static_cast<std::size_t>(dst_row) * w,
              src.ptr() + static_cast<std::size_t>(src_row) * w, w * sizeof(float));
}

}  // namespace

std::vector<Utterance> GenerateObverter(const Agent& speaker, const Tensor& images,
                                        const ObverterOptions& options) {
  if (options.max_length < 1) throw std::invalid_argument("max_length must be >= 1");
  const AgentConfig& config = speaker.config();
  const int n = images.dim(0);
  const int v = config.vocab_size;
  const int hsize = config.hidden_size;

  Tensor proj;
  {
    diff::Tape tape;
    diff::BoundParams p(tape, speaker.params(), false);
    diff::Var z = Embed(p, config, tape.Ref(images, false), diff::Mode::kEval,
                        speaker.params(), nullptr);
    proj = ImageProjection(p, z).value();
  }

  std::vector<Utterance> out(n);
  Tensor hidden({n, hsize}, 0.0f);
  std::vector<int> active(n);
  for (int i = 0; i < n; ++i) active[i] = i;

  for (int step = 0; step < options.max_length && !active.empty(); ++step) {
    // One candidate row per (active image, symbol).
    const int k = static_cast<int>(active.size()) * v;
    Tensor h_rep({k, hsize});
    Tensor proj_rep({k, proj.dim(1)});
    std::vector<int> symbols(k);
    for (int a = 0; a < static_cast<int>(active.size()); ++a) {
      for (int s = 0; s < v; ++s) {
        CopyRow(hidden, active[a], h_rep, a * v + s);
        CopyRow(proj, active[a], proj_rep, a * v + s);
        symbols[a * v + s] = s;
      }
    }
    diff::Tape tape;
    diff::BoundParams p(tape, speaker.params(), false);
    const diff::GruWeights w{p(names::kGruInput), p(names::kGruHidden), p(names::kGruBias)};
    diff::Var h_next = diff::GruCell(tape.Constant(OneHot(symbols, v)),
                                     tape.Constant(std::move(h_rep)), w);
    diff::Var scores = DecisionScore(p, h_next, tape.Constant(std::move(proj_rep)));
    const Tensor& sv = scores.value();
    const Tensor& hv = h_next.value();

    std::vector<int> still;
    for (int a = 0; a < static_cast<int>(active.size()); ++a) {
      int best = 0;
      float best_score = ClampScore(sv[a * v]);
      for (int s = 1; s < v; ++s) {
        const float c = ClampScore(sv[a * v + s]);
        if (c > best_score) {
          best = s;
          best_score = c;
        }
      }
      const int row = active[a];
      CopyRow(hv, a * v + best, hidden, row);
      out[row].message.push_back(best);
      out[row].score = best_score;
      if (!(best_score > options.threshold)) still.push_back(row);
    }
    active = std::move(still);
  }
  return out;
}

}  // namespace obverter::agents
