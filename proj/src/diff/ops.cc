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

#include "obverter/diff/ops.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <utility>

namespace obverter::diff {
namespace {

void Require(bool ok, const std::string& op, const std::string& what) {
  if (!ok) throw ShapeError(op + ": " + what);
}

std::string Dims(const Tensor& t) { return ShapeToString(t.shape()); }

// out[n x o] (+)= x[n x i] . w[i x o]
void MatMulKernel(const float* x, const float* w, float* out, int n, int in,
                  int o) {
  for (int r = 0; r < n; ++r) {
    float* out_row = out + static_cast<std::size_t>(r) * o;
    const float* x_row = x + static_cast<std::size_t>(r) * in;
    for (int k = 0; k < in; ++k) {
      const float xv = x_row[k];
      const float* w_row = w + static_cast<std::size_t>(k) * o;
      for (int c = 0; c < o; ++c) out_row[c] += xv * w_row[c];
    }
  }
}

// dx[n x i] += dout[n x o] . w^T
void MatMulGradInput(const float* dout, const float* w, float* dx, int n,
                     int in, int o) {
  for (int r = 0; r < n; ++r) {
    const float* d_row = dout + static_cast<std::size_t>(r) * o;
    float* dx_row = dx + static_cast<std::size_t>(r) * in;
    for (int k = 0; k < in; ++k) {
      const float* w_row = w + static_cast<std::size_t>(k) * o;
      float acc = 0.0f;
      for (int c = 0; c < o; ++c) acc += d_row[c] * w_row[c];
      dx_row[k] += acc;
    }
  }
}

// dw[i x o] += x^T . dout
void MatMulGradWeight(const float* x, const float* dout, float* dw, int n,
                      int in, int o) {
  for (int r = 0; r < n; ++r) {
    const float* x_row = x + static_cast<std::size_t>(r) * in;
    const float* d_row = dout + static_cast<std::size_t>(r) * o;
    for (int k = 0; k < in; ++k) {
      const float xv = x_row[k];
      if (xv == 0.0f) continue;
      float* dw_row = dw + static_cast<std::size_t>(k) * o;
      for (int c = 0; c < o; ++c) dw_row[c] += xv * d_row[c];
    }
  }
}

float SigmoidScalar(float x) {
  if (x >= 0.0f) return 1.0f / (1.0f + std::exp(-x));
  const float e = std::exp(x);
  return e / (1.0f + e);
}

void CheckMatrixOperands(const Tensor& x, const Tensor& w,
                         const std::string& op) {
  Require(x.rank() == 2 && w.rank() == 2, op,
          "expected matrices, got " + Dims(x) + " and " + Dims(w));
  Require(x.dim(1) == w.dim(0), op,
          "inner dimensions disagree: " + Dims(x) + " . " + Dims(w));
}

Var MatMulImpl(Var x, Var w, const Var* b) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const std::string op = b != nullptr ? "Affine" : "MatMul";
  CheckMatrixOperands(xv, wv, op);
  const int n = xv.dim(0), in = xv.dim(1), o = wv.dim(1);
  if (b != nullptr) {
    const Tensor& bv = b->value();
    Require(bv.size() == static_cast<std::size_t>(o), op,
            "bias " + Dims(bv) + " does not match output width " +
                std::to_string(o));
  }
  Tensor out({n, o}, 0.0f);
  MatMulKernel(xv.ptr(), wv.ptr(), out.ptr(), n, in, o);
  if (b != nullptr) {
    const float* bias = b->value().ptr();
    for (int r = 0; r < n; ++r) {
      float* row = out.ptr() + static_cast<std::size_t>(r) * o;
      for (int c = 0; c < o; ++c) row[c] += bias[c];
    }
  }
  Var bias_var = b != nullptr ? *b : Var{};
  auto backward = [x, w, bias_var, n, in, o](Tape& tape, const Tensor& g) {
    if (tape.requires_grad(x)) {
      MatMulGradInput(g.ptr(), tape.value(w).ptr(),
                      tape.MutableGrad(x.id).ptr(), n, in, o);
    }
    if (tape.requires_grad(w)) {
      MatMulGradWeight(tape.value(x).ptr(), g.ptr(),
                       tape.MutableGrad(w.id).ptr(), n, in, o);
    }
    if (bias_var.valid() && tape.requires_grad(bias_var)) {
      float* db = tape.MutableGrad(bias_var.id).ptr();
      for (int r = 0; r < n; ++r) {
        const float* row = g.ptr() + static_cast<std::size_t>(r) * o;
        for (int c = 0; c < o; ++c) db[c] += row[c];
      }
    }
  };
  if (b != nullptr) {
    return x.tape->Record(std::move(out), {x, w, *b}, std::move(backward));
  }
  return x.tape->Record(std::move(out), {x, w}, std::move(backward));
}

}  // namespace

int ValidOutputSize(int input_size, int kernel_size, int stride) {
  if (stride <= 0) throw ShapeError("stride must be positive");
  if (input_size < kernel_size) {
    throw ShapeError("input extent " + std::to_string(input_size) +
                     " is smaller than kernel " + std::to_string(kernel_size));
  }
  return (input_size - kernel_size) / stride + 1;
}

Var MatMul(Var x, Var w) { return MatMulImpl(x, w, nullptr); }

Var Affine(Var x, Var w, Var b) { return MatMulImpl(x, w, &b); }

Var Add(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Require(av.shape() == bv.shape(), "Add", Dims(av) + " vs " + Dims(bv));
  Tensor out(av.shape(), 0.0f);
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  return a.tape->Record(std::move(out), {a, b},
                        [a, b](Tape& tape, const Tensor& g) {
                          for (Var v : {a, b}) {
                            if (!tape.requires_grad(v)) continue;
                            float* d = tape.MutableGrad(v.id).ptr();
                            for (std::size_t i = 0; i < g.size(); ++i) {
                              d[i] += g[i];
                            }
                          }
                        });
}

Var Mul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Require(av.shape() == bv.shape(), "Mul", Dims(av) + " vs " + Dims(bv));
  Tensor out(av.shape(), 0.0f);
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  return a.tape->Record(
      std::move(out), {a, b}, [a, b](Tape& tape, const Tensor& g) {
        const Tensor& avv = tape.value(a);
        const Tensor& bvv = tape.value(b);
        if (tape.requires_grad(a)) {
          float* d = tape.MutableGrad(a.id).ptr();
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * bvv[i];
        }
        if (tape.requires_grad(b)) {
          float* d = tape.MutableGrad(b.id).ptr();
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * avv[i];
        }
      });
}

namespace {

// FNV-1a over one bit per element.
template <typename Pred>
std::uint64_t BranchFingerprint(const Tensor& t, Pred taken) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < t.size(); ++i) {
    h = (h ^ (taken(t[i]) ? 1u : 0u)) * 0x100000001b3ULL;
  }
  return h;
}

// Activation whose derivative is a function of its output y.
template <typename Forward, typename DerivFromOutput>
Var Activation(Var x, Forward forward, DerivFromOutput deriv) {
  const Tensor& xv = x.value();
  Tensor out(xv.shape(), 0.0f);
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = forward(xv[i]);
  Tape* tape_ptr = x.tape;
  const int out_id = tape_ptr->size();
  return tape_ptr->Record(
      std::move(out), {x}, [x, out_id, deriv](Tape& tape, const Tensor& g) {
        const Tensor& y = tape.value(Var{&tape, out_id});
        float* d = tape.MutableGrad(x.id).ptr();
        for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * deriv(y[i]);
      });
}

}  // namespace

Var Relu(Var x) {
  x.tape->NoteBranches(BranchFingerprint(x.value(), [](float v) { return v > 0.0f; }));
  return Activation(
      x, [](float v) { return v > 0.0f ? v : 0.0f; },
      [](float y) { return y > 0.0f ? 1.0f : 0.0f; });
}

Var Sigmoid(Var x) {
  return Activation(x, SigmoidScalar,
                    [](float y) { return y * (1.0f - y); });
}

Var Tanh(Var x) {
  return Activation(
      x, [](float v) { return std::tanh(v); },
      [](float y) { return 1.0f - y * y; });
}

Var Reshape(Var x, Shape shape) {
  Tensor out = x.value().Reshaped(std::move(shape));
  return x.tape->Record(std::move(out), {x}, [x](Tape& tape, const Tensor& g) {
    float* d = tape.MutableGrad(x.id).ptr();
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
  });
}

Var Conv2dValid(Var input, Var kernels, int stride) {
  const Tensor& in = input.value();
  const Tensor& ker = kernels.value();
  Require(in.rank() == 3 || in.rank() == 4, "Conv2dValid",
          "input must be HxWxC or NxHxWxC, got " + Dims(in));
  Require(ker.rank() == 4 && ker.dim(1) == 3 && ker.dim(2) == 3,
          "Conv2dValid", "kernels must be Kx3x3xC, got " + Dims(ker));
  const bool batched = in.rank() == 4;
  const int n = batched ? in.dim(0) : 1;
  const int h = in.dim(batched ? 1 : 0);
  const int w = in.dim(batched ? 2 : 1);
  const int c = in.dim(batched ? 3 : 2);
  Require(ker.dim(3) == c, "Conv2dValid",
          "kernel depth " + std::to_string(ker.dim(3)) +
              " does not match input channels " + std::to_string(c));
  Require(h >= 3 && w >= 3, "Conv2dValid",
          "input " + Dims(in) + " is smaller than the 3x3 kernel");
  const int oh = ValidOutputSize(h, 3, stride);
  const int ow = ValidOutputSize(w, 3, stride);
  const int k_count = ker.dim(0);
  const int patch = 9 * c;

  Shape out_shape = batched ? Shape{n, oh, ow, k_count}
                            : Shape{oh, ow, k_count};
  Tensor out(out_shape, 0.0f);
  std::vector<float> buf(patch);
  auto gather = [&](const float* src, int b, int oy, int ox, float* dst) {
    for (int ky = 0; ky < 3; ++ky) {
      const float* row =
          src + ((static_cast<std::size_t>(b) * h + oy * stride + ky) * w +
                 ox * stride) * c;
      std::memcpy(dst + ky * 3 * c, row, sizeof(float) * 3 * c);
    }
  };
  for (int b = 0; b < n; ++b) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        gather(in.ptr(), b, oy, ox, buf.data());
        float* o = out.ptr() +
                   ((static_cast<std::size_t>(b) * oh + oy) * ow + ox) *
                       k_count;
        for (int k = 0; k < k_count; ++k) {
          const float* kr = ker.ptr() + static_cast<std::size_t>(k) * patch;
          float acc = 0.0f;
          for (int i = 0; i < patch; ++i) acc += buf[i] * kr[i];
          o[k] = acc;
        }
      }
    }
  }

  return input.tape->Record(
      std::move(out), {input, kernels},
      [=](Tape& tape, const Tensor& g) {
        const Tensor& inv = tape.value(input);
        const Tensor& kv = tape.value(kernels);
        const bool need_in = tape.requires_grad(input);
        const bool need_k = tape.requires_grad(kernels);
        float* dk = need_k ? tape.MutableGrad(kernels.id).ptr() : nullptr;
        float* din = need_in ? tape.MutableGrad(input.id).ptr() : nullptr;
        std::vector<float> patch_buf(patch);
        std::vector<float> dpatch(patch);
        for (int b = 0; b < n; ++b) {
          for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
              const float* go =
                  g.ptr() +
                  ((static_cast<std::size_t>(b) * oh + oy) * ow + ox) *
                      k_count;
              if (need_k) {
                for (int ky = 0; ky < 3; ++ky) {
                  const float* row =
                      inv.ptr() + ((static_cast<std::size_t>(b) * h +
                                    oy * stride + ky) * w + ox * stride) * c;
                  std::memcpy(patch_buf.data() + ky * 3 * c, row,
                              sizeof(float) * 3 * c);
                }
                for (int k = 0; k < k_count; ++k) {
                  const float gk = go[k];
                  if (gk == 0.0f) continue;
                  float* dkr = dk + static_cast<std::size_t>(k) * patch;
                  for (int i = 0; i < patch; ++i) dkr[i] += gk * patch_buf[i];
                }
              }
              if (need_in) {
                std::fill(dpatch.begin(), dpatch.end(), 0.0f);
                for (int k = 0; k < k_count; ++k) {
                  const float gk = go[k];
                  if (gk == 0.0f) continue;
                  const float* kr = kv.ptr() + static_cast<std::size_t>(k) * patch;
                  for (int i = 0; i < patch; ++i) dpatch[i] += gk * kr[i];
                }
                for (int ky = 0; ky < 3; ++ky) {
                  float* row = din + ((static_cast<std::size_t>(b) * h +
                                       oy * stride + ky) * w + ox * stride) * c;
                  const float* src = dpatch.data() + ky * 3 * c;
                  for (int i = 0; i < 3 * c; ++i) row[i] += src[i];
                }
              }
            }
          }
        }
      });
}

Var BatchNorm(Var x, Var gamma, Var beta, Mode mode,
              const BatchNormRunning& running,
              const BatchNormOptions& options) {
  const Tensor& xv = x.value();
  Require(xv.rank() >= 2, "BatchNorm", "needs rank >= 2, got " + Dims(xv));
  const int f = xv.shape().back();
  const int rows = static_cast<int>(xv.size() / std::max(f, 1));
  Require(gamma.value().size() == static_cast<std::size_t>(f) &&
              beta.value().size() == static_cast<std::size_t>(f),
          "BatchNorm", "gamma/beta must have " + std::to_string(f) + " entries");

  std::vector<float> mean(f, 0.0f), inv_std(f, 0.0f);
  if (mode == Mode::kTrain) {
    if (rows < 2) {
      throw std::invalid_argument(
          "BatchNorm: train mode needs at least 2 rows, variance of a single "
          "sample is undefined");
    }
    std::vector<double> sum(f, 0.0), sq(f, 0.0);
    for (int r = 0; r < rows; ++r) {
      const float* row = xv.ptr() + static_cast<std::size_t>(r) * f;
      for (int j = 0; j < f; ++j) sum[j] += row[j];
    }
    for (int j = 0; j < f; ++j) mean[j] = static_cast<float>(sum[j] / rows);
    for (int r = 0; r < rows; ++r) {
      const float* row = xv.ptr() + static_cast<std::size_t>(r) * f;
      for (int j = 0; j < f; ++j) {
        const double d = static_cast<double>(row[j]) - mean[j];
        sq[j] += d * d;
      }
    }
    for (int j = 0; j < f; ++j) {
      const float var = static_cast<float>(sq[j] / rows);
      inv_std[j] = 1.0f / std::sqrt(var + options.epsilon);
      if (running.update_mean != nullptr) {
        float& rm = (*running.update_mean)[j];
        rm = options.momentum * rm + (1.0f - options.momentum) * mean[j];
      }
      if (running.update_var != nullptr) {
        float& rv = (*running.update_var)[j];
        rv = options.momentum * rv + (1.0f - options.momentum) * var;
      }
    }
  } else {
    if (running.mean == nullptr || running.var == nullptr) {
      throw std::invalid_argument("BatchNorm: eval mode needs running statistics");
    }
    Require(running.mean->size() == static_cast<std::size_t>(f) &&
                running.var->size() == static_cast<std::size_t>(f),
            "BatchNorm", "running statistics size mismatch");
    for (int j = 0; j < f; ++j) {
      mean[j] = (*running.mean)[j];
      inv_std[j] = 1.0f / std::sqrt((*running.var)[j] + options.epsilon);
    }
  }

  const float* gv = gamma.value().ptr();
  const float* bv = beta.value().ptr();
  Tensor xhat(xv.shape(), 0.0f);
  Tensor out(xv.shape(), 0.0f);
  for (int r = 0; r < rows; ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * f;
    for (int j = 0; j < f; ++j) {
      const float nh = (xv[base + j] - mean[j]) * inv_std[j];
      xhat[base + j] = nh;
      out[base + j] = gv[j] * nh + bv[j];
    }
  }

  return x.tape->Record(
      std::move(out), {x, gamma, beta},
      [x, gamma, beta, mode, rows, f, inv_std, xhat = std::move(xhat)](
          Tape& tape, const Tensor& g) {
        const float* gv = tape.value(gamma).ptr();
        std::vector<double> sum_g(f, 0.0), sum_gx(f, 0.0);
        for (int r = 0; r < rows; ++r) {
          const std::size_t base = static_cast<std::size_t>(r) * f;
          for (int j = 0; j < f; ++j) {
            sum_g[j] += g[base + j];
            sum_gx[j] += static_cast<double>(g[base + j]) * xhat[base + j];
          }
        }
        if (tape.requires_grad(gamma)) {
          float* d = tape.MutableGrad(gamma.id).ptr();
          for (int j = 0; j < f; ++j) d[j] += static_cast<float>(sum_gx[j]);
        }
        if (tape.requires_grad(beta)) {
          float* d = tape.MutableGrad(beta.id).ptr();
          for (int j = 0; j < f; ++j) d[j] += static_cast<float>(sum_g[j]);
        }
        if (!tape.requires_grad(x)) return;
        float* dx = tape.MutableGrad(x.id).ptr();
        if (mode == Mode::kEval) {
          for (int r = 0; r < rows; ++r) {
            const std::size_t base = static_cast<std::size_t>(r) * f;
            for (int j = 0; j < f; ++j) {
              dx[base + j] += g[base + j] * gv[j] * inv_std[j];
            }
          }
          return;
        }
        // dx = gamma * inv_std / m * (m * g - sum(g) - xhat * sum(g * xhat))
        for (int r = 0; r < rows; ++r) {
          const std::size_t base = static_cast<std::size_t>(r) * f;
          for (int j = 0; j < f; ++j) {
            const double term = static_cast<double>(rows) * g[base + j] -
                                sum_g[j] - xhat[base + j] * sum_gx[j];
            dx[base + j] += static_cast<float>(gv[j] * inv_std[j] * term / rows);
          }
        }
      });
}

Var GruCell(Var x, Var h, const GruWeights& weights) {
  const Tensor& xv = x.value();
  const Tensor& hv = h.value();
  const Tensor& wx = weights.input_weights.value();
  const Tensor& wh = weights.hidden_weights.value();
  const Tensor& bias = weights.bias.value();
  Require(xv.rank() == 2 && hv.rank() == 2 && xv.dim(0) == hv.dim(0),
          "GruCell", "x " + Dims(xv) + " and h " + Dims(hv) +
                         " must be matrices with equal rows");
  const int n = xv.dim(0), d = xv.dim(1), hs = hv.dim(1), g3 = 3 * hs;
  Require(wx.rank() == 2 && wx.dim(0) == d && wx.dim(1) == g3, "GruCell",
          "input weights " + Dims(wx) + " expected [" + std::to_string(d) +
              "x" + std::to_string(g3) + "]");
  Require(wh.rank() == 2 && wh.dim(0) == hs && wh.dim(1) == g3, "GruCell",
          "hidden weights " + Dims(wh) + " expected [" + std::to_string(hs) +
              "x" + std::to_string(g3) + "]");
  Require(bias.size() == static_cast<std::size_t>(g3), "GruCell",
          "bias " + Dims(bias) + " expected " + std::to_string(g3));

  // Cached per-row gate activations: r, z, n, and r*h.
  Tensor r_gate({n, hs}), z_gate({n, hs}), cand({n, hs}), rh({n, hs});
  Tensor out({n, hs}, 0.0f);
  std::vector<float> ax(g3), ah(g3);
  for (int row = 0; row < n; ++row) {
    const float* xr = xv.ptr() + static_cast<std::size_t>(row) * d;
    const float* hr = hv.ptr() + static_cast<std::size_t>(row) * hs;
    std::fill(ax.begin(), ax.end(), 0.0f);
    std::fill(ah.begin(), ah.end(), 0.0f);
    MatMulKernel(xr, wx.ptr(), ax.data(), 1, d, g3);
    // Reset and update blocks of h . Uh.
    for (int k = 0; k < hs; ++k) {
      const float hk = hr[k];
      const float* w_row = wh.ptr() + static_cast<std::size_t>(k) * g3;
      for (int c = 0; c < 2 * hs; ++c) ah[c] += hk * w_row[c];
    }
    const std::size_t base = static_cast<std::size_t>(row) * hs;
    for (int j = 0; j < hs; ++j) {
      r_gate[base + j] = SigmoidScalar(ax[j] + ah[j] + bias[j]);
      z_gate[base + j] = SigmoidScalar(ax[hs + j] + ah[hs + j] + bias[hs + j]);
      rh[base + j] = r_gate[base + j] * hr[j];
    }
    for (int k = 0; k < hs; ++k) {
      const float v = rh[base + k];
      const float* w_row = wh.ptr() + static_cast<std::size_t>(k) * g3 + 2 * hs;
      for (int c = 0; c < hs; ++c) ah[2 * hs + c] += v * w_row[c];
    }
    for (int j = 0; j < hs; ++j) {
      const float nj = std::tanh(ax[2 * hs + j] + ah[2 * hs + j] + bias[2 * hs + j]);
      cand[base + j] = nj;
      const float zj = z_gate[base + j];
      out[base + j] = (1.0f - zj) * hr[j] + zj * nj;
    }
  }

  const GruWeights w = weights;
  return x.tape->Record(
      std::move(out),
      {x, h, weights.input_weights, weights.hidden_weights, weights.bias},
      [x, h, w, n, d, hs, g3, r_gate = std::move(r_gate),
       z_gate = std::move(z_gate), cand = std::move(cand),
       rh = std::move(rh)](Tape& tape, const Tensor& g) {
        const Tensor& xv = tape.value(x);
        const Tensor& hv = tape.value(h);
        const Tensor& wxv = tape.value(w.input_weights);
        const Tensor& whv = tape.value(w.hidden_weights);
        // Gradients w.r.t. gate pre-activations, [n x 3H].
        Tensor da({n, g3}, 0.0f);
        Tensor dh({n, hs}, 0.0f);
        std::vector<float> drh(hs);
        for (int row = 0; row < n; ++row) {
          const std::size_t base = static_cast<std::size_t>(row) * hs;
          const std::size_t abase = static_cast<std::size_t>(row) * g3;
          for (int j = 0; j < hs; ++j) {
            const float go = g[base + j];
            const float zj = z_gate[base + j];
            const float nj = cand[base + j];
            const float dz = go * (nj - hv[base + j]);
            const float dn = go * zj;
            dh[base + j] += go * (1.0f - zj);
            da[abase + hs + j] = dz * zj * (1.0f - zj);
            da[abase + 2 * hs + j] = dn * (1.0f - nj * nj);
          }
          // d(r*h) = da_n . Un^T
          for (int k = 0; k < hs; ++k) {
            const float* w_row =
                whv.ptr() + static_cast<std::size_t>(k) * g3 + 2 * hs;
            float acc = 0.0f;
            for (int c = 0; c < hs; ++c) acc += da[abase + 2 * hs + c] * w_row[c];
            drh[k] = acc;
          }
          for (int j = 0; j < hs; ++j) {
            const float rj = r_gate[base + j];
            dh[base + j] += drh[j] * rj;
            const float dr = drh[j] * hv[base + j];
            da[abase + j] = dr * rj * (1.0f - rj);
          }
          // dh += da_rz . Urz^T
          for (int k = 0; k < hs; ++k) {
            const float* w_row = whv.ptr() + static_cast<std::size_t>(k) * g3;
            float acc = 0.0f;
            for (int c = 0; c < 2 * hs; ++c) acc += da[abase + c] * w_row[c];
            dh[base + k] += acc;
          }
        }
        if (tape.requires_grad(h)) {
          float* dst = tape.MutableGrad(h.id).ptr();
          for (std::size_t i = 0; i < dh.size(); ++i) dst[i] += dh[i];
        }
        if (tape.requires_grad(x)) {
          MatMulGradInput(da.ptr(), wxv.ptr(), tape.MutableGrad(x.id).ptr(), n,
                          d, g3);
        }
        if (tape.requires_grad(w.input_weights)) {
          MatMulGradWeight(xv.ptr(), da.ptr(),
                           tape.MutableGrad(w.input_weights.id).ptr(), n, d,
                           g3);
        }
        if (tape.requires_grad(w.hidden_weights)) {
          float* dwh = tape.MutableGrad(w.hidden_weights.id).ptr();
          for (int row = 0; row < n; ++row) {
            const std::size_t base = static_cast<std::size_t>(row) * hs;
            const std::size_t abase = static_cast<std::size_t>(row) * g3;
            for (int k = 0; k < hs; ++k) {
              const float hk = hv[base + k];
              const float rhk = rh[base + k];
              float* w_row = dwh + static_cast<std::size_t>(k) * g3;
              for (int c = 0; c < 2 * hs; ++c) w_row[c] += hk * da[abase + c];
              for (int c = 2 * hs; c < g3; ++c) w_row[c] += rhk * da[abase + c];
            }
          }
        }
        if (tape.requires_grad(w.bias)) {
          float* db = tape.MutableGrad(w.bias.id).ptr();
          for (int row = 0; row < n; ++row) {
            const std::size_t abase = static_cast<std::size_t>(row) * g3;
            for (int c = 0; c < g3; ++c) db[c] += da[abase + c];
          }
        }
      });
}

Var SelectRows(Var if_set, Var if_clear, std::span<const std::uint8_t> mask) {
  const Tensor& a = if_set.value();
  const Tensor& b = if_clear.value();
  Require(a.shape() == b.shape() && a.rank() >= 1, "SelectRows",
          Dims(a) + " vs " + Dims(b));
  const int rows = a.dim(0);
  Require(mask.size() == static_cast<std::size_t>(rows), "SelectRows",
          "mask has " + std::to_string(mask.size()) + " entries for " +
              std::to_string(rows) + " rows");
  const std::size_t width = rows == 0 ? 0 : a.size() / rows;
  Tensor out(a.shape(), 0.0f);
  std::vector<std::uint8_t> m(mask.begin(), mask.end());
  for (int r = 0; r < rows; ++r) {
    const Tensor& src = m[r] != 0 ? a : b;
    std::memcpy(out.ptr() + r * width, src.ptr() + r * width,
                width * sizeof(float));
  }
  return if_set.tape->Record(
      std::move(out), {if_set, if_clear},
      [if_set, if_clear, m = std::move(m), rows, width](Tape& tape,
                                                        const Tensor& g) {
        for (int r = 0; r < rows; ++r) {
          Var target = m[r] != 0 ? if_set : if_clear;
          if (!tape.requires_grad(target)) continue;
          float* d = tape.MutableGrad(target.id).ptr() + r * width;
          for (std::size_t i = 0; i < width; ++i) d[i] += g[r * width + i];
        }
      });
}

Var BceLoss(Var y_hat, std::span<const float> labels) {
  const Tensor& yv = y_hat.value();
  Require(yv.size() == labels.size() && !labels.empty(), "BceLoss",
          "predictions " + Dims(yv) + " vs " + std::to_string(labels.size()) +
              " labels");
  const float lo = kProbEpsilon, hi = 1.0f - kProbEpsilon;
  y_hat.tape->NoteBranches(
      BranchFingerprint(yv, [lo, hi](float p) { return p < lo || p > hi; }));
  double total = 0.0;
  for (std::size_t i = 0; i < yv.size(); ++i) {
    const double p = std::clamp(yv[i], lo, hi);
    total -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  const double n = static_cast<double>(labels.size());
  std::vector<float> y(labels.begin(), labels.end());
  return y_hat.tape->Record(
      Tensor::Scalar(static_cast<float>(total / n)), {y_hat},
      [y_hat, y = std::move(y), lo, hi, n](Tape& tape, const Tensor& g) {
        const Tensor& pv = tape.value(y_hat);
        float* d = tape.MutableGrad(y_hat.id).ptr();
        for (std::size_t i = 0; i < y.size(); ++i) {
          const float p = pv[i];
          if (p < lo || p > hi) continue;
          const double grad = (static_cast<double>(p) - y[i]) /
                              (static_cast<double>(p) * (1.0 - p)) / n;
          d[i] += static_cast<float>(g[0] * grad);
        }
      });
}

Var MseLoss(Var y, const Tensor& target) {
  const Tensor& yv = y.value();
  Require(yv.size() == target.size(), "MseLoss",
          Dims(yv) + " vs target " + Dims(target));
  double total = 0.0;
  for (std::size_t i = 0; i < yv.size(); ++i) {
    const double diff = static_cast<double>(yv[i]) - target[i];
    total += diff * diff;
  }
  const double n = static_cast<double>(yv.size());
  return y.tape->Record(
      Tensor::Scalar(static_cast<float>(total / n)), {y},
      [y, target, n](Tape& tape, const Tensor& g) {
        const Tensor& yv = tape.value(y);
        float* d = tape.MutableGrad(y.id).ptr();
        for (std::size_t i = 0; i < yv.size(); ++i) {
          d[i] += static_cast<float>(g[0] * 2.0 * (yv[i] - target[i]) / n);
        }
      });
}

Var WeightedSum(Var x, const Tensor& weights) {
  const Tensor& xv = x.value();
  Require(xv.size() == weights.size(), "WeightedSum",
          Dims(xv) + " vs weights " + Dims(weights));
  double total = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    total += static_cast<double>(xv[i]) * weights[i];
  }
  return x.tape->Record(Tensor::Scalar(static_cast<float>(total)), {x},
                        [x, weights](Tape& tape, const Tensor& g) {
                          float* d = tape.MutableGrad(x.id).ptr();
                          for (std::size_t i = 0; i < weights.size(); ++i) {
                            d[i] += g[0] * weights[i];
                          }
                        });
}

}  // namespace obverter::diff
