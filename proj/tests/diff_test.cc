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

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "obverter/diff/grad_check.h"
#include "obverter/diff/ops.h"
#include "obverter/diff/optimizer.h"
#include "obverter/diff/param_store.h"
#include "obverter/diff/tape.h"

namespace obverter::diff {
namespace {

constexpr double kGradTolerance = 1e-2;

Tensor RandomTensor(Shape shape, std::mt19937_64& rng, float lo = -1.0f,
                    float hi = 1.0f) {
  Tensor t(std::move(shape), 0.0f);
  std::uniform_real_distribution<float> dist(lo, hi);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

// Reduces an op's output with fixed random weights so every output element
// contributes to the checked gradient.
ScalarFn Reduced(std::function<Var(Tape&, std::span<const Var>)> body,
                 Shape out_shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor weights = RandomTensor(std::move(out_shape), rng);
  return [body, weights](Tape& tape, std::span<const Var> in) {
    return WeightedSum(body(tape, in), weights);
  };
}

TEST(AffineTest, IdentityCase) {
  Tape tape;
  Tensor eye({2, 2}, {1, 0, 0, 1});
  Var out = Affine(tape.Constant(eye), tape.Constant(eye),
                   tape.Constant(Tensor({2}, 0.0f)));
  EXPECT_EQ(out.value(), eye);
}

TEST(AffineTest, ZeroInputYieldsBiasRows) {
  std::mt19937_64 rng(1);
  Tape tape;
  Var out = Affine(tape.Constant(Tensor({3, 4}, 0.0f)),
                   tape.Constant(RandomTensor({4, 2}, rng)),
                   tape.Constant(Tensor({2}, {1.0f, 2.0f})));
  for (int r = 0; r < 3; ++r) {
    EXPECT_EQ(out.value()[r * 2], 1.0f);
    EXPECT_EQ(out.value()[r * 2 + 1], 2.0f);
  }
}

TEST(AffineTest, ShapeMismatchReportsDimensions) {
  Tape tape;
  try {
    Affine(tape.Constant(Tensor({2, 3})), tape.Constant(Tensor({4, 2})),
           tape.Constant(Tensor({2})));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("[2x3]"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("[4x2]"), std::string::npos);
  }
}

TEST(AffineTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::vector<Tensor> inputs = {RandomTensor({3, 4}, rng),
                                RandomTensor({4, 2}, rng),
                                RandomTensor({2}, rng)};
  auto fn = Reduced(
      [](Tape&, std::span<const Var> in) { return Affine(in[0], in[1], in[2]); },
      {3, 2}, 11);
  EXPECT_LT(GradCheck(fn, inputs).max_relative_error, kGradTolerance);
}

// Direct six-loop cross-correlation, independent of the patch-gather kernel.
Tensor BruteForceConv(const Tensor& in, const Tensor& ker, int stride) {
  const int h = in.dim(0), w = in.dim(1), c = in.dim(2), k = ker.dim(0);
  const int oh = (h - 3) / stride + 1, ow = (w - 3) / stride + 1;
  Tensor out({oh, ow, k}, 0.0f);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int f = 0; f < k; ++f) {
        double acc = 0.0;
        for (int ky = 0; ky < 3; ++ky)
          for (int kx = 0; kx < 3; ++kx)
            for (int ch = 0; ch < c; ++ch)
              acc += in[((y * stride + ky) * w + x * stride + kx) * c + ch] *
                     ker[((f * 3 + ky) * 3 + kx) * c + ch];
        out[(y * ow + x) * k + f] = static_cast<float>(acc);
      }
  return out;
}

TEST(ConvTest, SumOfOnes) {
  Tape tape;
  Var out = Conv2dValid(tape.Constant(Tensor({3, 3, 1}, 1.0f)),
                        tape.Constant(Tensor({1, 3, 3, 1}, 1.0f)), 1);
  ASSERT_EQ(out.shape(), (Shape{1, 1, 1}));
  EXPECT_EQ(out.value()[0], 9.0f);
}

TEST(ConvTest, PaperStackSpatialSizes) {
  const std::vector<int> strides = {2, 1, 1, 2, 1, 2, 1, 2};
  const std::vector<int> expected = {63, 61, 59, 29, 27, 13, 11, 5};
  int size = 128;
  for (std::size_t i = 0; i < strides.size(); ++i) {
    size = ValidOutputSize(size, 3, strides[i]);
    EXPECT_EQ(size, expected[i]) << "layer " << i;
  }
}

TEST(ConvTest, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int stride : {1, 2, 3}) {
    Tensor in = RandomTensor({9, 7, 3}, rng);
    Tensor ker = RandomTensor({5, 3, 3, 3}, rng);
    Tape tape;
    Var out = Conv2dValid(tape.Constant(in), tape.Constant(ker), stride);
    Tensor expected = BruteForceConv(in, ker, stride);
    ASSERT_EQ(out.shape(), expected.shape());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_NEAR(out.value()[i], expected[i], 1e-5);
    }
  }
}

TEST(ConvTest, BatchedEqualsPerImage) {
  std::mt19937_64 rng(4);
  Tensor batch = RandomTensor({3, 8, 8, 2}, rng);
  Tensor ker = RandomTensor({4, 3, 3, 2}, rng);
  Tape tape;
  Var out = Conv2dValid(tape.Constant(batch), tape.Constant(ker), 2);
  const std::size_t per_in = 8 * 8 * 2;
  const std::size_t per_out = out.value().size() / 3;
  for (int b = 0; b < 3; ++b) {
    std::vector<float> img(batch.ptr() + b * per_in,
                           batch.ptr() + (b + 1) * per_in);
    Var single = Conv2dValid(tape.Constant(Tensor({8, 8, 2}, img)),
                             tape.Constant(ker), 2);
    EXPECT_EQ(0, std::memcmp(single.value().ptr(),
                             out.value().ptr() + b * per_out,
                             per_out * sizeof(float)));
  }
}

TEST(ConvTest, RejectsInputSmallerThanKernel) {
  Tape tape;
  EXPECT_THROW(Conv2dValid(tape.Constant(Tensor({2, 5, 1})),
                           tape.Constant(Tensor({1, 3, 3, 1})), 1),
               ShapeError);
}

TEST(ConvTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  for (int stride : {1, 2}) {
    std::vector<Tensor> inputs = {RandomTensor({8, 8, 2}, rng),
                                  RandomTensor({4, 3, 3, 2}, rng)};
    const int o = ValidOutputSize(8, 3, stride);
    auto fn = Reduced(
        [stride](Tape&, std::span<const Var> in) {
          return Conv2dValid(in[0], in[1], stride);
        },
        {o, o, 4}, 13);
    EXPECT_LT(GradCheck(fn, inputs).max_relative_error, kGradTolerance)
        << "stride " << stride;
  }
}

TEST(BatchNormTest, TrainModeNormalizes) {
  std::mt19937_64 rng(6);
  Tensor x = RandomTensor({64, 3}, rng, -3.0f, 5.0f);
  Tensor mean({3}, 0.0f), var({3}, 1.0f);
  Tape tape;
  Var out = BatchNorm(tape.Constant(x), tape.Constant(Tensor({3}, 1.0f)),
                      tape.Constant(Tensor({3}, 0.0f)), Mode::kTrain,
                      {.update_mean = &mean, .update_var = &var});
  for (int j = 0; j < 3; ++j) {
    double m = 0.0, v = 0.0;
    for (int r = 0; r < 64; ++r) m += out.value()[r * 3 + j];
    m /= 64;
    for (int r = 0; r < 64; ++r) {
      const double d = out.value()[r * 3 + j] - m;
      v += d * d;
    }
    v /= 64;
    EXPECT_NEAR(m, 0.0, 1e-4);
    EXPECT_NEAR(v, 1.0, 1e-4);
  }
  // One moving-average step from (0, 1) toward the batch statistics.
  double batch_mean = 0.0;
  for (int r = 0; r < 64; ++r) batch_mean += x[r * 3];
  batch_mean /= 64;
  EXPECT_NEAR(mean[0], 0.1 * batch_mean, 1e-5);
}

TEST(BatchNormTest, EvalWithUnitRunningStatsIsNearIdentity) {
  std::mt19937_64 rng(8);
  Tensor x = RandomTensor({5, 4}, rng);
  Tensor mean({4}, 0.0f), var({4}, 1.0f);
  Tape tape;
  Var out = BatchNorm(tape.Constant(x), tape.Constant(Tensor({4}, 1.0f)),
                      tape.Constant(Tensor({4}, 0.0f)), Mode::kEval,
                      {.mean = &mean, .var = &var});
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(out.value()[i], x[i], 1e-5);
  }
}

TEST(BatchNormTest, SingleRowTrainRejected) {
  Tape tape;
  EXPECT_THROW(BatchNorm(tape.Constant(Tensor({1, 4})),
                         tape.Constant(Tensor({4}, 1.0f)),
                         tape.Constant(Tensor({4}, 0.0f)), Mode::kTrain, {}),
               std::invalid_argument);
}

TEST(BatchNormTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  for (Mode mode : {Mode::kTrain, Mode::kEval}) {
    Tensor running_mean = RandomTensor({3}, rng, -0.5f, 0.5f);
    Tensor running_var = RandomTensor({3}, rng, 0.5f, 2.0f);
    std::vector<Tensor> inputs = {RandomTensor({6, 3}, rng, -2.0f, 2.0f),
                                  RandomTensor({3}, rng, 0.5f, 1.5f),
                                  RandomTensor({3}, rng)};
    auto fn = Reduced(
        [&, mode](Tape&, std::span<const Var> in) {
          return BatchNorm(in[0], in[1], in[2], mode,
                           {.mean = &running_mean, .var = &running_var});
        },
        {6, 3}, 17);
    EXPECT_LT(GradCheck(fn, inputs).max_relative_error, kGradTolerance);
  }
}

TEST(BatchNormTest, ChannelwiseOnConvActivations) {
  std::mt19937_64 rng(10);
  std::vector<Tensor> inputs = {RandomTensor({2, 3, 3, 2}, rng, -2.0f, 2.0f),
                                RandomTensor({2}, rng, 0.5f, 1.5f),
                                RandomTensor({2}, rng)};
  auto fn = Reduced(
      [](Tape&, std::span<const Var> in) {
        return BatchNorm(in[0], in[1], in[2], Mode::kTrain, {});
      },
      {2, 3, 3, 2}, 19);
  EXPECT_LT(GradCheck(fn, inputs).max_relative_error, kGradTolerance);
}

GruWeights BindGru(std::span<const Var> in) { return {in[2], in[3], in[4]}; }

TEST(GruTest, ZeroParametersAndStateStayZero) {
  Tape tape;
  Var out = GruCell(tape.Constant(Tensor({1, 5}, {1, 0, 0, 0, 0})),
                    tape.Constant(Tensor({1, 64}, 0.0f)),
                    {tape.Constant(Tensor({5, 192}, 0.0f)),
                     tape.Constant(Tensor({64, 192}, 0.0f)),
                     tape.Constant(Tensor({192}, 0.0f))});
  for (float v : out.value().data()) EXPECT_EQ(v, 0.0f);
}

TEST(GruTest, NewStateIsConvexCombination) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor x = RandomTensor({4, 3}, rng);
    Tensor h = RandomTensor({4, 6}, rng);
    Tensor wx = RandomTensor({3, 18}, rng, -2.0f, 2.0f);
    Tensor wh = RandomTensor({6, 18}, rng, -2.0f, 2.0f);
    Tensor b = RandomTensor({18}, rng);
    Tape tape;
    Var out = GruCell(tape.Constant(x), tape.Constant(h),
                      {tape.Constant(wx), tape.Constant(wh), tape.Constant(b)});
    // The candidate lies in [-1, 1], so h' must lie between h and that range.
    for (std::size_t i = 0; i < h.size(); ++i) {
      EXPECT_GE(out.value()[i], std::min(h[i], -1.0f) - 1e-6f);
      EXPECT_LE(out.value()[i], std::max(h[i], 1.0f) + 1e-6f);
    }
  }
}

TEST(GruTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(14);
  std::vector<Tensor> inputs = {
      RandomTensor({3, 4}, rng), RandomTensor({3, 5}, rng),
      RandomTensor({4, 15}, rng), RandomTensor({5, 15}, rng),
      RandomTensor({15}, rng)};
  auto fn = Reduced(
      [](Tape&, std::span<const Var> in) {
        return GruCell(in[0], in[1], BindGru(in));
      },
      {3, 5}, 23);
  EXPECT_LT(GradCheck(fn, inputs).max_relative_error, kGradTolerance);
}

TEST(GruTest, TwoStepUnrollGradient) {
  std::mt19937_64 rng(15);
  std::vector<Tensor> inputs = {
      RandomTensor({2, 3}, rng), RandomTensor({2, 4}, rng),
      RandomTensor({3, 12}, rng), RandomTensor({4, 12}, rng),
      RandomTensor({12}, rng)};
  auto fn = Reduced(
      [](Tape&, std::span<const Var> in) {
        Var h1 = GruCell(in[0], in[1], BindGru(in));
        return GruCell(in[0], h1, BindGru(in));
      },
      {2, 4}, 29);
  EXPECT_LT(GradCheck(fn, inputs).max_relative_error, kGradTolerance);
}

TEST(BceTest, KnownValues) {
  Tape tape;
  const std::vector<float> zero = {0.0f}, one = {1.0f};
  EXPECT_NEAR(BceLoss(tape.Constant(Tensor({1}, {0.5f})), zero).value()[0],
              std::log(2.0), 1e-6);
  EXPECT_NEAR(
      BceLoss(tape.Constant(Tensor({1}, {1.0f - 1e-7f})), one).value()[0],
      1e-7, 2e-7);
  // Exact 0 and 1 are clamped instead of producing infinities.
  EXPECT_TRUE(std::isfinite(
      BceLoss(tape.Constant(Tensor({1}, {0.0f})), one).value()[0]));
}

TEST(BceTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(16);
  std::vector<Tensor> inputs = {RandomTensor({6}, rng, 0.1f, 0.9f)};
  const std::vector<float> labels = {1, 0, 0, 1, 1, 0};
  ScalarFn fn = [&labels](Tape&, std::span<const Var> in) {
    return BceLoss(in[0], labels);
  };
  GradCheckOptions opts;
  opts.epsilon = 1e-3f;
  EXPECT_LT(GradCheck(fn, inputs, opts).max_relative_error, kGradTolerance);
}

TEST(SelectRowsTest, RoutesRowsAndGradients) {
  std::mt19937_64 rng(17);
  std::vector<Tensor> inputs = {RandomTensor({3, 2}, rng),
                                RandomTensor({3, 2}, rng)};
  const std::vector<std::uint8_t> mask = {1, 0, 1};
  Tape tape;
  Var out = SelectRows(tape.Constant(inputs[0]), tape.Constant(inputs[1]), mask);
  EXPECT_EQ(out.value()[0], inputs[0][0]);
  EXPECT_EQ(out.value()[2], inputs[1][2]);
  auto fn = Reduced(
      [&mask](Tape&, std::span<const Var> in) {
        return SelectRows(Tanh(in[0]), in[1], mask);
      },
      {3, 2}, 31);
  EXPECT_LT(GradCheck(fn, inputs).max_relative_error, kGradTolerance);
}

TEST(TapeTest, FanOutGradientsSumExactly) {
  std::mt19937_64 rng(18);
  Tensor x = RandomTensor({4}, rng);
  auto f = [](Var v) { return Mul(v, v); };
  auto g = [](Var v) { return Sigmoid(v); };
  const Tensor ones({4}, 1.0f);

  Tape combined;
  Var xc = combined.Leaf(x, true);
  combined.Backward(WeightedSum(Add(f(xc), g(xc)), ones));

  Tape only_f, only_g;
  Var xf = only_f.Leaf(x, true);
  only_f.Backward(WeightedSum(f(xf), ones));
  Var xg = only_g.Leaf(x, true);
  only_g.Backward(WeightedSum(g(xg), ones));

  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ((*combined.grad(xc))[i],
              (*only_f.grad(xf))[i] + (*only_g.grad(xg))[i]);
  }
}

TEST(TapeTest, BackwardVisitsEachNodeOnce) {
  Tape tape;
  Var x = tape.Leaf(Tensor({1}, {2.0f}), true);
  int calls = 0;
  Var y = tape.Record(Tensor({1}, {4.0f}), {x},
                      [&calls, x](Tape& t, const Tensor& g) {
                        ++calls;
                        t.MutableGrad(x.id)[0] += 2.0f * g[0];
                      });
  Var z = Add(y, y);
  tape.Backward(z);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ((*tape.grad(x))[0], 4.0f);
}

TEST(TapeTest, ForwardIsDeterministic) {
  std::mt19937_64 rng(19);
  Tensor in = RandomTensor({2, 9, 9, 3}, rng);
  Tensor ker = RandomTensor({4, 3, 3, 3}, rng);
  auto run = [&] {
    Tape tape;
    Var c = Conv2dValid(tape.Constant(in), tape.Constant(ker), 2);
    Var bn = BatchNorm(c, tape.Constant(Tensor({4}, 1.0f)),
                       tape.Constant(Tensor({4}, 0.0f)), Mode::kTrain, {});
    return Relu(bn).value();
  };
  EXPECT_TRUE(BitIdentical(run(), run()));
}

TEST(GradCheckTest, DetectsCorruptedBackwardRule) {
  std::mt19937_64 rng(20);
  std::vector<Tensor> inputs = {RandomTensor({5}, rng, -2.0f, 2.0f)};
  // Sigmoid whose backward forgets the (1 - y) factor.
  ScalarFn broken = [](Tape& tape, std::span<const Var> in) {
    const Tensor& x = in[0].value();
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 1.0f / (1.0f + std::exp(-x[i]));
    const int out_id = tape.size();
    Var x_var = in[0];
    Var out = tape.Record(std::move(y), {x_var},
                          [x_var, out_id](Tape& t, const Tensor& g) {
                            const Tensor& yv = t.value(Var{&t, out_id});
                            for (std::size_t i = 0; i < g.size(); ++i) {
                              t.MutableGrad(x_var.id)[i] += g[i] * yv[i];
                            }
                          });
    return WeightedSum(out, Tensor({5}, 1.0f));
  };
  EXPECT_GT(GradCheck(broken, inputs).max_relative_error, 0.1);
}

TEST(GradCheckTest, StepsAcrossReluKinksAreNotCompared) {
  // relu(x) at x = 0.007: a 1e-2 step crosses zero, the halved one does not.
  // At x = 0.001 both steps cross and the element is left out.
  ScalarFn fn = [](Tape&, std::span<const Var> in) {
    return WeightedSum(Relu(in[0]), Tensor({3}, 1.0f));
  };
  std::vector<Tensor> inputs = {Tensor({3}, {0.007f, 0.001f, 0.5f})};
  const GradCheckResult r = GradCheck(fn, inputs);
  EXPECT_EQ(r.checked, 2u);
  EXPECT_EQ(r.unresolved_kinks, 1u);
  EXPECT_LT(r.max_relative_error, 1e-3);

  GradCheckOptions naive;
  naive.avoid_kinks = false;
  EXPECT_GT(GradCheck(fn, inputs, naive).max_relative_error, 0.1);
}

TEST(TapeTest, BranchSignatureTracksReluPattern) {
  auto signature = [](float v) {
    Tape tape;
    Relu(tape.Constant(Tensor({2}, {v, 1.0f})));
    return tape.branch_signature();
  };
  EXPECT_EQ(signature(0.3f), signature(0.7f));
  EXPECT_NE(signature(0.3f), signature(-0.3f));
}

TEST(OptimizerTest, ZeroGradientLeavesParametersBitIdentical) {
  std::mt19937_64 rng(21);
  for (OptimizerKind kind : {OptimizerKind::kAdam, OptimizerKind::kSgd}) {
    ParamStore store;
    store.Add("w", RandomTensor({3, 3}, rng));
    const ParamStore before = store;
    Optimizer opt({.kind = kind});
    for (int i = 0; i < 3; ++i) opt.Step(store, {{"w", Tensor({3, 3}, 0.0f)}});
    EXPECT_TRUE(BitIdentical(before, store));
  }
}

TEST(OptimizerTest, PlainDescentStep) {
  ParamStore store;
  store.Add("p", Tensor({1}, 0.0f));
  Optimizer opt({.kind = OptimizerKind::kSgd, .learning_rate = 0.1f});
  opt.Step(store, {{"p", Tensor({1}, 1.0f)}});
  EXPECT_FLOAT_EQ(store.Get("p")[0], -0.1f);
}

TEST(OptimizerTest, AdaptiveFirstStepMovesByLearningRate) {
  // m_hat = g, v_hat = g^2 after bias correction, so the step is
  // lr * g / (|g| + eps) = lr / (1 + 1e-8).
  ParamStore store;
  store.Add("p", Tensor({1}, 0.0f));
  Optimizer opt;
  opt.Step(store, {{"p", Tensor({1}, 1.0f)}});
  EXPECT_NEAR(store.Get("p")[0], -1e-4, 1e-9);
}

TEST(OptimizerTest, FrozenEntriesNeverMove) {
  std::mt19937_64 rng(22);
  ParamStore store;
  store.Add("w", RandomTensor({2}, rng));
  store.Add("running", RandomTensor({2}, rng), /*trainable=*/false);
  const Tensor frozen = store.Get("running");
  Optimizer opt;
  for (int i = 0; i < 10; ++i) opt.Step(store, {{"w", RandomTensor({2}, rng)}});
  EXPECT_TRUE(BitIdentical(frozen, store.Get("running")));
}

TEST(OptimizerTest, NonFiniteGradientNamesParameter) {
  ParamStore store;
  store.Add("decision/fc1/w", Tensor({2}, 0.0f));
  Optimizer opt;
  try {
    opt.Step(store, {{"decision/fc1/w", Tensor({2}, {1.0f, NAN})}});
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("decision/fc1/w"), std::string::npos);
  }
  EXPECT_EQ(store.Get("decision/fc1/w")[0], 0.0f);
}

TEST(OptimizerTest, GradientsMustCoverTrainableSet) {
  ParamStore store;
  store.Add("a", Tensor({1}));
  store.Add("b", Tensor({1}));
  Optimizer opt;
  EXPECT_THROW(opt.Step(store, {{"a", Tensor({1})}}), std::invalid_argument);
}

TEST(ParamStoreTest, SerializedLayoutIsExact) {
  ParamStore store;
  store.Add("ab", Tensor({2}, {1.0f, -2.0f}));
  const std::string bytes = store.Serialize();
  std::string expected = "OBVCKPT1";
  auto u32 = [&expected](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) expected.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  u32(2);
  expected += "ab";
  u32(1);
  u32(2);
  u32(0x3f800000);  // 1.0f
  u32(0xc0000000);  // -2.0f
  EXPECT_EQ(bytes, expected);
}

TEST(ParamStoreTest, RandomStoresRoundTripByteExact) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    ParamStore store;
    const int entries = 1 + static_cast<int>(rng() % 6);
    for (int e = 0; e < entries; ++e) {
      Shape shape;
      const int rank = static_cast<int>(rng() % 4);
      for (int d = 0; d < rank; ++d) shape.push_back(static_cast<int>(rng() % 4));
      store.Add("p" + std::to_string(e) + "/" + std::to_string(rng() % 1000),
                RandomTensor(shape, rng, -1e6f, 1e6f), rng() % 2 == 0);
    }
    const std::string bytes = store.Serialize();
    ParamStore loaded = ParamStore::Deserialize(bytes);
    EXPECT_TRUE(BitIdentical(store, loaded));
    EXPECT_EQ(loaded.Serialize(), bytes);
  }
}

TEST(ParamStoreTest, RejectsCorruptInput) {
  EXPECT_THROW(ParamStore::Deserialize("NOTMAGIC"), std::runtime_error);
  ParamStore store;
  store.Add("w", Tensor({4}, 1.0f));
  std::string bytes = store.Serialize();
  bytes.pop_back();
  EXPECT_THROW(ParamStore::Deserialize(bytes), std::runtime_error);
}

TEST(ParamStoreTest, DuplicateNamesRejected) {
  ParamStore store;
  store.Add("w", Tensor({1}));
  EXPECT_THROW(store.Add("w", Tensor({1})), std::invalid_argument);
}

}  // namespace
}  // namespace obverter::diff
