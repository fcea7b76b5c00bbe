/* Copyright 2026 The advseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "advseg/error.h"
#include "advseg/ops.h"
#include "advseg/optim.h"
#include "advseg/tape.h"
#include "oracles.h"

namespace advseg {
namespace {

using testing::CentralDifferences;
using testing::GradientsAgree;
using testing::RandomTensor;

// Gradient of sum(weights * op(x)) with respect to x, through the tape.
TensorD TapeGradient(const std::function<TensorD(const TensorD&)>& op,
                     const TensorD& x, const TensorD& weights) {
  TensorD input = x.Clone();
  input.set_requires_grad(true);
  TapeD tape;
  TensorD loss;
  {
    TapeD::Recording rec(tape);
    loss = Sum(Mul(op(input), weights));
  }
  return tape.Backward(loss, {input}).front();
}

double WeightedSum(const TensorD& y, const TensorD& weights) {
  double s = 0.0;
  for (std::int64_t i = 0; i < y.numel(); ++i) s += y[i] * weights[i];
  return s;
}

// Every op is checked the same way: analytic gradient of a random linear
// functional of its output against central differences.
void ExpectGradientMatches(const std::function<TensorD(const TensorD&)>& op,
                           const TensorD& x, std::uint64_t seed,
                           double rel_tol = 1e-4) {
  Rng rng(seed);
  const TensorD probe = op(x);
  const TensorD weights = RandomTensor<double>(probe.shape(), rng);
  const TensorD analytic = TapeGradient(op, x, weights);
  const auto numeric = CentralDifferences(
      [&](const TensorD& v) { return WeightedSum(op(v), weights); }, x);
  ASSERT_EQ(analytic.numel(), static_cast<std::int64_t>(numeric.size()));
  for (std::int64_t i = 0; i < analytic.numel(); ++i) {
    EXPECT_TRUE(GradientsAgree(analytic[i], numeric[i], rel_tol))
        << "component " << i << ": analytic " << analytic[i] << " numeric "
        << numeric[i];
  }
}

TEST(Conv2dTest, ScalarKernelScalesInput) {
  Tensor x = Tensor::Full({1, 1, 3, 3}, 1.0f);
  Tensor k = Tensor::Full({1, 1, 1, 1}, 2.0f);
  Tensor b = Tensor::Zeros({1});
  Tensor y = Conv2d(x, k, b, 1, 0);
  ASSERT_EQ(y.shape(), (Shape{1, 1, 3, 3}));
  for (float v : y.data()) EXPECT_EQ(v, 2.0f);
}

TEST(Conv2dTest, IdentityCenterKernelIsIdentity) {
  Rng rng(3);
  Tensor x = RandomTensor<float>({1, 1, 3, 3}, rng);
  Tensor k = Tensor::Zeros({1, 1, 3, 3});
  k[4] = 1.0f;
  Tensor y = Conv2d(x, k, Tensor(), 1, 1);
  ASSERT_EQ(y.shape(), x.shape());
  for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_EQ(y[i], x[i]);
}

TEST(Conv2dTest, MatchesNestedLoopReference) {
  Rng rng(11);
  TensorD x = RandomTensor<double>({2, 3, 8, 8}, rng);
  TensorD k = RandomTensor<double>({4, 3, 3, 3}, rng);
  TensorD b = RandomTensor<double>({4}, rng);
  Shape ref_shape;
  const auto ref = testing::NaiveConv2d(x, k, b, 1, 1, &ref_shape);
  TensorD y = Conv2d(x, k, b, 1, 1);
  ASSERT_EQ(y.shape(), ref_shape);
  for (std::int64_t i = 0; i < y.numel(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-12);

  // Strided, unpadded, single precision.
  const auto ref2 = testing::NaiveConv2d(x, k, TensorD(), 2, 0, &ref_shape);
  Tensor y2 = Conv2d(x.Cast<float>(), k.Cast<float>(), Tensor(), 2, 0);
  ASSERT_EQ(y2.shape(), ref_shape);
  for (std::int64_t i = 0; i < y2.numel(); ++i) EXPECT_NEAR(y2[i], ref2[i], 1e-5);
}

TEST(Conv2dTest, RejectsChannelMismatchAndEmptyOutput) {
  Tensor x = Tensor::Zeros({1, 2, 4, 4});
  EXPECT_THROW(Conv2d(x, Tensor::Zeros({1, 3, 3, 3}), Tensor(), 1, 1), ShapeError);
  EXPECT_THROW(Conv2d(x, Tensor::Zeros({1, 2, 5, 5}), Tensor(), 1, 0), ShapeError);
  EXPECT_THROW(Conv2d(x, Tensor::Zeros({1, 2, 3, 3}), Tensor::Zeros({2}), 1, 1),
               ShapeError);
  EXPECT_THROW(Conv2d(x, Tensor::Zeros({1, 2, 3, 3}), Tensor(), 0, 1),
               InvalidArgument);
}

TEST(Conv2dTest, GradientsMatchFiniteDifferences) {
  Rng rng(5);
  const TensorD x = RandomTensor<double>({2, 2, 5, 5}, rng);
  const TensorD k = RandomTensor<double>({3, 2, 3, 3}, rng);
  const TensorD b = RandomTensor<double>({3}, rng);
  ExpectGradientMatches([&](const TensorD& v) { return Conv2d(v, k, b, 1, 1); }, x, 1);
  ExpectGradientMatches([&](const TensorD& v) { return Conv2d(x, v, b, 1, 1); }, k, 2);
  ExpectGradientMatches([&](const TensorD& v) { return Conv2d(x, k, v, 1, 1); }, b, 3);
  ExpectGradientMatches([&](const TensorD& v) { return Conv2d(v, k, b, 2, 0); }, x, 4);
}

TEST(ConvTranspose2dTest, DisjointStampingWhenStrideEqualsKernel) {
  Tensor x({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor k = Tensor::Full({1, 1, 2, 2}, 1.0f);
  Tensor y = ConvTranspose2d(x, k, Tensor(), 2);
  ASSERT_EQ(y.shape(), (Shape{1, 1, 4, 4}));
  const std::vector<float> expected = {1, 1, 2, 2, 1, 1, 2, 2,
                                       3, 3, 4, 4, 3, 3, 4, 4};
  for (int i = 0; i < 16; ++i) EXPECT_EQ(y[i], expected[i]);
}

TEST(ConvTranspose2dTest, ZeroInputGivesZeroOutput) {
  Rng rng(8);
  Tensor k = RandomTensor<float>({3, 2, 2, 2}, rng);
  Tensor y = ConvTranspose2d(Tensor::Zeros({2, 3, 5, 5}), k, Tensor(), 2);
  ASSERT_EQ(y.shape(), (Shape{2, 2, 10, 10}));
  for (float v : y.data()) EXPECT_EQ(v, 0.0f);
}

TEST(ConvTranspose2dTest, IsTheAdjointOfConvolution) {
  Rng rng(21);
  // Kernel [2, 3, 2, 2]: conv2d maps 3 -> 2 channels, the transpose 2 -> 3.
  TensorD x = RandomTensor<double>({1, 2, 4, 4}, rng);
  TensorD k = RandomTensor<double>({2, 3, 2, 2}, rng);
  TensorD y = ConvTranspose2d(x, k, TensorD(), 2);
  ASSERT_EQ(y.shape(), (Shape{1, 3, 8, 8}));
  const auto ref = testing::NaiveConv2dAdjoint(x, k, 2, 8, 8);
  for (std::int64_t i = 0; i < y.numel(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-12);

  // <conv2d(z, k), x> == <z, conv_transpose2d(x, k)>.
  TensorD z = RandomTensor<double>({1, 3, 8, 8}, rng);
  Shape s;
  const auto cz = testing::NaiveConv2d(z, k, TensorD(), 2, 0, &s);
  double lhs = 0.0, rhs = 0.0;
  for (std::int64_t i = 0; i < x.numel(); ++i) lhs += cz[i] * x[i];
  for (std::int64_t i = 0; i < z.numel(); ++i) rhs += z[i] * y[i];
  EXPECT_NEAR(lhs, rhs, 1e-10);
}

TEST(ConvTranspose2dTest, InputGradientIsConvolutionWithSameKernel) {
  Rng rng(22);
  TensorD x = RandomTensor<double>({2, 2, 3, 3}, rng);
  TensorD k = RandomTensor<double>({2, 3, 2, 2}, rng);
  TensorD g = RandomTensor<double>({2, 3, 6, 6}, rng);
  TensorD grad =
      TapeGradient([&](const TensorD& v) { return ConvTranspose2d(v, k, TensorD(), 2); },
                   x, g);
  TensorD conv = Conv2d(g, k, TensorD(), 2, 0);
  ASSERT_EQ(conv.shape(), grad.shape());
  for (std::int64_t i = 0; i < grad.numel(); ++i) EXPECT_NEAR(grad[i], conv[i], 1e-12);
}

TEST(ConvTranspose2dTest, GradientsMatchFiniteDifferences) {
  Rng rng(23);
  const TensorD x = RandomTensor<double>({2, 3, 3, 3}, rng);
  const TensorD k = RandomTensor<double>({3, 2, 2, 2}, rng);
  const TensorD b = RandomTensor<double>({2}, rng);
  ExpectGradientMatches([&](const TensorD& v) { return ConvTranspose2d(v, k, b, 2); }, x, 1);
  ExpectGradientMatches([&](const TensorD& v) { return ConvTranspose2d(x, v, b, 2); }, k, 2);
  ExpectGradientMatches([&](const TensorD& v) { return ConvTranspose2d(x, k, v, 2); }, b, 3);
}

TEST(ConvTranspose2dTest, RejectsChannelMismatch) {
  EXPECT_THROW(ConvTranspose2d(Tensor::Zeros({1, 2, 2, 2}),
                               Tensor::Zeros({3, 1, 2, 2}), Tensor(), 2),
               ShapeError);
}

TEST(MaxPool2dTest, SingleWindowAndConstantInput) {
  Tensor x({1, 1, 2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(MaxPool2d(x, 2).item(), 4.0f);
  Tensor c = Tensor::Full({2, 3, 4, 6}, 0.25f);
  Tensor y = MaxPool2d(c, 2);
  ASSERT_EQ(y.shape(), (Shape{2, 3, 2, 3}));
  for (float v : y.data()) EXPECT_EQ(v, 0.25f);
}

TEST(MaxPool2dTest, MatchesLoopReferenceAndRoutesGradient) {
  Rng rng(31);
  TensorD x = RandomTensor<double>({1, 1, 6, 6}, rng);
  const auto ref = testing::NaiveMaxPool(x, 2);
  TensorD y = MaxPool2d(x, 2);
  ASSERT_EQ(y.numel(), static_cast<std::int64_t>(ref.values.size()));
  for (std::int64_t i = 0; i < y.numel(); ++i) EXPECT_EQ(y[i], ref.values[i]);

  TensorD g = RandomTensor<double>(y.shape(), rng);
  TensorD grad = TapeGradient([](const TensorD& v) { return MaxPool2d(v, 2); }, x, g);
  std::vector<double> expected(x.numel(), 0.0);
  for (std::size_t o = 0; o < ref.winners.size(); ++o) expected[ref.winners[o]] += g[o];
  for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_EQ(grad[i], expected[i]);
}

TEST(MaxPool2dTest, TiesRouteToFirstRowMajorElement) {
  TensorD x = TensorD::Full({1, 1, 2, 2}, 1.0);
  TensorD grad = TapeGradient([](const TensorD& v) { return MaxPool2d(v, 2); }, x,
                              TensorD::Full({1, 1, 1, 1}, 1.0));
  EXPECT_EQ(grad[0], 1.0);
  EXPECT_EQ(grad[1], 0.0);
  EXPECT_EQ(grad[2], 0.0);
  EXPECT_EQ(grad[3], 0.0);
}

TEST(MaxPool2dTest, RoutedGradientMassEqualsIncomingMass) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto h = 2 * (1 + static_cast<std::int64_t>(rng.UniformInt(4)));
    // Quantized values make ties common.
    TensorD x({2, 2, h, h});
    for (double& v : x.data()) v = static_cast<double>(rng.UniformInt(4));
    TensorD g = RandomTensor<double>({2, 2, h / 2, h / 2}, rng);
    TensorD grad = TapeGradient([](const TensorD& v) { return MaxPool2d(v, 2); }, x, g);
    double in = 0.0, out = 0.0;
    for (double v : g.data()) in += v;
    for (double v : grad.data()) out += v;
    EXPECT_NEAR(in, out, 1e-12);
  }
}

TEST(MaxPool2dTest, RejectsIndivisibleDims) {
  EXPECT_THROW(MaxPool2d(Tensor::Zeros({1, 1, 3, 4}), 2), ShapeError);
}

TEST(ActivationTest, ReluSigmoidSoftmaxValues) {
  Tensor r = Relu(Tensor::FromVector({-1.0f, 2.0f}));
  EXPECT_EQ(r[0], 0.0f);
  EXPECT_EQ(r[1], 2.0f);
  EXPECT_EQ(Sigmoid(Tensor::FromVector({0.0f}))[0], 0.5f);
  Tensor s = SoftmaxChannels(Tensor::Full({1, 2, 1, 1}, 3.0f));
  EXPECT_FLOAT_EQ(s[0], 0.5f);
  EXPECT_FLOAT_EQ(s[1], 0.5f);
}

TEST(ActivationTest, SigmoidStaysInOpenInterval) {
  Tensor s = Sigmoid(Tensor::FromVector({-30.0f, -5.0f, 5.0f, 15.0f}));
  for (float v : s.data()) {
    EXPECT_GT(v, 0.0f);
    EXPECT_LT(v, 1.0f);
  }
}

TEST(ActivationTest, SoftmaxSumsToOneAtEveryPixel) {
  Rng rng(41);
  Tensor x = RandomTensor<float>({3, 4, 5, 5}, rng, -20.0, 20.0);
  Tensor s = SoftmaxChannels(x);
  for (std::int64_t b = 0; b < 3; ++b) {
    for (std::int64_t i = 0; i < 25; ++i) {
      double total = 0.0;
      for (std::int64_t c = 0; c < 4; ++c) total += s[(b * 4 + c) * 25 + i];
      EXPECT_NEAR(total, 1.0, 1e-6);
    }
  }
}

TEST(ActivationTest, GradientsMatchFiniteDifferences) {
  Rng rng(42);
  TensorD x = RandomTensor<double>({2, 3, 3, 3}, rng, -2.0, 2.0);
  // Keep relu inputs away from the kink so the difference quotient is valid.
  TensorD away = x.Clone();
  for (double& v : away.data()) v = v < 0 ? v - 0.05 : v + 0.05;
  ExpectGradientMatches([](const TensorD& v) { return Relu(v); }, away, 1);
  ExpectGradientMatches([](const TensorD& v) { return Sigmoid(v); }, x, 2);
  ExpectGradientMatches([](const TensorD& v) { return SoftmaxChannels(v); }, x, 3);
}

TEST(ConcatTest, ChannelsOfFirstOperandComeFirst) {
  Rng rng(51);
  Tensor a = RandomTensor<float>({2, 1, 3, 3}, rng);
  Tensor b = RandomTensor<float>({2, 1, 3, 3}, rng);
  Tensor c = ConcatChannels(a, b);
  ASSERT_EQ(c.shape(), (Shape{2, 2, 3, 3}));
  Tensor a2 = SliceChannels(c, 0, 1), b2 = SliceChannels(c, 1, 2);
  for (std::int64_t i = 0; i < a.numel(); ++i) {
    EXPECT_EQ(a2[i], a[i]);
    EXPECT_EQ(b2[i], b[i]);
  }
  Tensor x = RandomTensor<float>({1, 3, 2, 2}, rng);
  Tensor back = SliceChannels(ConcatChannels(x, Tensor::Zeros({1, 2, 2, 2})), 0, 3);
  for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_EQ(back[i], x[i]);
}

TEST(ConcatTest, GradientSplitMatchesFiniteDifferences) {
  Rng rng(52);
  const TensorD a = RandomTensor<double>({2, 2, 3, 4}, rng);
  const TensorD b = RandomTensor<double>({2, 3, 3, 4}, rng);
  ExpectGradientMatches([&](const TensorD& v) { return ConcatChannels(v, b); }, a, 1);
  ExpectGradientMatches([&](const TensorD& v) { return ConcatChannels(a, v); }, b, 2);
}

TEST(ConcatTest, RejectsSpatialMismatch) {
  EXPECT_THROW(ConcatChannels(Tensor::Zeros({1, 1, 4, 4}), Tensor::Zeros({1, 1, 4, 2})),
               ShapeError);
}

ClassMap Labels(std::int64_t b, std::int64_t h, std::int64_t w, std::int32_t fill) {
  ClassMap m{b, h, w, std::vector<std::int32_t>(b * h * w, fill)};
  return m;
}

TEST(CrossEntropyTest, SaturatedCorrectPredictionIsNearZero) {
  Tensor logits = Tensor::Zeros({2, 2, 3, 3});
  for (std::int64_t b = 0; b < 2; ++b) {
    for (std::int64_t i = 0; i < 9; ++i) logits[(b * 2 + 1) * 9 + i] = 20.0f;
  }
  EXPECT_LT(CrossEntropyLoss(logits, Labels(2, 3, 3, 1)).item(), 1e-6f);
}

TEST(CrossEntropyTest, UniformLogitsGiveLogOfClassCount) {
  EXPECT_NEAR(CrossEntropyLoss(Tensor::Zeros({1, 2, 4, 4}), Labels(1, 4, 4, 0)).item(),
              std::numbers::ln2, 1e-6);
  EXPECT_NEAR(CrossEntropyLoss(TensorD::Full({2, 5, 2, 2}, 0.7), Labels(2, 2, 2, 3)).item(),
              std::log(5.0), 1e-12);
}

TEST(CrossEntropyTest, LossAndGradientMatchFiniteDifferences) {
  Rng rng(61);
  TensorD logits = RandomTensor<double>({1, 2, 4, 4}, rng, -3.0, 3.0);
  ClassMap y = Labels(1, 4, 4, 0);
  for (auto& v : y.values) v = static_cast<std::int32_t>(rng.UniformInt(2));

  double direct = 0.0;  // -log softmax written out per pixel
  for (std::int64_t i = 0; i < 16; ++i) {
    const double z0 = logits[i], z1 = logits[16 + i];
    const double zt = y.values[i] == 0 ? z0 : z1;
    direct += std::log(std::exp(z0) + std::exp(z1)) - zt;
  }
  EXPECT_NEAR(CrossEntropyLoss(logits, y).item(), direct / 16.0, 1e-12);

  TensorD input = logits.Clone();
  input.set_requires_grad(true);
  TapeD tape;
  TensorD loss;
  {
    TapeD::Recording rec(tape);
    loss = CrossEntropyLoss(input, y);
  }
  const TensorD grad = tape.Backward(loss, {input}).front();
  const auto numeric = CentralDifferences(
      [&](const TensorD& v) { return CrossEntropyLoss(v, y).item(); }, logits);
  for (std::int64_t i = 0; i < grad.numel(); ++i) {
    EXPECT_TRUE(GradientsAgree(grad[i], numeric[i], 1e-4)) << i;
  }
}

TEST(CrossEntropyTest, NonNegativeOnRandomInputs) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed);
    const auto c = 2 + static_cast<std::int64_t>(rng.UniformInt(4));
    Tensor logits = RandomTensor<float>({2, c, 3, 3}, rng, -10.0, 10.0);
    ClassMap y = Labels(2, 3, 3, 0);
    for (auto& v : y.values) v = static_cast<std::int32_t>(rng.UniformInt(c));
    EXPECT_GE(CrossEntropyLoss(logits, y).item(), 0.0f);
  }
}

TEST(CrossEntropyTest, RejectsBadTargets) {
  EXPECT_THROW(CrossEntropyLoss(Tensor::Zeros({1, 2, 2, 2}), Labels(1, 2, 2, 2)),
               InvalidArgument);
  EXPECT_THROW(CrossEntropyLoss(Tensor::Zeros({1, 2, 2, 2}), Labels(1, 2, 2, -1)),
               InvalidArgument);
  EXPECT_THROW(CrossEntropyLoss(Tensor::Zeros({1, 1, 2, 2}), Labels(1, 2, 2, 0)),
               ShapeError);
  EXPECT_THROW(CrossEntropyLoss(Tensor::Zeros({1, 2, 2, 2}), Labels(1, 3, 2, 0)),
               ShapeError);
}

TEST(BackwardTest, SumGivesOnes) {
  Tensor x = Tensor::FromVector({0.5f, -2.0f, 7.0f});
  x.set_requires_grad(true);
  Tape tape;
  Tensor loss;
  {
    Tape::Recording rec(tape);
    loss = Sum(x);
  }
  const Tensor g = tape.Backward(loss, {x}).front();
  for (float v : g.data()) EXPECT_EQ(v, 1.0f);
  EXPECT_TRUE(x.has_grad());
}

TEST(BackwardTest, SquareGivesTwiceInput) {
  Tensor x = Tensor::FromVector({1.0f, 2.0f});
  x.set_requires_grad(true);
  Tape tape;
  Tensor loss;
  {
    Tape::Recording rec(tape);
    loss = Sum(Mul(x, x));
  }
  const Tensor g = tape.Backward(loss, {x}).front();
  EXPECT_EQ(g[0], 2.0f);
  EXPECT_EQ(g[1], 4.0f);
}

TEST(BackwardTest, ScalingTheLossScalesTheGradient) {
  Rng rng(71);
  TensorD x = RandomTensor<double>({1, 1, 2, 3}, rng);
  x.set_requires_grad(true);
  TapeD tape;
  TensorD once, twice;
  {
    TapeD::Recording rec(tape);
    once = Sum(Mul(x, x));
    twice = Scale(once, 2.0);
  }
  const auto g1 = tape.Backward(once, {x}).front();
  const auto g2 = tape.Backward(twice, {x}).front();
  for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_EQ(g2[i], 2.0 * g1[i]);
}

TEST(BackwardTest, UnrelatedTensorIsAnError) {
  Tensor x = Tensor::FromVector({1.0f});
  x.set_requires_grad(true);
  Tensor stranger = Tensor::FromVector({3.0f});
  stranger.set_requires_grad(true);
  Tape tape;
  Tensor loss;
  {
    Tape::Recording rec(tape);
    loss = Sum(x);
  }
  EXPECT_THROW(tape.Backward(loss, {stranger}), TapeError);
  Tape other;
  EXPECT_THROW(other.Backward(loss, {x}), TapeError);
  EXPECT_THROW(tape.Backward(x.Reshaped({1, 1}), {x}), TapeError);
}

TEST(BackwardTest, NothingIsRecordedWithoutATapeOrGradInputs) {
  Tensor x = Tensor::FromVector({1.0f, 2.0f});
  Tape tape;
  {
    Tape::Recording rec(tape);
    Sum(Mul(x, x));  // x does not require grad
  }
  EXPECT_EQ(tape.size(), 0u);
  x.set_requires_grad(true);
  Sum(x);  // no active tape
  EXPECT_EQ(tape.size(), 0u);
}

TEST(BackwardTest, EntriesOffTheRequestedPathDoNotTouchOtherTensors) {
  Rng rng(72);
  Tensor w = RandomTensor<float>({2, 1, 3, 3}, rng);
  w.set_requires_grad(true);
  Tensor x = RandomTensor<float>({1, 1, 4, 4}, rng);
  x.set_requires_grad(true);
  Tape tape;
  Tensor loss;
  {
    Tape::Recording rec(tape);
    loss = Sum(Conv2d(x, w, Tensor(), 1, 1));
  }
  tape.Backward(loss, {x});
  EXPECT_FALSE(w.has_grad());
}

TEST(BackwardTest, ForwardAndBackwardAreBitReproducible) {
  Rng rng(73);
  Tensor x = RandomTensor<float>({3, 2, 8, 8}, rng);
  Tensor k = RandomTensor<float>({4, 2, 3, 3}, rng);
  k.set_requires_grad(true);
  auto run = [&] {
    Tape tape;
    Tensor loss;
    {
      Tape::Recording rec(tape);
      loss = Sum(MaxPool2d(Relu(Conv2d(x, k, Tensor(), 1, 1)), 2));
    }
    auto g = tape.Backward(loss, {k}).front();
    return std::pair(loss.item(), std::vector<float>(g.data().begin(), g.data().end()));
  };
  const auto first = run();
  const auto second = run();
  EXPECT_EQ(first.first, second.first);
  EXPECT_EQ(first.second, second.second);
}

TEST(SgdMomentumTest, PlainStepAndZeroGradient) {
  Tensor p = Tensor::FromVector({1.0f});
  Tensor g = Tensor::FromVector({1.0f});
  SgdMomentum plain(0.1, 0.0);
  std::vector<Tensor> ps{p};
  std::vector<Tensor> gs{g};
  plain.Step(ps, gs);
  EXPECT_FLOAT_EQ(p[0], 0.9f);

  Tensor q = Tensor::FromVector({0.3f, -4.0f});
  std::vector<Tensor> qs{q};
  std::vector<Tensor> zero{Tensor::Zeros({2})};
  SgdMomentum heavy(0.1, 0.99);
  heavy.Step(qs, zero);
  EXPECT_EQ(q[0], 0.3f);
  EXPECT_EQ(q[1], -4.0f);
}

TEST(SgdMomentumTest, TwoStepsFollowTheUnrolledRecurrence) {
  // v1 = g1, p1 = p0 - lr g1; v2 = mu g1 + g2, p2 = p1 - lr v2.
  const double lr = 0.1, mu = 0.99, p0 = 1.0, g1 = 0.5, g2 = -0.2;
  const double p1 = p0 - lr * g1;
  const double p2 = p1 - lr * (mu * g1 + g2);
  TensorD p = TensorD::FromVector({p0});
  std::vector<TensorD> ps{p};
  BasicSgdMomentum<double> opt(lr, mu);
  std::vector<TensorD> s1{TensorD::FromVector({g1})};
  opt.Step(ps, s1);
  EXPECT_DOUBLE_EQ(p[0], p1);
  std::vector<TensorD> s2{TensorD::FromVector({g2})};
  opt.Step(ps, s2);
  EXPECT_DOUBLE_EQ(p[0], p2);
  EXPECT_DOUBLE_EQ(opt.velocities()[0][0], mu * g1 + g2);
}

TEST(SgdMomentumTest, RejectsMismatchesAndBadHyperparameters) {
  EXPECT_THROW(SgdMomentum(0.0, 0.5), ConfigError);
  EXPECT_THROW(SgdMomentum(0.1, 1.0), ConfigError);
  SgdMomentum opt(0.1, 0.5);
  std::vector<Tensor> ps{Tensor::Zeros({3})};
  std::vector<Tensor> wrong{Tensor::Zeros({2})};
  EXPECT_THROW(opt.Step(ps, wrong), ShapeError);
  std::vector<Tensor> none;
  EXPECT_THROW(opt.Step(ps, none), ShapeError);
}

}  // namespace
}  // namespace advseg
