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

// Test-only oracles: naive loop references and a central-difference
// gradient checker. Nothing here calls into the library's kernels.

#ifndef ADVSEG_TESTS_ORACLES_H_
#define ADVSEG_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "advseg/ops.h"
#include "advseg/random.h"
#include "advseg/tape.h"
#include "advseg/tensor.h"
#include "advseg/unet.h"

namespace advseg::testing {

template <typename T>
BasicTensor<T> RandomTensor(Shape shape, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  BasicTensor<T> t(std::move(shape));
  for (T& v : t.data()) v = static_cast<T>(rng.Uniform(lo, hi));
  return t;
}

// Six nested loops of textbook cross-correlation.
inline std::vector<double> NaiveConv2d(const TensorD& x, const TensorD& k,
                                       const TensorD& bias, int stride,
                                       int pad, Shape* out_shape) {
  const auto B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const auto O = k.dim(0), K = k.dim(2);
  const auto Ho = (H + 2 * pad - K) / stride + 1, Wo = (W + 2 * pad - K) / stride + 1;
  *out_shape = {B, O, Ho, Wo};
  std::vector<double> y(B * O * Ho * Wo, 0.0);
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t o = 0; o < O; ++o)
      for (std::int64_t oy = 0; oy < Ho; ++oy)
        for (std::int64_t ox = 0; ox < Wo; ++ox) {
          double acc = bias.defined() ? bias[o] : 0.0;
          for (std::int64_t c = 0; c < C; ++c)
            for (std::int64_t ky = 0; ky < K; ++ky)
              for (std::int64_t kx = 0; kx < K; ++kx) {
                const auto iy = oy * stride - pad + ky, ix = ox * stride - pad + kx;
                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                acc += x[((b * C + c) * H + iy) * W + ix] *
                       k[((o * C + c) * K + ky) * K + kx];
              }
          y[((b * O + o) * Ho + oy) * Wo + ox] = acc;
        }
  return y;
}

// d/dx of sum(y * conv2d(x, k)) with zero padding, written as a scatter
// over every (output, tap) pair: a direct statement of the transpose of
// convolution.
inline std::vector<double> NaiveConv2dAdjoint(const TensorD& y, const TensorD& k,
                                              int stride, std::int64_t H,
                                              std::int64_t W) {
  const auto B = y.dim(0), O = y.dim(1), Ho = y.dim(2), Wo = y.dim(3);
  const auto C = k.dim(1), K = k.dim(2);
  std::vector<double> x(B * C * H * W, 0.0);
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t o = 0; o < O; ++o)
      for (std::int64_t oy = 0; oy < Ho; ++oy)
        for (std::int64_t ox = 0; ox < Wo; ++ox)
          for (std::int64_t c = 0; c < C; ++c)
            for (std::int64_t ky = 0; ky < K; ++ky)
              for (std::int64_t kx = 0; kx < K; ++kx) {
                const auto iy = oy * stride + ky, ix = ox * stride + kx;
                if (iy >= H || ix >= W) continue;
                x[((b * C + c) * H + iy) * W + ix] +=
                    y[((b * O + o) * Ho + oy) * Wo + ox] *
                    k[((o * C + c) * K + ky) * K + kx];
              }
  return x;
}

struct NaivePool {
  std::vector<double> values;
  std::vector<std::int64_t> winners;  // flat input index per output
};

inline NaivePool NaiveMaxPool(const TensorD& x, int window) {
  const auto B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  NaivePool p;
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t c = 0; c < C; ++c)
      for (std::int64_t oy = 0; oy < H / window; ++oy)
        for (std::int64_t ox = 0; ox < W / window; ++ox) {
          std::int64_t best = -1;
          for (std::int64_t ky = 0; ky < window; ++ky)
            for (std::int64_t kx = 0; kx < window; ++kx) {
              const auto idx =
                  ((b * C + c) * H + oy * window + ky) * W + ox * window + kx;
              if (best < 0 || x[idx] > x[best]) best = idx;
            }
          p.values.push_back(x[best]);
          p.winners.push_back(best);
        }
  return p;
}

// Central differences of a scalar function of one tensor, evaluated at the
// listed flat indices (all of them when `indices` is empty).
inline std::vector<double> CentralDifferences(
    const std::function<double(const TensorD&)>& f, const TensorD& x,
    double step = 1e-3, std::vector<std::int64_t> indices = {}) {
  if (indices.empty()) {
    for (std::int64_t i = 0; i < x.numel(); ++i) indices.push_back(i);
  }
  std::vector<double> out;
  TensorD probe = x.Clone();
  for (std::int64_t i : indices) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double up = f(probe);
    probe[i] = orig - step;
    const double down = f(probe);
    probe[i] = orig;
    out.push_back((up - down) / (2.0 * step));
  }
  return out;
}

// Relative error, with an absolute floor for components too small for a
// relative comparison to mean anything.
inline bool GradientsAgree(double analytic, double numeric, double rel_tol,
                           double floor = 1e-6) {
  if (std::abs(analytic) <= floor) return std::abs(analytic - numeric) <= 10 * floor;
  const double denom = std::max(std::abs(analytic), std::abs(numeric));
  return std::abs(analytic - numeric) / denom < rel_tol;
}

// Autodiff against central differences for the whole network loss, on
// `samples` random input components and as many parameter entries.
//
// With a single scalar varied, every layer is piecewise linear in it, so the
// logits are too; only the loss on top is curved. A stencil that straddles a
// relu or pooling switch shows up as a nonzero second difference of the
// logits. Those components are redrawn; that test never consults autodiff.
struct EndToEndCheck {
  int compared = 0;
  int mismatched = 0;
  int redrawn = 0;
  double worst_relative = 0.0;
};

inline EndToEndCheck CheckUNetGradients(const UNetD& model, const TensorD& x,
                                        const ClassMap& y, int samples,
                                        std::uint64_t seed, double rel_tol,
                                        double step = 1e-3) {
  TensorD input = x.Clone();
  input.set_requires_grad(true);
  std::vector<TensorD> wrt{input};
  for (const auto& p : model.parameters()) wrt.push_back(p);
  TapeD tape;
  TensorD loss;
  {
    TapeD::Recording rec(tape);
    loss = CrossEntropyLoss(model.Forward(input), y);
  }
  const auto grads = tape.Backward(loss, wrt);

  EndToEndCheck result;
  // `target` is either the probe input or a live model parameter.
  TensorD xin = x.Clone();
  auto logits_at = [&](TensorD& target, std::int64_t i, double v) {
    const double orig = target[i];
    target[i] = v;
    TensorD logits = model.Forward(xin);
    target[i] = orig;
    return logits;
  };
  // Returns false when the stencil crosses a kink.
  auto probe = [&](TensorD target, const TensorD& analytic, std::int64_t i) {
    const double c = target[i];
    const TensorD mid = logits_at(target, i, c);
    const TensorD up = logits_at(target, i, c + step);
    const TensorD down = logits_at(target, i, c - step);
    double bend = 0.0, scale = 1.0;
    for (std::int64_t j = 0; j < mid.numel(); ++j) {
      bend = std::max(bend, std::abs(up[j] + down[j] - 2 * mid[j]));
      scale = std::max(scale, std::abs(mid[j]));
    }
    if (bend > 1e-10 * scale) return false;
    const double numeric =
        (CrossEntropyLoss(up, y).item() - CrossEntropyLoss(down, y).item()) / (2 * step);
    const double a = analytic[i];
    ++result.compared;
    if (!GradientsAgree(a, numeric, rel_tol)) ++result.mismatched;
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
    result.worst_relative = std::max(result.worst_relative, std::abs(a - numeric) / denom);
    return true;
  };

  Rng rng(seed);
  auto pick = [&rng](std::uint64_t n) { return static_cast<std::int64_t>(rng.UniformInt(n)); };
  const int max_attempts = 50 * samples;
  for (int done = 0, tries = 0; done < samples && tries < max_attempts; ++tries) {
    if (probe(xin, grads[0], pick(x.numel()))) {
      ++done;
    } else {
      ++result.redrawn;
    }
  }
  for (int done = 0, tries = 0; done < samples && tries < max_attempts; ++tries) {
    const auto p = 1 + pick(model.parameters().size());
    TensorD param = model.parameters()[p - 1];
    if (probe(param, grads[p], pick(param.numel()))) {
      ++done;
    } else {
      ++result.redrawn;
    }
  }
  return result;
}

// Central difference of the network loss along input component `i`, or
// nothing when the stencil crosses a kink (see CheckUNetGradients).
inline std::optional<double> SmoothInputDifference(const UNetD& model, const TensorD& x,
                                                   const ClassMap& y, std::int64_t i,
                                                   double step = 1e-3) {
  TensorD v = x.Clone();
  const TensorD mid = model.Forward(v);
  v[i] = x[i] + step;
  const TensorD up = model.Forward(v);
  v[i] = x[i] - step;
  const TensorD down = model.Forward(v);
  double bend = 0.0, scale = 1.0;
  for (std::int64_t j = 0; j < mid.numel(); ++j) {
    bend = std::max(bend, std::abs(up[j] + down[j] - 2 * mid[j]));
    scale = std::max(scale, std::abs(mid[j]));
  }
  if (bend > 1e-10 * scale) return std::nullopt;
  return (CrossEntropyLoss(up, y).item() - CrossEntropyLoss(down, y).item()) / (2 * step);
}

}  // namespace advseg::testing

#endif  // ADVSEG_TESTS_ORACLES_H_
