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

#include "advseg/ops.h"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "advseg/error.h"
#include "advseg/parallel.h"

namespace advseg {
namespace {

template <typename T>
using RowMajor =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMajor<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMajor<T>>;

using Index = std::int64_t;

void RequireRank4(const Shape& s, const char* op, const char* what) {
  if (s.size() != 4) {
    throw ShapeError(std::string(op) + ": " + what + " must be 4-D, got " +
                     ShapeToString(s));
  }
}

// Unfolds a [C, H, W] image into a [C*k*k, Ho*Wo] matrix whose column p
// holds the receptive field of output position p.
template <typename T>
void Im2Col(const T* src, Index channels, Index height, Index width, Index k,
            Index stride, Index pad, Index out_h, Index out_w, T* col) {
  const Index plane = out_h * out_w;
  for (Index c = 0; c < channels; ++c) {
    const T* img = src + c * height * width;
    for (Index ky = 0; ky < k; ++ky) {
      for (Index kx = 0; kx < k; ++kx) {
        T* row = col + ((c * k + ky) * k + kx) * plane;
        for (Index oy = 0; oy < out_h; ++oy) {
          const Index iy = oy * stride - pad + ky;
          T* dst = row + oy * out_w;
          if (iy < 0 || iy >= height) {
            std::fill(dst, dst + out_w, T(0));
            continue;
          }
          const T* line = img + iy * width;
          for (Index ox = 0; ox < out_w; ++ox) {
            const Index ix = ox * stride - pad + kx;
            dst[ox] = (ix >= 0 && ix < width) ? line[ix] : T(0);
          }
        }
      }
    }
  }
}

// Transpose of Im2Col: accumulates columns back into a [C, H, W] image.
template <typename T>
void Col2Im(const T* col, Index channels, Index height, Index width, Index k,
            Index stride, Index pad, Index out_h, Index out_w, T* dst) {
  const Index plane = out_h * out_w;
  for (Index c = 0; c < channels; ++c) {
    T* img = dst + c * height * width;
    for (Index ky = 0; ky < k; ++ky) {
      for (Index kx = 0; kx < k; ++kx) {
        const T* row = col + ((c * k + ky) * k + kx) * plane;
        for (Index oy = 0; oy < out_h; ++oy) {
          const Index iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= height) continue;
          T* line = img + iy * width;
          const T* srow = row + oy * out_w;
          for (Index ox = 0; ox < out_w; ++ox) {
            const Index ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < width) line[ix] += srow[ox];
          }
        }
      }
    }
  }
}

// Adds per-sample partial results into `total` in sample order, keeping the
// reduction order fixed whatever the thread count.
template <typename T>
void AccumulateInOrder(const std::vector<std::vector<T>>& partials,
                       std::vector<T>& total) {
  for (const auto& p : partials) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += p[i];
  }
}

template <typename T>
void CheckBias(const BasicTensor<T>& bias, Index channels, const char* op) {
  if (bias.defined() &&
      (bias.rank() != 1 || bias.dim(0) != channels)) {
    throw ShapeError(std::string(op) + ": bias shape " +
                     ShapeToString(bias.shape()) + " does not match " +
                     std::to_string(channels) + " output channels");
  }
}

template <typename T>
std::vector<std::shared_ptr<internal::TensorNode<T>>> Nodes(
    std::initializer_list<const BasicTensor<T>*> ts) {
  std::vector<std::shared_ptr<internal::TensorNode<T>>> out;
  for (const BasicTensor<T>* t : ts) {
    if (t->defined()) out.push_back(t->node());
  }
  return out;
}

}  // namespace

template <typename T>
BasicTensor<T> Conv2d(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                      const BasicTensor<T>& bias, int stride, int padding) {
  RequireRank4(input.shape(), "conv2d", "input");
  RequireRank4(kernel.shape(), "conv2d", "kernel");
  if (stride < 1 || padding < 0) {
    throw InvalidArgument("conv2d: stride must be >= 1 and padding >= 0");
  }
  const Index batch = input.dim(0), cin = input.dim(1), h = input.dim(2),
              w = input.dim(3);
  const Index cout = kernel.dim(0), k = kernel.dim(2);
  if (kernel.dim(1) != cin) {
    throw ShapeError("conv2d: input has " + std::to_string(cin) +
                     " channels but kernel expects " +
                     std::to_string(kernel.dim(1)));
  }
  if (kernel.dim(3) != k) throw ShapeError("conv2d: kernel must be square");
  CheckBias(bias, cout, "conv2d");
  if (h + 2 * padding < k || w + 2 * padding < k) {
    throw ShapeError("conv2d: kernel larger than padded input");
  }
  const Index out_h = (h + 2 * padding - k) / stride + 1;
  const Index out_w = (w + 2 * padding - k) / stride + 1;
  if (out_h <= 0 || out_w <= 0) {
    throw ShapeError("conv2d: non-positive output size");
  }
  const Index q = cin * k * k, p = out_h * out_w;

  BasicTensor<T> out(Shape{batch, cout, out_h, out_w});
  const T* x = input.data().data();
  const T* wt = kernel.data().data();
  T* y = out.data().data();
  const T* bs = bias.defined() ? bias.data().data() : nullptr;
  ParallelFor(batch, [&](Index b) {
    std::vector<T> col(static_cast<std::size_t>(q * p));
    Im2Col(x + b * cin * h * w, cin, h, w, k, stride, padding, out_h, out_w,
           col.data());
    MatMap<T> ym(y + b * cout * p, cout, p);
    ym.noalias() = ConstMatMap<T>(wt, cout, q) * ConstMatMap<T>(col.data(), q, p);
    if (bs) {
      for (Index co = 0; co < cout; ++co) ym.row(co).array() += bs[co];
    }
  });

  if (BasicTape<T>::ShouldRecord({&input, &kernel, &bias})) {
    auto in_node = input.node();
    auto k_node = kernel.node();
    auto b_node = bias.defined() ? bias.node() : nullptr;
    auto out_node = out.node();
    auto backward = [=](std::span<const char> need) {
      const T* dy = out_node->grad.data();
      const T* xs = in_node->data.data();
      const T* ws = k_node->data.data();
      const bool need_x = need[0], need_w = need[1];
      const bool need_b = b_node && need[2];
      std::vector<std::vector<T>> dw_parts(need_w ? batch : 0);
      ParallelFor(batch, [&](Index b) {
        ConstMatMap<T> dym(dy + b * cout * p, cout, p);
        if (need_x) {
          RowMajor<T> dcol = ConstMatMap<T>(ws, cout, q).transpose() * dym;
          Col2Im(dcol.data(), cin, h, w, k, stride, padding, out_h, out_w,
                 in_node->grad.data() + b * cin * h * w);
        }
        if (need_w) {
          std::vector<T> col(static_cast<std::size_t>(q * p));
          Im2Col(xs + b * cin * h * w, cin, h, w, k, stride, padding, out_h,
                 out_w, col.data());
          auto& part = dw_parts[b];
          part.resize(static_cast<std::size_t>(cout * q));
          MatMap<T>(part.data(), cout, q).noalias() =
              dym * ConstMatMap<T>(col.data(), q, p).transpose();
        }
      });
      if (need_w) AccumulateInOrder(dw_parts, k_node->grad);
      if (need_b) {
        for (Index b = 0; b < batch; ++b) {
          for (Index co = 0; co < cout; ++co) {
            const T* row = dy + (b * cout + co) * p;
            T acc = 0;
            for (Index i = 0; i < p; ++i) acc += row[i];
            b_node->grad[co] += acc;
          }
        }
      }
    };
    BasicTape<T>::Active()->Push(Nodes<T>({&input, &kernel, &bias}), out_node,
                                 backward);
  }
  return out;
}

template <typename T>
BasicTensor<T> ConvTranspose2d(const BasicTensor<T>& input,
                               const BasicTensor<T>& kernel,
                               const BasicTensor<T>& bias, int stride) {
  RequireRank4(input.shape(), "conv_transpose2d", "input");
  RequireRank4(kernel.shape(), "conv_transpose2d", "kernel");
  if (stride < 1) throw InvalidArgument("conv_transpose2d: stride must be >= 1");
  const Index batch = input.dim(0), cin = input.dim(1), h = input.dim(2),
              w = input.dim(3);
  if (kernel.dim(0) != cin) {
    throw ShapeError("conv_transpose2d: input has " + std::to_string(cin) +
                     " channels but kernel expects " +
                     std::to_string(kernel.dim(0)));
  }
  const Index cout = kernel.dim(1), k = kernel.dim(2);
  if (kernel.dim(3) != k) {
    throw ShapeError("conv_transpose2d: kernel must be square");
  }
  CheckBias(bias, cout, "conv_transpose2d");
  const Index out_h = (h - 1) * stride + k;
  const Index out_w = (w - 1) * stride + k;
  const Index q = cout * k * k, p = h * w, out_plane = out_h * out_w;

  BasicTensor<T> out(Shape{batch, cout, out_h, out_w});
  const T* x = input.data().data();
  const T* wt = kernel.data().data();
  T* y = out.data().data();
  const T* bs = bias.defined() ? bias.data().data() : nullptr;
  ParallelFor(batch, [&](Index b) {
    RowMajor<T> cols = ConstMatMap<T>(wt, cin, q).transpose() *
                       ConstMatMap<T>(x + b * cin * p, cin, p);
    T* yb = y + b * cout * out_plane;
    Col2Im(cols.data(), cout, out_h, out_w, k, stride, 0, h, w, yb);
    if (bs) {
      for (Index co = 0; co < cout; ++co) {
        T* plane = yb + co * out_plane;
        for (Index i = 0; i < out_plane; ++i) plane[i] += bs[co];
      }
    }
  });

  if (BasicTape<T>::ShouldRecord({&input, &kernel, &bias})) {
    auto in_node = input.node();
    auto k_node = kernel.node();
    auto b_node = bias.defined() ? bias.node() : nullptr;
    auto out_node = out.node();
    auto backward = [=](std::span<const char> need) {
      const T* dy = out_node->grad.data();
      const T* xs = in_node->data.data();
      const T* ws = k_node->data.data();
      const bool need_x = need[0], need_w = need[1];
      const bool need_b = b_node && need[2];
      std::vector<std::vector<T>> dw_parts(need_w ? batch : 0);
      ParallelFor(batch, [&](Index b) {
        if (!need_x && !need_w) return;
        std::vector<T> dcol(static_cast<std::size_t>(q * p));
        Im2Col(dy + b * cout * out_plane, cout, out_h, out_w, k, stride, 0, h,
               w, dcol.data());
        ConstMatMap<T> dcolm(dcol.data(), q, p);
        if (need_x) {
          MatMap<T> dx(in_node->grad.data() + b * cin * p, cin, p);
          dx.noalias() += ConstMatMap<T>(ws, cin, q) * dcolm;
        }
        if (need_w) {
          auto& part = dw_parts[b];
          part.resize(static_cast<std::size_t>(cin * q));
          MatMap<T>(part.data(), cin, q).noalias() =
              ConstMatMap<T>(xs + b * cin * p, cin, p) * dcolm.transpose();
        }
      });
      if (need_w) AccumulateInOrder(dw_parts, k_node->grad);
      if (need_b) {
        for (Index b = 0; b < batch; ++b) {
          for (Index co = 0; co < cout; ++co) {
            const T* plane = dy + (b * cout + co) * out_plane;
            T acc = 0;
            for (Index i = 0; i < out_plane; ++i) acc += plane[i];
            b_node->grad[co] += acc;
          }
        }
      }
    };
    BasicTape<T>::Active()->Push(Nodes<T>({&input, &kernel, &bias}), out_node,
                                 backward);
  }
  return out;
}

template <typename T>
BasicTensor<T> MaxPool2d(const BasicTensor<T>& input, int window) {
  RequireRank4(input.shape(), "maxpool2d", "input");
  if (window < 1) throw InvalidArgument("maxpool2d: window must be >= 1");
  const Index batch = input.dim(0), c = input.dim(1), h = input.dim(2),
              w = input.dim(3);
  if (h % window != 0 || w % window != 0) {
    throw ShapeError("maxpool2d: spatial dims " + ShapeToString(input.shape()) +
                     " not divisible by window " + std::to_string(window));
  }
  const Index out_h = h / window, out_w = w / window;
  BasicTensor<T> out(Shape{batch, c, out_h, out_w});
  const Index planes = batch * c;
  // Flat input index of each output's winner.
  auto argmax = std::make_shared<std::vector<Index>>(
      static_cast<std::size_t>(planes * out_h * out_w));
  const T* x = input.data().data();
  T* y = out.data().data();
  for (Index pl = 0; pl < planes; ++pl) {
    const Index base = pl * h * w;
    for (Index oy = 0; oy < out_h; ++oy) {
      for (Index ox = 0; ox < out_w; ++ox) {
        Index best = base + (oy * window) * w + ox * window;
        for (Index ky = 0; ky < window; ++ky) {
          for (Index kx = 0; kx < window; ++kx) {
            const Index idx = base + (oy * window + ky) * w + ox * window + kx;
            if (x[idx] > x[best]) best = idx;
          }
        }
        const Index o = (pl * out_h + oy) * out_w + ox;
        y[o] = x[best];
        (*argmax)[o] = best;
      }
    }
  }
  if (BasicTape<T>::ShouldRecord({&input})) {
    auto in_node = input.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {in_node}, out_node, [=](std::span<const char>) {
          const auto& dy = out_node->grad;
          for (std::size_t o = 0; o < dy.size(); ++o) {
            in_node->grad[(*argmax)[o]] += dy[o];
          }
        });
  }
  return out;
}

template <typename T>
BasicTensor<T> Relu(const BasicTensor<T>& x) {
  BasicTensor<T> out(x.shape());
  auto xs = x.data();
  auto ys = out.data();
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = xs[i] > T(0) ? xs[i] : T(0);
  if (BasicTape<T>::ShouldRecord({&x})) {
    auto in_node = x.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {in_node}, out_node, [=](std::span<const char>) {
          const auto& dy = out_node->grad;
          const auto& xv = in_node->data;
          auto& dx = in_node->grad;
          for (std::size_t i = 0; i < dy.size(); ++i) {
            if (xv[i] > T(0)) dx[i] += dy[i];
          }
        });
  }
  return out;
}

template <typename T>
BasicTensor<T> Sigmoid(const BasicTensor<T>& x) {
  BasicTensor<T> out(x.shape());
  auto xs = x.data();
  auto ys = out.data();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const T v = xs[i];
    if (v >= T(0)) {
      ys[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      ys[i] = e / (T(1) + e);
    }
  }
  if (BasicTape<T>::ShouldRecord({&x})) {
    auto in_node = x.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {in_node}, out_node, [=](std::span<const char>) {
          const auto& dy = out_node->grad;
          const auto& s = out_node->data;
          auto& dx = in_node->grad;
          for (std::size_t i = 0; i < dy.size(); ++i) {
            dx[i] += dy[i] * s[i] * (T(1) - s[i]);
          }
        });
  }
  return out;
}

template <typename T>
BasicTensor<T> SoftmaxChannels(const BasicTensor<T>& x) {
  RequireRank4(x.shape(), "softmax_channels", "input");
  const Index batch = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  BasicTensor<T> out(x.shape());
  const T* xs = x.data().data();
  T* ys = out.data().data();
  for (Index b = 0; b < batch; ++b) {
    const T* xb = xs + b * c * plane;
    T* yb = ys + b * c * plane;
    for (Index i = 0; i < plane; ++i) {
      T m = xb[i];
      for (Index ch = 1; ch < c; ++ch) m = std::max(m, xb[ch * plane + i]);
      T total = 0;
      for (Index ch = 0; ch < c; ++ch) {
        const T e = std::exp(xb[ch * plane + i] - m);
        yb[ch * plane + i] = e;
        total += e;
      }
      for (Index ch = 0; ch < c; ++ch) yb[ch * plane + i] /= total;
    }
  }
  if (BasicTape<T>::ShouldRecord({&x})) {
    auto in_node = x.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {in_node}, out_node, [=](std::span<const char>) {
          const T* dy = out_node->grad.data();
          const T* s = out_node->data.data();
          T* dx = in_node->grad.data();
          for (Index b = 0; b < batch; ++b) {
            const Index off = b * c * plane;
            for (Index i = 0; i < plane; ++i) {
              T dot = 0;
              for (Index ch = 0; ch < c; ++ch) {
                dot += dy[off + ch * plane + i] * s[off + ch * plane + i];
              }
              for (Index ch = 0; ch < c; ++ch) {
                const Index j = off + ch * plane + i;
                dx[j] += s[j] * (dy[j] - dot);
              }
            }
          }
        });
  }
  return out;
}

template <typename T>
BasicTensor<T> ConcatChannels(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  RequireRank4(a.shape(), "concat_channels", "first operand");
  RequireRank4(b.shape(), "concat_channels", "second operand");
  if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3)) {
    throw ShapeError("concat_channels: " + ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
  }
  const Index batch = a.dim(0), ca = a.dim(1), cb = b.dim(1),
              plane = a.dim(2) * a.dim(3);
  BasicTensor<T> out(Shape{batch, ca + cb, a.dim(2), a.dim(3)});
  const T* as = a.data().data();
  const T* bs = b.data().data();
  T* ys = out.data().data();
  for (Index n = 0; n < batch; ++n) {
    T* dst = ys + n * (ca + cb) * plane;
    std::copy_n(as + n * ca * plane, ca * plane, dst);
    std::copy_n(bs + n * cb * plane, cb * plane, dst + ca * plane);
  }
  if (BasicTape<T>::ShouldRecord({&a, &b})) {
    auto a_node = a.node();
    auto b_node = b.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {a_node, b_node}, out_node, [=](std::span<const char> need) {
          const T* dy = out_node->grad.data();
          for (Index n = 0; n < batch; ++n) {
            const T* src = dy + n * (ca + cb) * plane;
            if (need[0]) {
              T* da = a_node->grad.data() + n * ca * plane;
              for (Index i = 0; i < ca * plane; ++i) da[i] += src[i];
            }
            if (need[1]) {
              T* db = b_node->grad.data() + n * cb * plane;
              for (Index i = 0; i < cb * plane; ++i) db[i] += src[ca * plane + i];
            }
          }
        });
  }
  return out;
}

template <typename T>
BasicTensor<T> SliceChannels(const BasicTensor<T>& x, Index begin, Index end) {
  RequireRank4(x.shape(), "slice_channels", "input");
  if (begin < 0 || end > x.dim(1) || begin >= end) {
    throw InvalidArgument("slice_channels: bad range [" + std::to_string(begin) +
                          ", " + std::to_string(end) + ")");
  }
  const Index batch = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  const Index width = end - begin;
  BasicTensor<T> out(Shape{batch, width, x.dim(2), x.dim(3)});
  for (Index n = 0; n < batch; ++n) {
    std::copy_n(x.data().data() + (n * c + begin) * plane, width * plane,
                out.data().data() + n * width * plane);
  }
  if (BasicTape<T>::ShouldRecord({&x})) {
    auto in_node = x.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {in_node}, out_node, [=](std::span<const char>) {
          for (Index n = 0; n < batch; ++n) {
            const T* src = out_node->grad.data() + n * width * plane;
            T* dst = in_node->grad.data() + (n * c + begin) * plane;
            for (Index i = 0; i < width * plane; ++i) dst[i] += src[i];
          }
        });
  }
  return out;
}

template <typename T>
BasicTensor<T> CrossEntropyLoss(const BasicTensor<T>& logits,
                                const ClassMap& target) {
  RequireRank4(logits.shape(), "cross_entropy_loss", "logits");
  const Index batch = logits.dim(0), c = logits.dim(1),
              plane = logits.dim(2) * logits.dim(3);
  if (c < 2) throw ShapeError("cross_entropy_loss: need at least 2 classes");
  if (target.batch != batch || target.height != logits.dim(2) ||
      target.width != logits.dim(3) ||
      static_cast<Index>(target.values.size()) != target.size()) {
    throw ShapeError("cross_entropy_loss: target shape does not match logits " +
                     ShapeToString(logits.shape()));
  }
  for (std::int32_t v : target.values) {
    if (v < 0 || v >= c) {
      throw InvalidArgument("cross_entropy_loss: class index " +
                            std::to_string(v) + " outside [0, " +
                            std::to_string(c) + ")");
    }
  }
  const Index count = batch * plane;
  const T* xs = logits.data().data();
  auto probs = std::make_shared<std::vector<T>>(logits.data().size());
  T total = 0;
  for (Index b = 0; b < batch; ++b) {
    const T* xb = xs + b * c * plane;
    T* pb = probs->data() + b * c * plane;
    for (Index i = 0; i < plane; ++i) {
      T m = xb[i];
      for (Index ch = 1; ch < c; ++ch) m = std::max(m, xb[ch * plane + i]);
      T z = 0;
      for (Index ch = 0; ch < c; ++ch) {
        const T e = std::exp(xb[ch * plane + i] - m);
        pb[ch * plane + i] = e;
        z += e;
      }
      for (Index ch = 0; ch < c; ++ch) pb[ch * plane + i] /= z;
      const std::int32_t cls = target.values[b * plane + i];
      total += std::log(z) + m - xb[cls * plane + i];
    }
  }
  BasicTensor<T> out(Shape{}, total / static_cast<T>(count));
  if (BasicTape<T>::ShouldRecord({&logits})) {
    auto in_node = logits.node();
    auto out_node = out.node();
    auto labels = std::make_shared<std::vector<std::int32_t>>(target.values);
    BasicTape<T>::Active()->Push(
        {in_node}, out_node, [=](std::span<const char>) {
          const T g = out_node->grad[0] / static_cast<T>(count);
          T* dx = in_node->grad.data();
          const T* pr = probs->data();
          for (Index b = 0; b < batch; ++b) {
            for (Index ch = 0; ch < c; ++ch) {
              const Index off = (b * c + ch) * plane;
              for (Index i = 0; i < plane; ++i) {
                const T onehot = (*labels)[b * plane + i] == ch ? T(1) : T(0);
                dx[off + i] += g * (pr[off + i] - onehot);
              }
            }
          }
        });
  }
  return out;
}

template <typename T>
BasicTensor<T> Sum(const BasicTensor<T>& x) {
  T total = 0;
  for (T v : x.data()) total += v;
  BasicTensor<T> out(Shape{}, total);
  if (BasicTape<T>::ShouldRecord({&x})) {
    auto in_node = x.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {in_node}, out_node, [=](std::span<const char>) {
          const T g = out_node->grad[0];
          for (T& d : in_node->grad) d += g;
        });
  }
  return out;
}

namespace {

template <typename T>
void RequireSameShape(const BasicTensor<T>& a, const BasicTensor<T>& b,
                      const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": " + ShapeToString(a.shape()) +
                     " vs " + ShapeToString(b.shape()));
  }
}

}  // namespace

template <typename T>
BasicTensor<T> Add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  RequireSameShape(a, b, "add");
  BasicTensor<T> out(a.shape());
  for (Index i = 0; i < a.numel(); ++i) out[i] = a[i] + b[i];
  if (BasicTape<T>::ShouldRecord({&a, &b})) {
    auto a_node = a.node();
    auto b_node = b.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {a_node, b_node}, out_node, [=](std::span<const char> need) {
          const auto& dy = out_node->grad;
          for (std::size_t i = 0; i < dy.size(); ++i) {
            if (need[0]) a_node->grad[i] += dy[i];
            if (need[1]) b_node->grad[i] += dy[i];
          }
        });
  }
  return out;
}

template <typename T>
BasicTensor<T> Mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  RequireSameShape(a, b, "mul");
  BasicTensor<T> out(a.shape());
  for (Index i = 0; i < a.numel(); ++i) out[i] = a[i] * b[i];
  if (BasicTape<T>::ShouldRecord({&a, &b})) {
    auto a_node = a.node();
    auto b_node = b.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {a_node, b_node}, out_node, [=](std::span<const char> need) {
          const auto& dy = out_node->grad;
          // a and b may be the same node; both contributions are needed.
          for (std::size_t i = 0; i < dy.size(); ++i) {
            const T av = a_node->data[i], bv = b_node->data[i];
            if (need[0]) a_node->grad[i] += dy[i] * bv;
            if (need[1]) b_node->grad[i] += dy[i] * av;
          }
        });
  }
  return out;
}

template <typename T>
BasicTensor<T> Scale(const BasicTensor<T>& x, T factor) {
  BasicTensor<T> out(x.shape());
  for (Index i = 0; i < x.numel(); ++i) out[i] = x[i] * factor;
  if (BasicTape<T>::ShouldRecord({&x})) {
    auto in_node = x.node();
    auto out_node = out.node();
    BasicTape<T>::Active()->Push(
        {in_node}, out_node, [=](std::span<const char>) {
          const auto& dy = out_node->grad;
          for (std::size_t i = 0; i < dy.size(); ++i) {
            in_node->grad[i] += dy[i] * factor;
          }
        });
  }
  return out;
}

#define ADVSEG_INSTANTIATE_OPS(T)                                              \
  template BasicTensor<T> Conv2d(const BasicTensor<T>&, const BasicTensor<T>&, \
                                 const BasicTensor<T>&, int, int);             \
  template BasicTensor<T> ConvTranspose2d(                                     \
      const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&,     \
      int);                                                                    \
  template BasicTensor<T> MaxPool2d(const BasicTensor<T>&, int);               \
  template BasicTensor<T> Relu(const BasicTensor<T>&);                         \
  template BasicTensor<T> Sigmoid(const BasicTensor<T>&);                      \
  template BasicTensor<T> SoftmaxChannels(const BasicTensor<T>&);              \
  template BasicTensor<T> ConcatChannels(const BasicTensor<T>&,                \
                                         const BasicTensor<T>&);               \
  template BasicTensor<T> SliceChannels(const BasicTensor<T>&, Index, Index); \
  template BasicTensor<T> CrossEntropyLoss(const BasicTensor<T>&,              \
                                           const ClassMap&);                   \
  template BasicTensor<T> Sum(const BasicTensor<T>&);                          \
  template BasicTensor<T> Add(const BasicTensor<T>&, const BasicTensor<T>&);   \
  template BasicTensor<T> Mul(const BasicTensor<T>&, const BasicTensor<T>&);   \
  template BasicTensor<T> Scale(const BasicTensor<T>&, T);

ADVSEG_INSTANTIATE_OPS(float)
ADVSEG_INSTANTIATE_OPS(double)

#undef ADVSEG_INSTANTIATE_OPS

}  // namespace advseg
