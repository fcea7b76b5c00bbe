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

#ifndef ADVSEG_OPS_H_
#define ADVSEG_OPS_H_

#include "advseg/tape.h"
#include "advseg/tensor.h"

namespace advseg {

// Every op below records itself on the active tape when at least one input
// requires grad; otherwise it is a plain forward computation. All ops are
// available in float and double.

// Cross-correlation (no kernel flip).
//   input  [B, Cin, H, W]
//   kernel [Cout, Cin, k, k]
//   bias   [Cout] or undefined
// Output is [B, Cout, (H + 2p - k)/s + 1, (W + 2p - k)/s + 1].
template <typename T>
BasicTensor<T> Conv2d(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                      const BasicTensor<T>& bias, int stride = 1,
                      int padding = 0);

// Adjoint of Conv2d with zero padding, i.e. the gradient of Conv2d with
// respect to its input, used as an upsampling layer.
//   input  [B, Cin, H, W]
//   kernel [Cin, Cout, k, k]
//   bias   [Cout] or undefined
// Output is [B, Cout, (H - 1)s + k, (W - 1)s + k]; 2H x 2W when k = s = 2.
template <typename T>
BasicTensor<T> ConvTranspose2d(const BasicTensor<T>& input,
                               const BasicTensor<T>& kernel,
                               const BasicTensor<T>& bias, int stride);

// Non-overlapping max pooling. Ties go to the first element in row-major
// order within the window, and so does the gradient.
template <typename T>
BasicTensor<T> MaxPool2d(const BasicTensor<T>& input, int window = 2);

template <typename T>
BasicTensor<T> Relu(const BasicTensor<T>& x);

template <typename T>
BasicTensor<T> Sigmoid(const BasicTensor<T>& x);

// Softmax over axis 1 of a [B, C, H, W] tensor.
template <typename T>
BasicTensor<T> SoftmaxChannels(const BasicTensor<T>& x);

// [B, C1, H, W] ++ [B, C2, H, W] -> [B, C1 + C2, H, W]; a's channels first.
template <typename T>
BasicTensor<T> ConcatChannels(const BasicTensor<T>& a, const BasicTensor<T>& b);

// Channels [begin, end) of a [B, C, H, W] tensor.
template <typename T>
BasicTensor<T> SliceChannels(const BasicTensor<T>& x, std::int64_t begin,
                             std::int64_t end);

// Mean over all B*H*W pixels of -log softmax(logits)[target].
template <typename T>
BasicTensor<T> CrossEntropyLoss(const BasicTensor<T>& logits,
                                const ClassMap& target);

template <typename T>
BasicTensor<T> Sum(const BasicTensor<T>& x);

template <typename T>
BasicTensor<T> Add(const BasicTensor<T>& a, const BasicTensor<T>& b);

// Elementwise product of equal-shaped tensors.
template <typename T>
BasicTensor<T> Mul(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> Scale(const BasicTensor<T>& x, T factor);

}  // namespace advseg

#endif  // ADVSEG_OPS_H_
