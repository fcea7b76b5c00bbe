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

#ifndef ADVSEG_TENSOR_H_
#define ADVSEG_TENSOR_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace advseg {

using Shape = std::vector<std::int64_t>;

std::int64_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

namespace internal {

// Shared storage behind a tensor handle. `grad` is empty until a backward
// pass writes into it.
template <typename T>
struct TensorNode {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;
  bool requires_grad = false;
};

}  // namespace internal

// Dense row-major tensor. Copies share storage (handle semantics), which is
// what lets the tape identify the same value across operations; use
// Clone() for an independent copy.
template <typename T>
class BasicTensor {
 public:
  using Scalar = T;
  using Node = internal::TensorNode<T>;

  // A null handle; defined() is false.
  BasicTensor() = default;

  explicit BasicTensor(Shape shape, T fill = T(0));
  BasicTensor(Shape shape, std::vector<T> data);

  static BasicTensor Zeros(Shape shape) { return BasicTensor(std::move(shape)); }
  static BasicTensor Full(Shape shape, T value) {
    return BasicTensor(std::move(shape), value);
  }
  // A 1-D tensor holding `values`.
  static BasicTensor FromVector(std::vector<T> values);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::int64_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t rank() const { return node_->shape.size(); }
  std::int64_t numel() const {
    return static_cast<std::int64_t>(node_->data.size());
  }

  std::span<T> data() { return node_->data; }
  std::span<const T> data() const { return node_->data; }
  T& operator[](std::int64_t i) { return node_->data[i]; }
  const T& operator[](std::int64_t i) const { return node_->data[i]; }
  // Value of a one-element tensor.
  T item() const;

  bool requires_grad() const { return node_->requires_grad; }
  BasicTensor& set_requires_grad(bool value) {
    node_->requires_grad = value;
    return *this;
  }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }

  // Deep copy of shape and data; the copy does not require grad.
  BasicTensor Clone() const;

  // Same data in a different shape; element count must match. The result
  // is a fresh tensor that does not participate in gradient tracking.
  BasicTensor Reshaped(Shape shape) const;

  template <typename U>
  BasicTensor<U> Cast() const {
    std::vector<U> out(node_->data.begin(), node_->data.end());
    return BasicTensor<U>(node_->shape, std::move(out));
  }

  bool AllFinite() const;

  // Storage identity, used by the tape.
  const std::shared_ptr<Node>& node() const { return node_; }
  static BasicTensor FromNode(std::shared_ptr<Node> node) {
    BasicTensor t;
    t.node_ = std::move(node);
    return t;
  }

 private:
  std::shared_ptr<Node> node_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

// Per-pixel class indices of shape [batch, height, width], the target of
// the segmentation loss.
struct ClassMap {
  std::int64_t batch = 0;
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<std::int32_t> values;

  std::int64_t size() const { return batch * height * width; }
};

extern template class BasicTensor<float>;
extern template class BasicTensor<double>;

}  // namespace advseg

#endif  // ADVSEG_TENSOR_H_
