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

#include "advseg/tensor.h"

#include <cmath>
#include <sstream>

#include "advseg/error.h"

namespace advseg {

std::int64_t NumElements(const Shape& shape) {
  std::int64_t n = 1;
  for (std::int64_t d : shape) {
    if (d < 0) throw ShapeError("negative dimension in " + ShapeToString(shape));
    n *= d;
  }
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, T fill)
    : node_(std::make_shared<Node>()) {
  const std::int64_t n = NumElements(shape);
  node_->shape = std::move(shape);
  node_->data.assign(static_cast<std::size_t>(n), fill);
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data)
    : node_(std::make_shared<Node>()) {
  if (NumElements(shape) != static_cast<std::int64_t>(data.size())) {
    throw ShapeError("data length " + std::to_string(data.size()) +
                     " does not match shape " + ShapeToString(shape));
  }
  node_->shape = std::move(shape);
  node_->data = std::move(data);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::FromVector(std::vector<T> values) {
  const auto n = static_cast<std::int64_t>(values.size());
  return BasicTensor(Shape{n}, std::move(values));
}

template <typename T>
T BasicTensor<T>::item() const {
  if (numel() != 1) {
    throw ShapeError("item() on tensor of shape " + ShapeToString(shape()));
  }
  return node_->data[0];
}

template <typename T>
BasicTensor<T> BasicTensor<T>::Clone() const {
  return BasicTensor(node_->shape, node_->data);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::Reshaped(Shape shape) const {
  return BasicTensor(std::move(shape), node_->data);
}

template <typename T>
bool BasicTensor<T>::AllFinite() const {
  for (T v : node_->data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template class BasicTensor<float>;
template class BasicTensor<double>;

}  // namespace advseg
