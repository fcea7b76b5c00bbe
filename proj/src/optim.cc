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

#include "advseg/optim.h"

#include <string>

#include "advseg/error.h"

namespace advseg {

template <typename T>
BasicSgdMomentum<T>::BasicSgdMomentum(double learning_rate, double momentum)
    : learning_rate_(learning_rate), momentum_(momentum) {
  if (!(learning_rate > 0.0)) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
}

template <typename T>
void BasicSgdMomentum<T>::Step(std::span<BasicTensor<T>> params,
                               std::span<const BasicTensor<T>> grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("sgd: " + std::to_string(params.size()) +
                     " parameters but " + std::to_string(grads.size()) +
                     " gradients");
  }
  if (velocities_.empty()) {
    velocities_.reserve(params.size());
    for (const auto& p : params) velocities_.emplace_back(p.data().size(), T(0));
  }
  if (velocities_.size() != params.size()) {
    throw ShapeError("sgd: parameter count changed between steps");
  }
  const T lr = static_cast<T>(learning_rate_);
  const T mu = static_cast<T>(momentum_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].data();
    auto g = grads[i].data();
    auto& v = velocities_[i];
    if (g.size() != p.size() || v.size() != p.size()) {
      throw ShapeError("sgd: shape mismatch for parameter #" +
                       std::to_string(i));
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      v[j] = mu * v[j] + g[j];
      p[j] -= lr * v[j];
    }
  }
}

template class BasicSgdMomentum<float>;
template class BasicSgdMomentum<double>;

}  // namespace advseg
