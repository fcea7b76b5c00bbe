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

#ifndef ADVSEG_OPTIM_H_
#define ADVSEG_OPTIM_H_

#include <span>
#include <vector>

#include "advseg/tensor.h"

namespace advseg {

// SGD with classical momentum:
//   v <- momentum * v + grad
//   p <- p - learning_rate * v
// Velocity buffers are created zeroed on the first Step and must keep
// matching the parameter shapes afterwards.
template <typename T>
class BasicSgdMomentum {
 public:
  BasicSgdMomentum(double learning_rate, double momentum);

  void Step(std::span<BasicTensor<T>> params,
            std::span<const BasicTensor<T>> grads);

  double learning_rate() const { return learning_rate_; }
  double momentum() const { return momentum_; }
  const std::vector<std::vector<T>>& velocities() const { return velocities_; }

 private:
  double learning_rate_;
  double momentum_;
  std::vector<std::vector<T>> velocities_;
};

using SgdMomentum = BasicSgdMomentum<float>;

extern template class BasicSgdMomentum<float>;
extern template class BasicSgdMomentum<double>;

}  // namespace advseg

#endif  // ADVSEG_OPTIM_H_
