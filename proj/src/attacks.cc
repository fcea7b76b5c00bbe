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

#include "advseg/attacks.h"

#include <algorithm>
#include <cmath>

#include "advseg/error.h"
#include "advseg/ops.h"
#include "advseg/tape.h"

namespace advseg {

void AttackConfig::Validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("attack epsilon must be a finite value >= 0");
  }
  if (!(clip_min < clip_max)) throw ConfigError("attack needs clip_min < clip_max");
}

SegmentationSample AdversarialExample::ToSample() const {
  SegmentationSample s;
  s.image = image;
  s.mask = mask;
  s.id = source_id + "_" + std::string(ToString(direction));
  return s;
}

template <typename T>
BasicTensor<T> InputGradient(const BasicUNet<T>& model, const BasicTensor<T>& x,
                             const ClassMap& y) {
  BasicTensor<T> input = x.Clone();
  input.set_requires_grad(true);
  BasicTape<T> tape;
  BasicTensor<T> loss;
  {
    typename BasicTape<T>::Recording rec(tape);
    loss = CrossEntropyLoss(model.Forward(input), y);
  }
  return tape.Backward(loss, {input}).front();
}

template Tensor InputGradient(const UNet&, const Tensor&, const ClassMap&);
template TensorD InputGradient(const UNetD&, const TensorD&, const ClassMap&);

std::vector<Tensor> DatasetInputGradients(const UNet& model,
                                          const Dataset& dataset,
                                          int batch_size) {
  if (dataset.empty()) throw InvalidArgument("cannot attack an empty dataset");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  std::vector<Tensor> out;
  out.reserve(dataset.size());
  const std::size_t n = dataset.size();
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t end = std::min(n, begin + static_cast<std::size_t>(batch_size));
    std::vector<const SegmentationSample*> batch;
    for (std::size_t i = begin; i < end; ++i) batch.push_back(&dataset.samples[i]);
    const Tensor grad = InputGradient(model, StackImages(batch), StackMasks(batch));
    const Shape& one = dataset.samples[begin].image.shape();
    const std::int64_t per = NumElements(one);
    for (std::size_t i = begin; i < end; ++i) {
      Tensor g(one);
      std::copy_n(grad.data().data() + static_cast<std::int64_t>(i - begin) * per,
                  per, g.data().data());
      out.push_back(std::move(g));
    }
  }
  return out;
}

Tensor SignStep(const Tensor& grad, const AttackConfig& config) {
  config.Validate();
  const float eps = static_cast<float>(config.epsilon);
  const float step =
      config.direction == AttackDirection::kAscent ? eps : -eps;
  Tensor out(grad.shape());
  auto g = grad.data();
  auto d = out.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    d[i] = g[i] > 0.0f ? step : (g[i] < 0.0f ? -step : 0.0f);
  }
  return out;
}

Tensor Perturb(const Tensor& x, const Tensor& grad, const AttackConfig& config) {
  if (x.shape() != grad.shape()) {
    throw ShapeError("perturb: input " + ShapeToString(x.shape()) +
                     " vs gradient " + ShapeToString(grad.shape()));
  }
  const Tensor step = SignStep(grad, config);
  const float lo = static_cast<float>(config.clip_min);
  const float hi = static_cast<float>(config.clip_max);
  Tensor out(x.shape());
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    out[i] = std::clamp(x[i] + step[i], lo, hi);
  }
  return out;
}

AdversarialExample Craft(const UNet& model, const SegmentationSample& sample,
                         const AttackConfig& config, std::size_t source_index) {
  config.Validate();
  const SegmentationSample* one[] = {&sample};
  const Tensor grad = InputGradient(model, StackImages(one), StackMasks(one));
  AdversarialExample ex;
  ex.image = Perturb(sample.image, grad.Reshaped(sample.image.shape()), config);
  ex.mask = sample.mask;
  ex.source_index = source_index;
  ex.source_id = sample.id;
  ex.epsilon_used = config.epsilon;
  ex.direction = config.direction;
  return ex;
}

std::vector<AdversarialExample> CraftFromGradients(
    const Dataset& dataset, const std::vector<Tensor>& gradients,
    const AttackConfig& config) {
  if (dataset.empty()) throw InvalidArgument("cannot attack an empty dataset");
  if (gradients.size() != dataset.size()) {
    throw InvalidArgument("one gradient per sample is required");
  }
  config.Validate();
  std::vector<AdversarialExample> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.samples[i];
    AdversarialExample ex;
    ex.image = Perturb(s.image, gradients[i], config);
    ex.mask = s.mask;
    ex.source_index = i;
    ex.source_id = s.id;
    ex.epsilon_used = config.epsilon;
    ex.direction = config.direction;
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<AdversarialExample> CraftDataset(const UNet& model,
                                             const Dataset& dataset,
                                             const AttackConfig& config,
                                             int batch_size) {
  config.Validate();
  return CraftFromGradients(dataset,
                            DatasetInputGradients(model, dataset, batch_size),
                            config);
}

}  // namespace advseg
