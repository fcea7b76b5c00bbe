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

#include "advseg/evaluation.h"

#include <algorithm>

#include "advseg/attacks.h"
#include "advseg/error.h"

namespace advseg {

double Iou(const Mask& pred, const Mask& truth) {
  if (pred.height != truth.height || pred.width != truth.width ||
      pred.values.size() != truth.values.size()) {
    throw ShapeError("iou: masks of different sizes");
  }
  std::int64_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const std::uint8_t a = pred.values[i], b = truth.values[i];
    if (a > 1 || b > 1) throw InvalidArgument("iou: masks must be binary");
    inter += a & b;
    uni += a | b;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

IoUResult MeanIou(std::span<const Mask> predictions, std::span<const Mask> truths) {
  if (predictions.size() != truths.size()) {
    throw InvalidArgument("mean_iou: prediction and truth counts differ");
  }
  if (predictions.empty()) throw InvalidArgument("mean_iou: empty dataset");
  IoUResult r;
  r.per_sample.reserve(predictions.size());
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    r.per_sample.push_back(Iou(predictions[i], truths[i]));
    total += r.per_sample.back();
  }
  r.mean = total / static_cast<double>(predictions.size());
  return r;
}

namespace {

// Predicted masks for images given by pointer, in batches.
std::vector<Mask> PredictAll(const UNet& model,
                             const std::vector<const Tensor*>& images,
                             int batch_size) {
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  std::vector<Mask> out;
  out.reserve(images.size());
  for (std::size_t begin = 0; begin < images.size(); begin += batch_size) {
    const std::size_t end =
        std::min(images.size(), begin + static_cast<std::size_t>(batch_size));
    const Shape& one = images[begin]->shape();
    const std::int64_t per = NumElements(one);
    Tensor batch(Shape{static_cast<std::int64_t>(end - begin), one[0], one[1], one[2]});
    for (std::size_t i = begin; i < end; ++i) {
      std::copy_n(images[i]->data().data(), per,
                  batch.data().data() + static_cast<std::int64_t>(i - begin) * per);
    }
    for (auto& m : PredictMasks(model, batch)) out.push_back(std::move(m));
  }
  return out;
}

std::vector<Mask> Truths(const Dataset& dataset) {
  std::vector<Mask> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) out.push_back(s.mask);
  return out;
}

}  // namespace

IoUResult MeanIou(const UNet& model, const Dataset& dataset, int batch_size) {
  if (dataset.empty()) throw InvalidArgument("mean_iou: empty dataset");
  std::vector<const Tensor*> images;
  for (const auto& s : dataset.samples) images.push_back(&s.image);
  return MeanIou(PredictAll(model, images, batch_size), Truths(dataset));
}

std::vector<double> DefaultSweepGrid() {
  return {0.0, 0.0012, 0.05, 0.1, 0.1176, 0.118, 0.15, 0.2};
}

std::vector<RobustnessRow> RobustnessSweep(
    const UNet& model, const Dataset& dataset,
    std::span<const AttackDirection> directions,
    std::span<const double> epsilons, bool adversarially_trained,
    int batch_size) {
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] >= 0.0)) throw InvalidArgument("sweep epsilons must be >= 0");
    if (i > 0 && epsilons[i] < epsilons[i - 1]) {
      throw InvalidArgument("sweep epsilons must be sorted ascending");
    }
  }
  if (dataset.empty()) throw InvalidArgument("sweep: empty dataset");
  const auto gradients = DatasetInputGradients(model, dataset, batch_size);
  const auto truths = Truths(dataset);
  std::vector<RobustnessRow> rows;
  for (AttackDirection direction : directions) {
    for (double eps : epsilons) {
      AttackConfig attack;
      attack.epsilon = eps;
      attack.direction = direction;
      const auto adversarial = CraftFromGradients(dataset, gradients, attack);
      std::vector<const Tensor*> images;
      for (const auto& ex : adversarial) images.push_back(&ex.image);
      const double mean = MeanIou(PredictAll(model, images, batch_size), truths).mean;
      rows.push_back({eps, direction, adversarially_trained, mean});
    }
  }
  return rows;
}

std::vector<RobustnessRow> CompareAdversarialTraining(
    const UNet& baseline, const UNet& hardened, const Dataset& dataset,
    std::span<const AttackDirection> directions,
    std::span<const double> epsilons, int batch_size) {
  if (!(baseline.config() == hardened.config())) {
    throw ConfigMismatchError("baseline and hardened models differ in config");
  }
  const auto before =
      RobustnessSweep(baseline, dataset, directions, epsilons, false, batch_size);
  const auto after =
      RobustnessSweep(hardened, dataset, directions, epsilons, true, batch_size);
  std::vector<RobustnessRow> rows;
  rows.reserve(before.size() * 2);
  for (std::size_t i = 0; i < before.size(); ++i) {
    rows.push_back(before[i]);
    rows.push_back(after[i]);
  }
  return rows;
}

}  // namespace advseg
