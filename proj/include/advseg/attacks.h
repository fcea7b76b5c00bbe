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

#ifndef ADVSEG_ATTACKS_H_
#define ADVSEG_ATTACKS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "advseg/data_io.h"
#include "advseg/mask.h"
#include "advseg/records.h"
#include "advseg/tensor.h"
#include "advseg/unet.h"

namespace advseg {

struct AttackConfig {
  double epsilon = 0.1;
  AttackDirection direction = AttackDirection::kAscent;
  double clip_min = 0.0;
  double clip_max = 1.0;

  // Throws ConfigError unless epsilon >= 0 and clip_min < clip_max.
  void Validate() const;
};

// A perturbed copy of a dataset sample. The mask is the source sample's.
struct AdversarialExample {
  Tensor image;  // [3, S, S]
  Mask mask;
  std::size_t source_index = 0;
  std::string source_id;
  double epsilon_used = 0.0;
  AttackDirection direction = AttackDirection::kAscent;

  // The example as a training sample with id "<source>_<direction>".
  SegmentationSample ToSample() const;
};

// Gradient of the mean cross-entropy loss of `model` on (x, y) with respect
// to the input batch x. Model weights are read, never written.
template <typename T>
BasicTensor<T> InputGradient(const BasicUNet<T>& model, const BasicTensor<T>& x,
                             const ClassMap& y);

// Per-sample input gradients ([3, S, S] each) over a dataset, computed in
// batches of `batch_size`.
std::vector<Tensor> DatasetInputGradients(const UNet& model,
                                          const Dataset& dataset,
                                          int batch_size = 16);

// The unclipped step: +eps * sign(grad) for ascent, -eps * sign(grad) for
// descent, with sign(0) = 0. Every component is -eps, 0 or +eps.
Tensor SignStep(const Tensor& grad, const AttackConfig& config);

// clip(x + SignStep(grad)) into [clip_min, clip_max].
Tensor Perturb(const Tensor& x, const Tensor& grad, const AttackConfig& config);

// Input gradient followed by Perturb for one sample.
AdversarialExample Craft(const UNet& model, const SegmentationSample& sample,
                         const AttackConfig& config,
                         std::size_t source_index = 0);

// One example per sample, in dataset order, from precomputed gradients.
std::vector<AdversarialExample> CraftFromGradients(
    const Dataset& dataset, const std::vector<Tensor>& gradients,
    const AttackConfig& config);

// One example per sample, in dataset order. Throws InvalidArgument on an
// empty dataset.
std::vector<AdversarialExample> CraftDataset(const UNet& model,
                                             const Dataset& dataset,
                                             const AttackConfig& config,
                                             int batch_size = 16);

}  // namespace advseg

#endif  // ADVSEG_ATTACKS_H_
