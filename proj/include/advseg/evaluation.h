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

#ifndef ADVSEG_EVALUATION_H_
#define ADVSEG_EVALUATION_H_

#include <span>
#include <vector>

#include "advseg/data_io.h"
#include "advseg/mask.h"
#include "advseg/records.h"
#include "advseg/unet.h"

namespace advseg {

// |pred AND truth| / |pred OR truth| over foreground pixels. Two empty masks
// agree perfectly and score 1. Throws ShapeError on mismatched sizes and
// InvalidArgument on non-binary values.
double Iou(const Mask& pred, const Mask& truth);

struct IoUResult {
  std::vector<double> per_sample;
  double mean = 0.0;
};

// Arithmetic mean of per-pair IoUs.
IoUResult MeanIou(std::span<const Mask> predictions, std::span<const Mask> truths);

// Predicts every sample (in batches) and scores it against its mask.
IoUResult MeanIou(const UNet& model, const Dataset& dataset, int batch_size = 16);

// {0, 0.0012, 0.05, 0.1, 0.1176, 0.118, 0.15, 0.2}.
std::vector<double> DefaultSweepGrid();

// For every direction and every epsilon (ascending), crafts a white-box
// adversarial copy of `dataset` against `model` and records its mean IoU.
// Rows are ordered by direction, then epsilon. Input gradients do not
// depend on epsilon and are computed once.
std::vector<RobustnessRow> RobustnessSweep(
    const UNet& model, const Dataset& dataset,
    std::span<const AttackDirection> directions,
    std::span<const double> epsilons, bool adversarially_trained = false,
    int batch_size = 16);

// Sweeps both models and interleaves the results: by direction, then
// epsilon, then baseline ("before") followed by hardened ("after"). Throws
// ConfigMismatchError when the models' configs differ.
std::vector<RobustnessRow> CompareAdversarialTraining(
    const UNet& baseline, const UNet& hardened, const Dataset& dataset,
    std::span<const AttackDirection> directions,
    std::span<const double> epsilons, int batch_size = 16);

}  // namespace advseg

#endif  // ADVSEG_EVALUATION_H_
