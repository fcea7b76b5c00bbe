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

#ifndef ADVSEG_PIPELINE_H_
#define ADVSEG_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "advseg/attacks.h"
#include "advseg/data_io.h"
#include "advseg/records.h"
#include "advseg/unet.h"

namespace advseg {

struct TrainConfig {
  double learning_rate = 0.1;
  double momentum = 0.99;
  int batch_size = 16;
  int epochs = 30;
  std::uint64_t seed = 0;
  int eval_every = 10;

  void Validate() const;
};

enum class AugmentationStrategy { kNone, kFgsm, kInvFgsm };

// "none" / "fgsm" / "invfgsm".
std::string_view ToString(AugmentationStrategy strategy);
AugmentationStrategy ParseAugmentationStrategy(std::string_view name);

struct AugmentationPlan {
  AugmentationStrategy strategy = AugmentationStrategy::kNone;
  double epsilon = 0.1;

  // epsilon must lie in (0, 1] unless the strategy is kNone.
  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_iou = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> records;

  const EpochRecord& final() const { return records.back(); }
};

// Called after every completed epoch (1-based) with that epoch's mean loss.
using EpochCallback = std::function<void(int epoch, double train_loss)>;

// Mini-batch SGD with classical momentum on the mean cross-entropy loss.
// The sample order is reshuffled every epoch from the "shuffle" stream of
// config.seed. Validation IoU is recorded under label 0 after the first
// epoch and under label e after every epoch e that is a multiple of
// eval_every, plus after the final epoch.
//
// Throws InvalidArgument for an empty training set, ShapeError when the
// samples do not fit the model, DivergenceError on a non-finite loss.
TrainingHistory Train(UNet& model, const Dataset& train,
                      const Dataset& validation, const TrainConfig& config,
                      const EpochCallback& on_epoch = {});

struct ExperimentConfig {
  UNetConfig model = UNetConfig::Default();
  TrainConfig training;
  // Share of the dataset used for training; the rest is validation.
  double train_fraction = 0.8;
};

// Named sub-seeds derived from TrainConfig::seed.
std::uint64_t InitSeed(std::uint64_t seed);
std::uint64_t SplitSeed(std::uint64_t seed);

struct ExperimentResult {
  Dataset train;
  Dataset validation;
  TrainingHistory baseline_history;
  TrainingHistory augmented_history;
  UNet baseline_model;
  UNet augmented_model;
  // Phase-2 output; empty for AugmentationStrategy::kNone.
  std::vector<AdversarialExample> adversarial;
  std::size_t augmented_train_size = 0;
};

// Optional progress hook: phase name ("baseline", "fgsm", "invfgsm"),
// epoch, mean loss.
using PhaseCallback =
    std::function<void(const std::string& phase, int epoch, double loss)>;

// 1) trains a baseline on `train`; 2) crafts one adversarial example per
// training sample against that model at plan.epsilon; 3) trains a fresh
// model from the same initialization on the 2N-sample union. Validation
// samples are never perturbed. With kNone, phases 2-3 are skipped and the
// baseline is reported twice.
ExperimentResult RunAugmentedExperiment(const Dataset& train,
                                        const Dataset& validation,
                                        const AugmentationPlan& plan,
                                        const ExperimentConfig& config,
                                        const PhaseCallback& progress = {});

struct AugmentedRun {
  TrainingHistory history;
  UNet model;
  std::vector<AdversarialExample> adversarial;
  std::size_t train_size = 0;
};

// Phases 2-3 against an already trained phase-1 model: craft the adversarial
// copy of `train` and train a fresh model (InitSeed) on the union. `plan`
// must not be kNone.
AugmentedRun AugmentAndRetrain(const UNet& baseline, const Dataset& train,
                               const Dataset& validation,
                               const AugmentationPlan& plan,
                               const ExperimentConfig& config,
                               const PhaseCallback& progress = {});

// Splits `dataset` with (train_fraction, split seed) and runs the above.
ExperimentResult RunAugmentedExperiment(const Dataset& dataset,
                                        const AugmentationPlan& plan,
                                        const ExperimentConfig& config,
                                        const PhaseCallback& progress = {});

// Phase-3 model of an experiment whose plan uses `direction` at
// `epsilon`. Throws InvalidArgument unless epsilon > 0.
UNet AdversarialTraining(const Dataset& train, const Dataset& validation,
                         AttackDirection direction, double epsilon,
                         const ExperimentConfig& config);

// Report rows ("baseline"/strategy, epoch label, validation IoU).
std::vector<MetricRecord> ToMetricRecords(const std::string& experiment,
                                          const TrainingHistory& history);

}  // namespace advseg

#endif  // ADVSEG_PIPELINE_H_
