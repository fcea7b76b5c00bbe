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

#include "advseg/pipeline.h"

#include <cmath>

#include "advseg/error.h"
#include "advseg/evaluation.h"
#include "advseg/ops.h"
#include "advseg/optim.h"
#include "advseg/random.h"
#include "advseg/tape.h"

namespace advseg {

void TrainConfig::Validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
}

std::string_view ToString(AugmentationStrategy strategy) {
  switch (strategy) {
    case AugmentationStrategy::kNone:
      return "none";
    case AugmentationStrategy::kFgsm:
      return "fgsm";
    case AugmentationStrategy::kInvFgsm:
      return "invfgsm";
  }
  return "none";
}

AugmentationStrategy ParseAugmentationStrategy(std::string_view name) {
  if (name == "none") return AugmentationStrategy::kNone;
  if (name == "fgsm") return AugmentationStrategy::kFgsm;
  if (name == "invfgsm") return AugmentationStrategy::kInvFgsm;
  throw InvalidArgument("unknown strategy '" + std::string(name) + "'");
}

void AugmentationPlan::Validate() const {
  if (strategy == AugmentationStrategy::kNone) return;
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ConfigError("augmentation epsilon must lie in (0, 1]");
  }
}

std::uint64_t InitSeed(std::uint64_t seed) { return DeriveSeed(seed, "init"); }
std::uint64_t SplitSeed(std::uint64_t seed) { return DeriveSeed(seed, "split"); }

TrainingHistory Train(UNet& model, const Dataset& train,
                      const Dataset& validation, const TrainConfig& config,
                      const EpochCallback& on_epoch) {
  config.Validate();
  if (train.empty()) throw InvalidArgument("cannot train on an empty dataset");
  const int size = model.config().input_size;
  for (const Dataset* ds : {&train, &validation}) {
    for (const auto& s : ds->samples) {
      if (s.image.rank() != 3 || s.image.dim(0) != model.config().input_channels ||
          s.image.dim(1) != size || s.image.dim(2) != size) {
        throw ShapeError("sample " + s.id + " " + ShapeToString(s.image.shape()) +
                         " does not fit the model input size " +
                         std::to_string(size));
      }
    }
  }

  SgdMomentum optimizer(config.learning_rate, config.momentum);
  Rng shuffle_rng(DeriveSeed(config.seed, "shuffle"));
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainingHistory history;
  auto evaluate = [&](int label, double loss) {
    const double iou =
        validation.empty() ? 0.0 : MeanIou(model, validation, config.batch_size).mean;
    history.records.push_back({label, loss, iou});
  };

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.Shuffle(order.begin(), order.end());
    double loss_total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
      std::vector<const SegmentationSample*> batch;
      for (std::size_t i = begin; i < end; ++i) batch.push_back(&train.samples[order[i]]);
      const Tensor images = StackImages(batch);
      const ClassMap labels = StackMasks(batch);

      Tape tape;
      Tensor loss;
      {
        Tape::Recording rec(tape);
        loss = CrossEntropyLoss(model.Forward(images), labels);
      }
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                              " (loss " + std::to_string(value) + ")");
      }
      auto params = model.parameters();
      const auto grads =
          tape.Backward(loss, std::span<const Tensor>(params.data(), params.size()));
      optimizer.Step(params, grads);
      loss_total += value * static_cast<double>(end - begin);
    }
    const double mean_loss = loss_total / static_cast<double>(order.size());
    if (on_epoch) on_epoch(epoch, mean_loss);
    if (epoch == 1) evaluate(0, mean_loss);
    if (epoch % config.eval_every == 0 || epoch == config.epochs) {
      evaluate(epoch, mean_loss);
    }
  }
  return history;
}

ExperimentResult RunAugmentedExperiment(const Dataset& train,
                                        const Dataset& validation,
                                        const AugmentationPlan& plan,
                                        const ExperimentConfig& config,
                                        const PhaseCallback& progress) {
  plan.Validate();
  config.model.Validate();
  config.training.Validate();
  auto hook = [&](const std::string& phase) -> EpochCallback {
    if (!progress) return {};
    return [&progress, phase](int epoch, double loss) { progress(phase, epoch, loss); };
  };

  UNet baseline = UNet::Build(config.model, InitSeed(config.training.seed));
  TrainingHistory baseline_history =
      Train(baseline, train, validation, config.training, hook("baseline"));

  if (plan.strategy == AugmentationStrategy::kNone) {
    UNet copy = baseline.Clone();
    return ExperimentResult{train,    validation, baseline_history, baseline_history,
                            std::move(baseline), std::move(copy), {}, train.size()};
  }

  AugmentedRun run =
      AugmentAndRetrain(baseline, train, validation, plan, config, progress);
  return ExperimentResult{train,
                          validation,
                          std::move(baseline_history),
                          std::move(run.history),
                          std::move(baseline),
                          std::move(run.model),
                          std::move(run.adversarial),
                          run.train_size};
}

AugmentedRun AugmentAndRetrain(const UNet& baseline, const Dataset& train,
                               const Dataset& validation,
                               const AugmentationPlan& plan,
                               const ExperimentConfig& config,
                               const PhaseCallback& progress) {
  plan.Validate();
  if (plan.strategy == AugmentationStrategy::kNone) {
    throw InvalidArgument("augmentation needs an attack strategy");
  }
  AttackConfig attack;
  attack.epsilon = plan.epsilon;
  attack.direction = plan.strategy == AugmentationStrategy::kFgsm
                         ? AttackDirection::kAscent
                         : AttackDirection::kDescent;
  auto adversarial =
      CraftDataset(baseline, train, attack, config.training.batch_size);

  Dataset augmented;
  augmented.split = SplitTag::kTrain;
  augmented.provenance = train.provenance;
  augmented.samples = train.samples;
  for (const auto& ex : adversarial) augmented.samples.push_back(ex.ToSample());

  EpochCallback hook;
  if (progress) {
    const std::string phase(ToString(plan.strategy));
    hook = [&progress, phase](int epoch, double loss) { progress(phase, epoch, loss); };
  }
  UNet model = UNet::Build(config.model, InitSeed(config.training.seed));
  TrainingHistory history =
      Train(model, augmented, validation, config.training, hook);
  return AugmentedRun{std::move(history), std::move(model), std::move(adversarial),
                      augmented.size()};
}

ExperimentResult RunAugmentedExperiment(const Dataset& dataset,
                                        const AugmentationPlan& plan,
                                        const ExperimentConfig& config,
                                        const PhaseCallback& progress) {
  auto [train, validation] =
      Split(dataset, config.train_fraction, SplitSeed(config.training.seed));
  return RunAugmentedExperiment(train, validation, plan, config, progress);
}

UNet AdversarialTraining(const Dataset& train, const Dataset& validation,
                         AttackDirection direction, double epsilon,
                         const ExperimentConfig& config) {
  if (!(epsilon > 0.0)) {
    throw InvalidArgument("adversarial training needs epsilon > 0");
  }
  AugmentationPlan plan;
  plan.strategy = direction == AttackDirection::kAscent
                      ? AugmentationStrategy::kFgsm
                      : AugmentationStrategy::kInvFgsm;
  plan.epsilon = epsilon;
  return RunAugmentedExperiment(train, validation, plan, config).augmented_model;
}

std::vector<MetricRecord> ToMetricRecords(const std::string& experiment,
                                          const TrainingHistory& history) {
  std::vector<MetricRecord> out;
  for (const auto& r : history.records) {
    out.push_back({experiment, r.epoch, r.validation_iou});
  }
  return out;
}

}  // namespace advseg
