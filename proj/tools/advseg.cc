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

// advseg command-line tool: synth, experiment and sweep.
//
// Exit codes: 0 success, 2 usage, 3 numerical divergence, 4 data or weights.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "advseg/data_io.h"
#include "advseg/error.h"
#include "advseg/evaluation.h"
#include "advseg/pipeline.h"
#include "advseg/unet.h"

namespace {

namespace fs = std::filesystem;
using advseg::AttackDirection;
using Json = nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitData = 4;
constexpr const char* kVersionTag = "advseg-0.1.0";

struct SynthArgs {
  advseg::SyntheticShapeConfig config;
  std::string out;
};

struct ExperimentArgs {
  std::string data;
  std::string strategy = "none";
  double epsilon = 0.1;
  std::string out;
  std::string manifest;
  int input_size = 0;  // 0: the dataset's own size
  advseg::ExperimentConfig config;
  bool quiet = false;
};

struct SweepArgs {
  std::string data;
  std::string weights;
  std::string hardened;
  std::vector<double> epsilons;
  std::vector<std::string> directions = {"fgsm"};
  std::string out;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  bool all_samples = false;
  int batch_size = 16;
};

void Log(bool quiet, const std::string& line) {
  if (!quiet) std::cerr << line << '\n';
}

Json TrainingToJson(const advseg::TrainConfig& t) {
  Json j;
  j["learning_rate"] = t.learning_rate;
  j["momentum"] = t.momentum;
  j["batch_size"] = t.batch_size;
  j["epochs"] = t.epochs;
  j["seed"] = t.seed;
  j["eval_every"] = t.eval_every;
  return j;
}

advseg::TrainConfig TrainingFromJson(const Json& j) {
  advseg::TrainConfig t;
  t.learning_rate = j.at("learning_rate").get<double>();
  t.momentum = j.at("momentum").get<double>();
  t.batch_size = j.at("batch_size").get<int>();
  t.epochs = j.at("epochs").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.eval_every = j.at("eval_every").get<int>();
  return t;
}

Json ManifestFor(const ExperimentArgs& a) {
  Json j;
  j["version"] = kVersionTag;
  j["command"] = "experiment";
  j["data"] = fs::absolute(a.data).lexically_normal().string();
  j["out"] = a.out;
  j["strategy"] = a.strategy;
  j["epsilon"] = a.epsilon;
  j["seed"] = a.config.training.seed;
  j["train_fraction"] = a.config.train_fraction;
  j["model"] = Json::parse(a.config.model.ToJson());
  j["training"] = TrainingToJson(a.config.training);
  return j;
}

// Everything except the output directory comes from the manifest.
void ApplyManifest(ExperimentArgs& a) {
  std::ifstream in(a.manifest);
  if (!in) throw advseg::DataError("cannot open manifest " + a.manifest);
  Json j;
  try {
    j = Json::parse(in);
    if (j.at("version").get<std::string>() != kVersionTag) {
      throw advseg::VersionMismatchError("manifest " + a.manifest + " is from " +
                                         j.at("version").get<std::string>());
    }
    a.data = j.at("data").get<std::string>();
    if (a.out.empty()) a.out = j.at("out").get<std::string>();
    a.strategy = j.at("strategy").get<std::string>();
    a.epsilon = j.at("epsilon").get<double>();
    a.config.train_fraction = j.at("train_fraction").get<double>();
    a.config.model = advseg::UNetConfig::FromJson(j.at("model").dump());
    a.config.training = TrainingFromJson(j.at("training"));
    a.input_size = a.config.model.input_size;
  } catch (const Json::exception& e) {
    throw advseg::FormatError("manifest " + a.manifest + ": " + e.what());
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw advseg::DataError("cannot write " + path.string());
  out << text;
  if (!out) throw advseg::DataError("write failed for " + path.string());
}

int RunSynth(const SynthArgs& a) {
  a.config.Validate();
  const advseg::Dataset d = advseg::GenerateSynthetic(a.config);
  advseg::SaveDataset(d, a.out);
  std::cout << "wrote " << d.size() << " pairs to " << a.out << '\n';
  return 0;
}

int RunExperiment(ExperimentArgs a) {
  if (!a.manifest.empty()) ApplyManifest(a);
  if (a.data.empty()) throw advseg::InvalidArgument("--data is required");
  if (a.out.empty()) throw advseg::InvalidArgument("--out is required");
  advseg::AugmentationPlan plan;
  plan.strategy = advseg::ParseAugmentationStrategy(a.strategy);
  plan.epsilon = a.epsilon;
  plan.Validate();
  a.config.training.Validate();

  advseg::Dataset data =
      a.input_size > 0 ? advseg::LoadDataset(a.data, a.input_size) : advseg::LoadDataset(a.data);
  a.config.model.input_size = static_cast<int>(data.image_size());
  a.config.model.Validate();

  const fs::path out(a.out);
  fs::create_directories(out);
  WriteText(out / "manifest.json", ManifestFor(a).dump(2) + "\n");

  const int epochs = a.config.training.epochs;
  auto progress = [&](const std::string& phase, int epoch, double loss) {
    std::ostringstream line;
    line << "[" << phase << "] epoch " << epoch << "/" << epochs << " loss "
         << advseg::FormatFixed4(loss);
    Log(a.quiet, line.str());
  };
  const advseg::ExperimentResult r =
      advseg::RunAugmentedExperiment(data, plan, a.config, progress);

  advseg::SaveWeights(r.baseline_model, out / "baseline.weights");
  std::vector<advseg::MetricRecord> records =
      advseg::ToMetricRecords("baseline", r.baseline_history);
  if (plan.strategy != advseg::AugmentationStrategy::kNone) {
    const std::string name(advseg::ToString(plan.strategy));
    advseg::SaveWeights(r.augmented_model, out / (name + ".weights"));
    for (const auto& m : advseg::ToMetricRecords(name, r.augmented_history)) {
      records.push_back(m);
    }
    fs::create_directories(out / "adv");
    for (const auto& ex : r.adversarial) {
      const std::string file = ex.source_id + "_" + std::string(advseg::ToString(ex.direction)) +
                               "_" + advseg::FormatFixed4(ex.epsilon_used) + ".png";
      advseg::WriteImagePng(ex.image, out / "adv" / file);
    }
  }
  advseg::WriteMetricsCsv(records, out / "metrics.csv");

  std::cout << "baseline final IoU " << advseg::FormatFixed4(r.baseline_history.final().validation_iou);
  if (plan.strategy != advseg::AugmentationStrategy::kNone) {
    std::cout << ", " << a.strategy << " final IoU "
              << advseg::FormatFixed4(r.augmented_history.final().validation_iou);
  }
  std::cout << '\n';
  return 0;
}

int RunSweep(const SweepArgs& a) {
  const advseg::UNet baseline = advseg::LoadWeights(a.weights);
  std::optional<advseg::UNet> hardened;
  if (!a.hardened.empty()) hardened = advseg::LoadWeights(a.hardened, baseline.config());

  advseg::Dataset data = advseg::LoadDataset(a.data, baseline.config().input_size);
  advseg::Dataset eval;
  if (a.all_samples) {
    eval = std::move(data);
  } else {
    eval = advseg::Split(data, a.train_fraction, advseg::SplitSeed(a.seed)).second;
  }

  std::vector<AttackDirection> directions;
  for (const auto& d : a.directions) directions.push_back(advseg::ParseAttackDirection(d));
  const std::vector<double> eps = a.epsilons.empty() ? advseg::DefaultSweepGrid() : a.epsilons;

  const auto rows =
      hardened ? advseg::CompareAdversarialTraining(baseline, *hardened, eval, directions, eps,
                                                    a.batch_size)
               : advseg::RobustnessSweep(baseline, eval, directions, eps, false, a.batch_size);
  const fs::path out(a.out);
  fs::create_directories(out);
  advseg::WriteSweepCsv(rows, out / "sweep.csv");
  advseg::WriteSweepSvg(rows, out / "sweep.svg");
  for (const auto& row : rows) {
    std::cout << advseg::ToString(row.direction) << " eps " << advseg::FormatFixed4(row.epsilon)
              << (row.adversarially_trained ? " after " : " before ")
              << advseg::FormatFixed4(row.mean_iou) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial augmentation experiments for U-Net segmentation"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "Write a seeded synthetic dataset");
  cmd_synth->add_option("--count", synth.config.count, "Number of image/mask pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_synth->add_option("--size", synth.config.size, "Image side length (power of two)")
      ->capture_default_str();
  cmd_synth->add_option("--seed", synth.config.seed, "Generator seed")->capture_default_str();
  cmd_synth->add_option("--noise", synth.config.noise_std, "Gaussian noise std")
      ->capture_default_str();
  cmd_synth->add_option("--out", synth.out, "Output directory")->required();

  ExperimentArgs exp;
  auto* cmd_exp = app.add_subcommand("experiment", "Train baseline and augmented models");
  cmd_exp->add_option("--data", exp.data, "Dataset directory");
  cmd_exp->add_option("--strategy", exp.strategy, "none, fgsm or invfgsm")
      ->check(CLI::IsMember({"none", "fgsm", "invfgsm"}))
      ->capture_default_str();
  cmd_exp->add_option("--epsilon", exp.epsilon, "Perturbation size")->capture_default_str();
  cmd_exp->add_option("--epochs", exp.config.training.epochs)->capture_default_str();
  cmd_exp->add_option("--seed", exp.config.training.seed)->capture_default_str();
  cmd_exp->add_option("--lr", exp.config.training.learning_rate)->capture_default_str();
  cmd_exp->add_option("--momentum", exp.config.training.momentum)->capture_default_str();
  cmd_exp->add_option("--batch-size", exp.config.training.batch_size)->capture_default_str();
  cmd_exp->add_option("--eval-every", exp.config.training.eval_every)->capture_default_str();
  cmd_exp->add_option("--train-fraction", exp.config.train_fraction)->capture_default_str();
  cmd_exp->add_option("--input-size", exp.input_size, "Resize inputs (0 keeps data size)")
      ->capture_default_str();
  cmd_exp->add_option("--encoder-channels", exp.config.model.encoder_channels)
      ->delimiter(',')
      ->capture_default_str();
  cmd_exp->add_option("--bottleneck-channels", exp.config.model.bottleneck_channels)
      ->capture_default_str();
  cmd_exp->add_option("--out", exp.out, "Output directory");
  cmd_exp->add_option("--manifest", exp.manifest, "Replay a previous run's manifest.json");
  cmd_exp->add_flag("--quiet", exp.quiet, "No per-epoch progress");

  SweepArgs sweep;
  auto* cmd_sweep = app.add_subcommand("sweep", "Robustness of trained weights under attack");
  cmd_sweep->add_option("--data", sweep.data, "Dataset directory")->required();
  cmd_sweep->add_option("--weights", sweep.weights, "Baseline weight file")->required();
  cmd_sweep->add_option("--weights-hardened", sweep.hardened, "Adversarially trained weights");
  cmd_sweep->add_option("--epsilons", sweep.epsilons, "Ascending list (default grid)")
      ->delimiter(',');
  cmd_sweep->add_option("--directions", sweep.directions, "fgsm and/or invfgsm")
      ->delimiter(',')
      ->capture_default_str();
  cmd_sweep->add_option("--seed", sweep.seed, "Seed of the experiment's split")
      ->capture_default_str();
  cmd_sweep->add_option("--train-fraction", sweep.train_fraction)->capture_default_str();
  cmd_sweep->add_flag("--all-samples", sweep.all_samples, "Evaluate every sample, not the split");
  cmd_sweep->add_option("--batch-size", sweep.batch_size)->capture_default_str();
  cmd_sweep->add_option("--out", sweep.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cmd_synth) return RunSynth(synth);
    if (*cmd_exp) return RunExperiment(exp);
    if (*cmd_sweep) return RunSweep(sweep);
  } catch (const advseg::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const advseg::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const advseg::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const advseg::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
