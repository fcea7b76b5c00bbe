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

#ifndef ADVSEG_RECORDS_H_
#define ADVSEG_RECORDS_H_

#include <string>
#include <string_view>

namespace advseg {

// Sign convention of a gradient-sign perturbation.
enum class AttackDirection {
  kAscent,   // FGSM: x + eps * sign(grad), towards higher loss
  kDescent,  // Inverse FGSM: x - eps * sign(grad), towards lower loss
};

// "fgsm" / "invfgsm".
std::string_view ToString(AttackDirection direction);
// Accepts the names produced by ToString; throws InvalidArgument otherwise.
AttackDirection ParseAttackDirection(std::string_view name);

// One cell of an IoU-over-epochs table.
struct MetricRecord {
  std::string experiment;
  int epoch = 0;
  double mean_iou = 0.0;

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

// One cell of a robustness table: mean IoU of a model attacked at `epsilon`.
struct RobustnessRow {
  double epsilon = 0.0;
  AttackDirection direction = AttackDirection::kAscent;
  bool adversarially_trained = false;
  double mean_iou = 0.0;

  friend bool operator==(const RobustnessRow&, const RobustnessRow&) = default;
};

}  // namespace advseg

#endif  // ADVSEG_RECORDS_H_
