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

#include "advseg/records.h"

#include <string>

#include "advseg/error.h"

namespace advseg {

std::string_view ToString(AttackDirection direction) {
  return direction == AttackDirection::kAscent ? "fgsm" : "invfgsm";
}

AttackDirection ParseAttackDirection(std::string_view name) {
  if (name == "fgsm") return AttackDirection::kAscent;
  if (name == "invfgsm") return AttackDirection::kDescent;
  throw InvalidArgument("unknown attack direction '" + std::string(name) + "'");
}

}  // namespace advseg
