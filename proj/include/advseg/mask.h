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

#ifndef ADVSEG_MASK_H_
#define ADVSEG_MASK_H_

#include <cstdint>
#include <vector>

namespace advseg {

// Row-major 2-D label image. Segmentation masks hold 0 (background) or 1
// (foreground).
struct Mask {
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<std::uint8_t> values;

  Mask() = default;
  Mask(std::int64_t h, std::int64_t w, std::uint8_t fill = 0)
      : height(h), width(w), values(static_cast<std::size_t>(h * w), fill) {}

  std::uint8_t& at(std::int64_t y, std::int64_t x) { return values[y * width + x]; }
  std::uint8_t at(std::int64_t y, std::int64_t x) const {
    return values[y * width + x];
  }
  std::int64_t size() const { return height * width; }
  bool IsBinary() const {
    for (std::uint8_t v : values) {
      if (v > 1) return false;
    }
    return true;
  }

  friend bool operator==(const Mask&, const Mask&) = default;
};

}  // namespace advseg

#endif  // ADVSEG_MASK_H_
