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

#ifndef ADVSEG_PNG_IO_H_
#define ADVSEG_PNG_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace advseg {

// 8-bit interleaved pixels.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (RGB)
  std::vector<std::uint8_t> pixels;
};

// Reads any PNG and converts it to 8-bit RGB (channels = 3) or gray
// (channels = 1). Throws DataError.
RawImage ReadPng(const std::filesystem::path& path, int channels);

void WritePng(const std::filesystem::path& path, const RawImage& image);

}  // namespace advseg

#endif  // ADVSEG_PNG_IO_H_
