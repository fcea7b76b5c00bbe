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

#include "advseg/png_io.h"

#include <png.h>

#include <cstring>
#include <string>

#include "advseg/error.h"

namespace advseg {

RawImage ReadPng(const std::filesystem::path& path, int channels) {
  if (channels != 1 && channels != 3) {
    throw InvalidArgument("ReadPng: channels must be 1 or 3");
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DataError("cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  RawImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.channels = channels;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw DataError("cannot decode PNG " + path.string() + ": " + message);
  }
  return out;
}

void WritePng(const std::filesystem::path& path, const RawImage& raw) {
  if (raw.channels != 1 && raw.channels != 3) {
    throw InvalidArgument("WritePng: channels must be 1 or 3");
  }
  if (raw.pixels.size() !=
      static_cast<std::size_t>(raw.width) * raw.height * raw.channels) {
    throw InvalidArgument("WritePng: pixel buffer does not match dimensions");
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raw.width);
  image.height = static_cast<png_uint_32>(raw.height);
  image.format = raw.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, raw.pixels.data(), 0,
                               nullptr)) {
    throw DataError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

}  // namespace advseg
