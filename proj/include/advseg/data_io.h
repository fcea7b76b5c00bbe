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

#ifndef ADVSEG_DATA_IO_H_
#define ADVSEG_DATA_IO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advseg/mask.h"
#include "advseg/records.h"
#include "advseg/tensor.h"

namespace advseg {

// An image x in [0, 1] with shape [3, S, S] and its binary S x S mask y.
struct SegmentationSample {
  Tensor image;
  Mask mask;
  std::string id;

  // Throws DataError unless the image is finite and within [0, 1], the mask
  // is binary and both share spatial dimensions.
  void Validate() const;
};

enum class SplitTag { kAll, kTrain, kValidation };
enum class Provenance { kReal, kSynthetic };

struct Dataset {
  std::vector<SegmentationSample> samples;
  SplitTag split = SplitTag::kAll;
  Provenance provenance = Provenance::kReal;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  // Spatial size shared by every sample; 0 when empty.
  std::int64_t image_size() const;

  // Sample invariants plus unique ids and one shared spatial size.
  void Validate() const;
};

// Reads `dir`/images/*.png (RGB) and `dir`/masks/*.png (gray) paired by file
// stem, ordered by stem. Pixels are scaled by 1/255 and mask pixels >= 128
// become foreground. With `target_size`, images are resized bilinearly and
// masks by nearest neighbour.
//
// Throws UnpairedFileError naming the stem of a file without a partner, and
// DataError for empty directories, unreadable files, non-square images or
// image/mask size disagreements.
Dataset LoadDataset(const std::filesystem::path& dir,
                    std::optional<int> target_size = std::nullopt);

// Writes the layout LoadDataset reads; images are quantized to 8 bits.
void SaveDataset(const Dataset& dataset, const std::filesystem::path& dir);

// Quantized PNG export of a [3, S, S] image in [0, 1]; values are clamped.
void WriteImagePng(const Tensor& image, const std::filesystem::path& path);
// 0/1 mask exported as 0/255 gray.
void WriteMaskPng(const Mask& mask, const std::filesystem::path& path);

// Bilinear resize of a square [C, S, S] image with half-pixel-centre
// alignment. Throws ShapeError for non-square input.
Tensor ResizeBilinear(const Tensor& image, int target);
// Nearest-neighbour resize; keeps masks binary.
Mask ResizeNearest(const Mask& mask, int target);

struct SyntheticShapeConfig {
  int count = 320;
  int size = 32;
  int min_shapes = 1;
  int max_shapes = 3;
  // Probability that a shape is a lobed blob rather than an ellipse.
  double blob_fraction = 0.5;
  double noise_std = 0.06;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Dark textured background with 1-3 brighter filled ellipses or blobs; the
// mask is the exact rasterized union of the shapes (pixel centres). Fully
// determined by the config.
Dataset GenerateSynthetic(const SyntheticShapeConfig& config);

// Seeded shuffle, then the first round(fraction * N) samples (kept in their
// original relative order) form the training split. Both parts are
// non-empty whenever N >= 2.
std::pair<Dataset, Dataset> Split(const Dataset& dataset, double fraction,
                                  std::uint64_t seed);

// Stacks the images of `samples` into a [B, 3, S, S] batch.
Tensor StackImages(std::span<const SegmentationSample* const> samples);
ClassMap StackMasks(std::span<const SegmentationSample* const> samples);
Tensor StackImages(const Dataset& dataset);
ClassMap StackMasks(const Dataset& dataset);

// CSV with header `experiment,epoch,mean_iou`, four-decimal floats.
void WriteMetricsCsv(std::span<const MetricRecord> records,
                     const std::filesystem::path& path);
std::vector<MetricRecord> ReadMetricsCsv(const std::filesystem::path& path);

// CSV with header `direction,epsilon,adv_trained,mean_iou`.
void WriteSweepCsv(std::span<const RobustnessRow> rows,
                   const std::filesystem::path& path);
std::vector<RobustnessRow> ReadSweepCsv(const std::filesystem::path& path);

// Line chart of mean IoU against epsilon, one series per (direction,
// adv_trained) pair.
void WriteSweepSvg(std::span<const RobustnessRow> rows,
                   const std::filesystem::path& path);

// Four-decimal fixed formatting used by every report.
std::string FormatFixed4(double value);

}  // namespace advseg

#endif  // ADVSEG_DATA_IO_H_
