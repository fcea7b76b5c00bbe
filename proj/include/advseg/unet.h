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

#ifndef ADVSEG_UNET_H_
#define ADVSEG_UNET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advseg/mask.h"
#include "advseg/tensor.h"

namespace advseg {

struct UNetConfig {
  int input_channels = 3;
  int num_classes = 2;
  int input_size = 128;
  std::vector<int> encoder_channels = {16, 32, 64, 128};
  int bottleneck_channels = 256;

  // 128x128x3 in, 8x8x256 at the bottleneck.
  static UNetConfig Default() { return {}; }
  // Two levels at 32x32; the bottleneck is 8x8x16.
  static UNetConfig Tiny() { return {3, 2, 32, {4, 8}, 16}; }

  int levels() const { return static_cast<int>(encoder_channels.size()); }
  int bottleneck_size() const { return input_size >> levels(); }

  // Throws ConfigError.
  void Validate() const;

  std::string ToJson() const;
  static UNetConfig FromJson(std::string_view text);

  friend bool operator==(const UNetConfig&, const UNetConfig&) = default;
};

// Shapes of the intermediate feature maps seen during one forward pass.
struct FeatureProbe {
  std::vector<Shape> encoder;         // per level, before pooling
  Shape bottleneck;
  std::vector<Shape> upsampled;       // deepest level first
  std::vector<Shape> decoder_inputs;  // after skip concatenation
  std::vector<Shape> decoder;         // after the two convolutions
  Shape logits;
};

// Fully convolutional encoder/decoder with skip concatenation.
//
// Encoder level i: two 3x3 conv+relu blocks to encoder_channels[i], then a
// 2x2 max-pool. Bottleneck: two 3x3 conv+relu blocks. Decoder level i
// (deepest first): 2x2 stride-2 transposed conv to encoder_channels[i],
// concatenation with the encoder level-i map, two conv+relu blocks. A final
// 1x1 conv produces num_classes logits.
template <typename T>
class BasicUNet {
 public:
  // He-normal kernels (std = sqrt(2 / fan_in)), zero biases, drawn in
  // parameter order from a generator seeded with `seed`.
  static BasicUNet Build(const UNetConfig& config, std::uint64_t seed);

  const UNetConfig& config() const { return config_; }

  // [B, input_channels, S, S] -> [B, num_classes, S, S] logits.
  BasicTensor<T> Forward(const BasicTensor<T>& batch,
                         FeatureProbe* probe = nullptr) const;

  const std::vector<std::string>& parameter_names() const { return names_; }
  std::span<BasicTensor<T>> parameters() { return params_; }
  std::span<const BasicTensor<T>> parameters() const { return params_; }
  const BasicTensor<T>& parameter(std::string_view name) const;
  std::int64_t ParameterCount() const;

  // Independent copy of the weights.
  BasicUNet Clone() const;

  template <typename U>
  BasicUNet<U> Cast() const {
    typename BasicUNet<U>::Layout layout;
    layout.config = config_;
    layout.names = names_;
    for (const auto& p : params_) {
      auto q = p.template Cast<U>();
      q.set_requires_grad(true);
      layout.params.push_back(std::move(q));
    }
    return BasicUNet<U>(std::move(layout));
  }

  struct Layout {
    UNetConfig config;
    std::vector<std::string> names;
    std::vector<BasicTensor<T>> params;
  };
  explicit BasicUNet(Layout layout);

  // Parameter names and shapes implied by a config, in storage order.
  static std::vector<std::pair<std::string, Shape>> ParameterShapes(
      const UNetConfig& config);

 private:
  const BasicTensor<T>& P(std::size_t index) const { return params_[index]; }

  UNetConfig config_;
  std::vector<std::string> names_;
  std::vector<BasicTensor<T>> params_;
};

using UNet = BasicUNet<float>;
using UNetD = BasicUNet<double>;

extern template class BasicUNet<float>;
extern template class BasicUNet<double>;

// Per-pixel argmax over the class channel of [B, C, H, W] logits. Ties go
// to the lowest class index.
std::vector<Mask> ArgmaxMasks(const Tensor& logits);

// Mask of one [C, S, S] image (or [1, C, S, S] batch).
Mask PredictMask(const UNet& model, const Tensor& image);

// Masks of a [B, C, S, S] batch.
std::vector<Mask> PredictMasks(const UNet& model, const Tensor& batch);

// Weight file, little-endian:
//   "ADVSEG01" | u32 byte length | config JSON (UTF-8) | float32 parameters
// in ParameterShapes order.
void SaveWeights(const UNet& model, const std::filesystem::path& path);

// Throws VersionMismatchError, FormatError (corrupt or truncated file) or,
// when `expected` is given and differs from the stored config,
// ConfigMismatchError.
UNet LoadWeights(const std::filesystem::path& path,
                 const std::optional<UNetConfig>& expected = std::nullopt);

}  // namespace advseg

#endif  // ADVSEG_UNET_H_
