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

#include "advseg/unet.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "advseg/error.h"
#include "advseg/ops.h"
#include "advseg/random.h"
#include "json.hpp"

namespace advseg {
namespace {

constexpr char kMagic[] = "ADVSEG01";
constexpr std::size_t kMagicSize = 8;
constexpr std::size_t kFamilySize = 6;  // "ADVSEG"

bool IsPowerOfTwo(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

void UNetConfig::Validate() const {
  if (input_channels < 1) throw ConfigError("input_channels must be >= 1");
  if (num_classes < 2) throw ConfigError("num_classes must be >= 2");
  if (!IsPowerOfTwo(input_size)) {
    throw ConfigError("input_size must be a power of two, got " +
                      std::to_string(input_size));
  }
  if (encoder_channels.empty()) {
    throw ConfigError("encoder_channels must name at least one level");
  }
  for (int c : encoder_channels) {
    if (c < 1) throw ConfigError("encoder channel counts must be >= 1");
  }
  if (bottleneck_channels < 1) {
    throw ConfigError("bottleneck_channels must be >= 1");
  }
  if (levels() >= 31 || (input_size >> levels()) < 1) {
    throw ConfigError("input_size " + std::to_string(input_size) +
                      " is not divisible by 2^" + std::to_string(levels()));
  }
}

std::string UNetConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["input_channels"] = input_channels;
  j["num_classes"] = num_classes;
  j["input_size"] = input_size;
  j["encoder_channels"] = encoder_channels;
  j["bottleneck_channels"] = bottleneck_channels;
  return j.dump();
}

UNetConfig UNetConfig::FromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    UNetConfig c;
    c.input_channels = j.at("input_channels").get<int>();
    c.num_classes = j.at("num_classes").get<int>();
    c.input_size = j.at("input_size").get<int>();
    c.encoder_channels = j.at("encoder_channels").get<std::vector<int>>();
    c.bottleneck_channels = j.at("bottleneck_channels").get<int>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad model config: ") + e.what());
  }
}

template <typename T>
std::vector<std::pair<std::string, Shape>> BasicUNet<T>::ParameterShapes(
    const UNetConfig& config) {
  config.Validate();
  std::vector<std::pair<std::string, Shape>> out;
  auto conv = [&](const std::string& prefix, std::int64_t cout,
                  std::int64_t cin, std::int64_t k) {
    out.emplace_back(prefix + ".weight", Shape{cout, cin, k, k});
    out.emplace_back(prefix + ".bias", Shape{cout});
  };
  const auto& enc = config.encoder_channels;
  std::int64_t cin = config.input_channels;
  for (int i = 0; i < config.levels(); ++i) {
    const std::string level = "enc" + std::to_string(i);
    conv(level + ".conv1", enc[i], cin, 3);
    conv(level + ".conv2", enc[i], enc[i], 3);
    cin = enc[i];
  }
  conv("bottleneck.conv1", config.bottleneck_channels, cin, 3);
  conv("bottleneck.conv2", config.bottleneck_channels,
       config.bottleneck_channels, 3);
  cin = config.bottleneck_channels;
  for (int i = config.levels() - 1; i >= 0; --i) {
    const std::string level = "dec" + std::to_string(i);
    // Transposed kernels are stored [Cin, Cout, k, k].
    out.emplace_back(level + ".up.weight", Shape{cin, enc[i], 2, 2});
    out.emplace_back(level + ".up.bias", Shape{enc[i]});
    conv(level + ".conv1", enc[i], 2 * enc[i], 3);
    conv(level + ".conv2", enc[i], enc[i], 3);
    cin = enc[i];
  }
  conv("head", config.num_classes, cin, 1);
  return out;
}

template <typename T>
BasicUNet<T>::BasicUNet(Layout layout)
    : config_(std::move(layout.config)),
      names_(std::move(layout.names)),
      params_(std::move(layout.params)) {
  const auto shapes = ParameterShapes(config_);
  if (shapes.size() != params_.size() || names_.size() != params_.size()) {
    throw ConfigError("parameter list does not match the config");
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (names_[i] != shapes[i].first || params_[i].shape() != shapes[i].second) {
      throw ConfigError("parameter " + names_[i] + " does not match the config");
    }
  }
}

template <typename T>
BasicUNet<T> BasicUNet<T>::Build(const UNetConfig& config, std::uint64_t seed) {
  Layout layout;
  layout.config = config;
  Rng rng(seed);
  for (auto& [name, shape] : ParameterShapes(config)) {
    BasicTensor<T> t(shape);
    if (shape.size() == 4) {
      // Effective fan-in: every output of a k = s transposed conv sees one
      // tap per input channel.
      const bool transposed = name.ends_with(".up.weight");
      const double fan_in =
          transposed ? static_cast<double>(shape[0])
                     : static_cast<double>(shape[1] * shape[2] * shape[3]);
      const double stddev = std::sqrt(2.0 / fan_in);
      for (T& v : t.data()) v = static_cast<T>(rng.Normal(0.0, stddev));
    }
    t.set_requires_grad(true);
    layout.names.push_back(name);
    layout.params.push_back(std::move(t));
  }
  return BasicUNet(std::move(layout));
}

template <typename T>
BasicTensor<T> BasicUNet<T>::Forward(const BasicTensor<T>& batch,
                                     FeatureProbe* probe) const {
  if (!batch.defined() || batch.rank() != 4 ||
      batch.dim(1) != config_.input_channels ||
      batch.dim(2) != config_.input_size ||
      batch.dim(3) != config_.input_size) {
    throw ShapeError("unet: expected [B, " +
                     std::to_string(config_.input_channels) + ", " +
                     std::to_string(config_.input_size) + ", " +
                     std::to_string(config_.input_size) + "] input, got " +
                     (batch.defined() ? ShapeToString(batch.shape())
                                      : std::string("undefined")));
  }
  std::size_t next = 0;
  auto conv_relu = [&](const BasicTensor<T>& x) {
    const auto& w = P(next++);
    const auto& b = P(next++);
    return Relu(Conv2d(x, w, b, 1, 1));
  };

  const int levels = config_.levels();
  std::vector<BasicTensor<T>> skips;
  skips.reserve(levels);
  BasicTensor<T> x = batch;
  for (int i = 0; i < levels; ++i) {
    x = conv_relu(x);
    x = conv_relu(x);
    if (probe) probe->encoder.push_back(x.shape());
    skips.push_back(x);
    x = MaxPool2d(x, 2);
  }
  x = conv_relu(x);
  x = conv_relu(x);
  if (probe) probe->bottleneck = x.shape();
  for (int i = levels - 1; i >= 0; --i) {
    const auto& w = P(next++);
    const auto& b = P(next++);
    x = ConvTranspose2d(x, w, b, 2);
    if (probe) probe->upsampled.push_back(x.shape());
    x = ConcatChannels(x, skips[i]);
    if (probe) probe->decoder_inputs.push_back(x.shape());
    x = conv_relu(x);
    x = conv_relu(x);
    if (probe) probe->decoder.push_back(x.shape());
  }
  const auto& hw = P(next++);
  const auto& hb = P(next++);
  BasicTensor<T> logits = Conv2d(x, hw, hb, 1, 0);
  if (probe) probe->logits = logits.shape();
  return logits;
}

template <typename T>
const BasicTensor<T>& BasicUNet<T>::parameter(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return params_[i];
  }
  throw InvalidArgument("no parameter named " + std::string(name));
}

template <typename T>
std::int64_t BasicUNet<T>::ParameterCount() const {
  std::int64_t n = 0;
  for (const auto& p : params_) n += p.numel();
  return n;
}

template <typename T>
BasicUNet<T> BasicUNet<T>::Clone() const {
  Layout layout;
  layout.config = config_;
  layout.names = names_;
  for (const auto& p : params_) {
    auto q = p.Clone();
    q.set_requires_grad(true);
    layout.params.push_back(std::move(q));
  }
  return BasicUNet(std::move(layout));
}

template class BasicUNet<float>;
template class BasicUNet<double>;

std::vector<Mask> ArgmaxMasks(const Tensor& logits) {
  if (logits.rank() != 4) {
    throw ShapeError("argmax: logits must be 4-D, got " +
                     ShapeToString(logits.shape()));
  }
  const std::int64_t batch = logits.dim(0), classes = logits.dim(1),
                     h = logits.dim(2), w = logits.dim(3), plane = h * w;
  std::vector<Mask> masks;
  masks.reserve(batch);
  const float* x = logits.data().data();
  for (std::int64_t b = 0; b < batch; ++b) {
    Mask m(h, w);
    const float* xb = x + b * classes * plane;
    for (std::int64_t i = 0; i < plane; ++i) {
      std::int64_t best = 0;
      for (std::int64_t c = 1; c < classes; ++c) {
        if (xb[c * plane + i] > xb[best * plane + i]) best = c;
      }
      m.values[i] = static_cast<std::uint8_t>(best);
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

std::vector<Mask> PredictMasks(const UNet& model, const Tensor& batch) {
  return ArgmaxMasks(model.Forward(batch));
}

Mask PredictMask(const UNet& model, const Tensor& image) {
  if (image.rank() == 3) {
    Shape s{1, image.dim(0), image.dim(1), image.dim(2)};
    return PredictMasks(model, image.Reshaped(std::move(s))).front();
  }
  if (image.rank() == 4 && image.dim(0) == 1) {
    return PredictMasks(model, image).front();
  }
  throw ShapeError("predict_mask: expected one [C, S, S] image, got " +
                   ShapeToString(image.shape()));
}

namespace {

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void SaveWeights(const UNet& model, const std::filesystem::path& path) {
  std::string blob(kMagic, kMagicSize);
  const std::string config = model.config().ToJson();
  PutU32(blob, static_cast<std::uint32_t>(config.size()));
  blob += config;
  for (const auto& p : model.parameters()) {
    for (float v : p.data()) PutU32(blob, std::bit_cast<std::uint32_t>(v));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

UNet LoadWeights(const std::filesystem::path& path,
                 const std::optional<UNetConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open weight file " + path.string());
  const std::string blob((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
  if (blob.size() < kMagicSize ||
      std::memcmp(blob.data(), kMagic, kFamilySize) != 0) {
    throw FormatError(path.string() + " is not a weight file");
  }
  if (std::memcmp(blob.data(), kMagic, kMagicSize) != 0) {
    throw VersionMismatchError(path.string() + ": unsupported format version " +
                               blob.substr(kFamilySize, 2));
  }
  std::size_t pos = kMagicSize;
  if (blob.size() < pos + 4) throw FormatError(path.string() + ": truncated header");
  const std::uint32_t config_len = GetU32(bytes + pos);
  pos += 4;
  if (blob.size() < pos + config_len) {
    throw FormatError(path.string() + ": truncated config");
  }
  const UNetConfig config = UNetConfig::FromJson(blob.substr(pos, config_len));
  pos += config_len;
  try {
    config.Validate();
  } catch (const ConfigError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (expected && !(*expected == config)) {
    throw ConfigMismatchError(path.string() + ": stored config " +
                              config.ToJson() + " differs from expected " +
                              expected->ToJson());
  }
  UNet::Layout layout;
  layout.config = config;
  for (auto& [name, shape] : UNet::ParameterShapes(config)) {
    Tensor t(shape);
    const std::size_t need = static_cast<std::size_t>(t.numel()) * 4;
    if (blob.size() < pos + need) {
      throw FormatError(path.string() + ": truncated at parameter " + name);
    }
    for (float& v : t.data()) {
      v = std::bit_cast<float>(GetU32(bytes + pos));
      pos += 4;
    }
    t.set_requires_grad(true);
    layout.names.push_back(name);
    layout.params.push_back(std::move(t));
  }
  if (pos != blob.size()) {
    throw FormatError(path.string() + ": " + std::to_string(blob.size() - pos) +
                      " trailing bytes");
  }
  return UNet(std::move(layout));
}

}  // namespace advseg
