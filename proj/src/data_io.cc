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

#include "advseg/data_io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "advseg/error.h"
#include "advseg/png_io.h"
#include "advseg/random.h"

namespace advseg {

namespace fs = std::filesystem;

void SegmentationSample::Validate() const {
  if (!image.defined() || image.rank() != 3) {
    throw DataError("sample " + id + ": image must be [C, S, S]");
  }
  if (image.dim(1) != mask.height || image.dim(2) != mask.width) {
    throw DataError("sample " + id + ": image " + ShapeToString(image.shape()) +
                    " and mask " + std::to_string(mask.height) + "x" +
                    std::to_string(mask.width) + " disagree");
  }
  if (static_cast<std::int64_t>(mask.values.size()) != mask.size()) {
    throw DataError("sample " + id + ": mask buffer has the wrong length");
  }
  for (float v : image.data()) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw DataError("sample " + id + ": image value outside [0, 1]");
    }
  }
  if (!mask.IsBinary()) throw DataError("sample " + id + ": mask is not binary");
}

std::int64_t Dataset::image_size() const {
  return samples.empty() ? 0 : samples.front().mask.height;
}

void Dataset::Validate() const {
  std::set<std::string> ids;
  const std::int64_t size = image_size();
  for (const auto& s : samples) {
    s.Validate();
    if (!ids.insert(s.id).second) throw DataError("duplicate sample id " + s.id);
    if (s.mask.height != size || s.mask.width != size) {
      throw DataError("sample " + s.id + " does not share the dataset size " +
                      std::to_string(size));
    }
  }
}

namespace {

std::map<std::string, fs::path> PngsByStem(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  if (!fs::is_directory(dir)) {
    throw DataError("missing directory " + dir.string());
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
    out.emplace(entry.path().stem().string(), entry.path());
  }
  return out;
}

Tensor ImageFromRaw(const RawImage& raw) {
  const std::int64_t h = raw.height, w = raw.width;
  Tensor t(Shape{3, h, w});
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      for (std::int64_t c = 0; c < 3; ++c) {
        t[(c * h + y) * w + x] =
            static_cast<float>(raw.pixels[(y * w + x) * 3 + c]) / 255.0f;
      }
    }
  }
  return t;
}

std::uint8_t Quantize(float v) {
  const float clamped = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
}

}  // namespace

Dataset LoadDataset(const fs::path& dir, std::optional<int> target_size) {
  const auto images = PngsByStem(dir / "images");
  const auto masks = PngsByStem(dir / "masks");
  for (const auto& [stem, path] : images) {
    if (!masks.contains(stem)) {
      throw UnpairedFileError("image '" + stem + "' has no mask partner");
    }
  }
  for (const auto& [stem, path] : masks) {
    if (!images.contains(stem)) {
      throw UnpairedFileError("mask '" + stem + "' has no image partner");
    }
  }
  if (images.empty()) throw DataError("no image/mask pairs in " + dir.string());

  Dataset ds;
  ds.provenance = Provenance::kReal;
  for (const auto& [stem, image_path] : images) {
    const RawImage raw_image = ReadPng(image_path, 3);
    const RawImage raw_mask = ReadPng(masks.at(stem), 1);
    if (raw_image.width != raw_image.height) {
      throw DataError("image '" + stem + "' is not square (" +
                      std::to_string(raw_image.width) + "x" +
                      std::to_string(raw_image.height) + ")");
    }
    if (raw_mask.width != raw_image.width || raw_mask.height != raw_image.height) {
      throw DataError("mask '" + stem + "' size differs from its image");
    }
    SegmentationSample s;
    s.id = stem;
    s.image = ImageFromRaw(raw_image);
    s.mask = Mask(raw_mask.height, raw_mask.width);
    for (std::size_t i = 0; i < raw_mask.pixels.size(); ++i) {
      s.mask.values[i] = raw_mask.pixels[i] >= 128 ? 1 : 0;
    }
    if (target_size && *target_size != raw_image.width) {
      s.image = ResizeBilinear(s.image, *target_size);
      s.mask = ResizeNearest(s.mask, *target_size);
    }
    ds.samples.push_back(std::move(s));
  }
  ds.Validate();
  return ds;
}

void WriteImagePng(const Tensor& image, const fs::path& path) {
  if (image.rank() != 3 || image.dim(0) != 3) {
    throw ShapeError("WriteImagePng: expected [3, H, W], got " +
                     ShapeToString(image.shape()));
  }
  RawImage raw;
  raw.height = static_cast<int>(image.dim(1));
  raw.width = static_cast<int>(image.dim(2));
  raw.channels = 3;
  raw.pixels.resize(static_cast<std::size_t>(raw.width) * raw.height * 3);
  const std::int64_t h = raw.height, w = raw.width;
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      for (std::int64_t c = 0; c < 3; ++c) {
        raw.pixels[(y * w + x) * 3 + c] = Quantize(image[(c * h + y) * w + x]);
      }
    }
  }
  WritePng(path, raw);
}

void WriteMaskPng(const Mask& mask, const fs::path& path) {
  RawImage raw;
  raw.height = static_cast<int>(mask.height);
  raw.width = static_cast<int>(mask.width);
  raw.channels = 1;
  raw.pixels.resize(mask.values.size());
  for (std::size_t i = 0; i < mask.values.size(); ++i) {
    raw.pixels[i] = mask.values[i] ? 255 : 0;
  }
  WritePng(path, raw);
}

void SaveDataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");
  for (const auto& s : dataset.samples) {
    WriteImagePng(s.image, dir / "images" / (s.id + ".png"));
    WriteMaskPng(s.mask, dir / "masks" / (s.id + ".png"));
  }
}

namespace {

// Half-pixel-centre source coordinate, clamped to the valid range, split
// into a base index and a fractional weight.
struct Tap {
  std::int64_t lo;
  std::int64_t hi;
  double frac;
};

Tap SourceTap(std::int64_t dst, std::int64_t in, std::int64_t out) {
  double src = (static_cast<double>(dst) + 0.5) * static_cast<double>(in) /
                   static_cast<double>(out) -
               0.5;
  src = std::clamp(src, 0.0, static_cast<double>(in - 1));
  const auto lo = static_cast<std::int64_t>(std::floor(src));
  const std::int64_t hi = std::min(lo + 1, in - 1);
  return {lo, hi, src - static_cast<double>(lo)};
}

}  // namespace

Tensor ResizeBilinear(const Tensor& image, int target) {
  if (image.rank() != 3 || image.dim(1) != image.dim(2)) {
    throw ShapeError("resize: expected a square [C, S, S] image, got " +
                     ShapeToString(image.shape()));
  }
  if (target < 1) throw InvalidArgument("resize: target must be >= 1");
  const std::int64_t c = image.dim(0), in = image.dim(1), out = target;
  if (in == out) return image.Clone();
  std::vector<Tap> taps(static_cast<std::size_t>(out));
  for (std::int64_t i = 0; i < out; ++i) taps[i] = SourceTap(i, in, out);
  Tensor result(Shape{c, out, out});
  for (std::int64_t ch = 0; ch < c; ++ch) {
    const float* src = image.data().data() + ch * in * in;
    float* dst = result.data().data() + ch * out * out;
    for (std::int64_t y = 0; y < out; ++y) {
      const Tap ty = taps[y];
      for (std::int64_t x = 0; x < out; ++x) {
        const Tap tx = taps[x];
        const double top = (1.0 - tx.frac) * src[ty.lo * in + tx.lo] +
                           tx.frac * src[ty.lo * in + tx.hi];
        const double bottom = (1.0 - tx.frac) * src[ty.hi * in + tx.lo] +
                              tx.frac * src[ty.hi * in + tx.hi];
        dst[y * out + x] =
            static_cast<float>((1.0 - ty.frac) * top + ty.frac * bottom);
      }
    }
  }
  return result;
}

Mask ResizeNearest(const Mask& mask, int target) {
  if (mask.height != mask.width) {
    throw ShapeError("resize: mask must be square");
  }
  if (target < 1) throw InvalidArgument("resize: target must be >= 1");
  const std::int64_t in = mask.height, out = target;
  if (in == out) return mask;
  Mask result(out, out);
  auto src_index = [&](std::int64_t d) {
    const auto s = static_cast<std::int64_t>(std::floor(
        (static_cast<double>(d) + 0.5) * static_cast<double>(in) /
        static_cast<double>(out)));
    return std::min(s, in - 1);
  };
  for (std::int64_t y = 0; y < out; ++y) {
    for (std::int64_t x = 0; x < out; ++x) {
      result.at(y, x) = mask.at(src_index(y), src_index(x));
    }
  }
  return result;
}

void SyntheticShapeConfig::Validate() const {
  if (count < 1) throw ConfigError("synthetic count must be >= 1");
  if (size < 4 || (size & (size - 1)) != 0) {
    throw ConfigError("synthetic size must be a power of two >= 4");
  }
  if (min_shapes < 1 || max_shapes < min_shapes) {
    throw ConfigError("synthetic shape range must satisfy 1 <= min <= max");
  }
  if (blob_fraction < 0.0 || blob_fraction > 1.0) {
    throw ConfigError("blob_fraction must lie in [0, 1]");
  }
  if (noise_std < 0.0) throw ConfigError("noise_std must be >= 0");
}

namespace {

struct Shape2D {
  double cx, cy;          // centre (pixels)
  double rx, ry;          // semi-axes
  double angle;           // rotation
  double lobe_amplitude;  // 0 for ellipses
  int lobes;
  double lobe_phase;

  bool Contains(double px, double py) const {
    const double dx = px - cx, dy = py - cy;
    const double ca = std::cos(angle), sa = std::sin(angle);
    const double u = (dx * ca + dy * sa) / rx;
    const double v = (-dx * sa + dy * ca) / ry;
    const double r = std::sqrt(u * u + v * v);
    if (lobe_amplitude == 0.0) return r <= 1.0;
    const double theta = std::atan2(v, u);
    return r <= 1.0 + lobe_amplitude * std::sin(lobes * theta + lobe_phase);
  }
};

}  // namespace

Dataset GenerateSynthetic(const SyntheticShapeConfig& config) {
  config.Validate();
  Dataset ds;
  ds.provenance = Provenance::kSynthetic;
  const std::int64_t s = config.size;
  const double size = static_cast<double>(s);
  const int digits = std::max(4, static_cast<int>(std::to_string(config.count - 1).size()));
  for (int n = 0; n < config.count; ++n) {
    // One stream per sample keeps samples independent of `count`.
    Rng rng(DeriveSeed(config.seed, "synth/" + std::to_string(n)));
    const double background = rng.Uniform(0.08, 0.25);
    const double foreground = rng.Uniform(0.55, 0.85);
    // Low-frequency shading over the whole image.
    const double shade_amp = rng.Uniform(0.0, 0.05);
    const double shade_fx = rng.Uniform(0.5, 2.0) * 2.0 * std::numbers::pi / size;
    const double shade_fy = rng.Uniform(0.5, 2.0) * 2.0 * std::numbers::pi / size;
    const double shade_phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);

    const int shapes = config.min_shapes +
                       static_cast<int>(rng.UniformInt(
                           static_cast<std::uint64_t>(config.max_shapes - config.min_shapes + 1)));
    std::vector<Shape2D> parts;
    for (int k = 0; k < shapes; ++k) {
      Shape2D sh{};
      sh.cx = rng.Uniform(0.2, 0.8) * size;
      sh.cy = rng.Uniform(0.2, 0.8) * size;
      sh.rx = rng.Uniform(0.08, 0.2) * size;
      sh.ry = rng.Uniform(0.08, 0.2) * size;
      sh.angle = rng.Uniform(0.0, std::numbers::pi);
      const bool blob = rng.Uniform() < config.blob_fraction;
      sh.lobe_amplitude = blob ? rng.Uniform(0.1, 0.3) : 0.0;
      sh.lobes = 3 + static_cast<int>(rng.UniformInt(3));
      sh.lobe_phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
      parts.push_back(sh);
    }

    SegmentationSample sample;
    std::string number = std::to_string(n);
    if (static_cast<int>(number.size()) < digits) {
      number.insert(0, static_cast<std::size_t>(digits) - number.size(), '0');
    }
    sample.id = "synth_" + number;
    sample.mask = Mask(s, s);
    for (std::int64_t y = 0; y < s; ++y) {
      for (std::int64_t x = 0; x < s; ++x) {
        const double px = static_cast<double>(x) + 0.5;
        const double py = static_cast<double>(y) + 0.5;
        for (const auto& sh : parts) {
          if (sh.Contains(px, py)) {
            sample.mask.at(y, x) = 1;
            break;
          }
        }
      }
    }
    // The construction guarantees a foreground pixel: the first shape's
    // centre always lies inside it.
    std::int64_t fg = 0;
    for (auto v : sample.mask.values) fg += v;
    if (fg == 0) {
      const auto cy = static_cast<std::int64_t>(parts.front().cy);
      const auto cx = static_cast<std::int64_t>(parts.front().cx);
      sample.mask.at(std::clamp<std::int64_t>(cy, 0, s - 1),
                     std::clamp<std::int64_t>(cx, 0, s - 1)) = 1;
    }

    sample.image = Tensor(Shape{3, s, s});
    for (std::int64_t c = 0; c < 3; ++c) {
      const double tint = rng.Uniform(-0.03, 0.03);
      for (std::int64_t y = 0; y < s; ++y) {
        for (std::int64_t x = 0; x < s; ++x) {
          const double shade =
              shade_amp * std::sin(shade_fx * x + shade_fy * y + shade_phase);
          const double base = sample.mask.at(y, x) ? foreground : background;
          const double v =
              base + tint + shade + rng.Normal(0.0, config.noise_std);
          sample.image[(c * s + y) * s + x] =
              static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
      }
    }
    ds.samples.push_back(std::move(sample));
  }
  ds.Validate();
  return ds;
}

std::pair<Dataset, Dataset> Split(const Dataset& dataset, double fraction,
                                  std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("split fraction must lie in (0, 1)");
  }
  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order.begin(), order.end());
  auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> val_idx(order.begin() + n_train, order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  Dataset train, validation;
  train.split = SplitTag::kTrain;
  validation.split = SplitTag::kValidation;
  train.provenance = validation.provenance = dataset.provenance;
  for (std::size_t i : train_idx) train.samples.push_back(dataset.samples[i]);
  for (std::size_t i : val_idx) validation.samples.push_back(dataset.samples[i]);
  return {std::move(train), std::move(validation)};
}

Tensor StackImages(std::span<const SegmentationSample* const> samples) {
  if (samples.empty()) throw InvalidArgument("cannot stack an empty batch");
  const Shape& one = samples.front()->image.shape();
  const std::int64_t per = NumElements(one);
  Tensor batch(Shape{static_cast<std::int64_t>(samples.size()), one[0], one[1], one[2]});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i]->image.shape() != one) {
      throw ShapeError("cannot stack images of different shapes");
    }
    std::copy_n(samples[i]->image.data().data(), per,
                batch.data().data() + static_cast<std::int64_t>(i) * per);
  }
  return batch;
}

ClassMap StackMasks(std::span<const SegmentationSample* const> samples) {
  if (samples.empty()) throw InvalidArgument("cannot stack an empty batch");
  ClassMap out;
  out.batch = static_cast<std::int64_t>(samples.size());
  out.height = samples.front()->mask.height;
  out.width = samples.front()->mask.width;
  out.values.reserve(static_cast<std::size_t>(out.size()));
  for (const auto* s : samples) {
    if (s->mask.height != out.height || s->mask.width != out.width) {
      throw ShapeError("cannot stack masks of different shapes");
    }
    out.values.insert(out.values.end(), s->mask.values.begin(), s->mask.values.end());
  }
  return out;
}

namespace {

std::vector<const SegmentationSample*> Pointers(const Dataset& dataset) {
  std::vector<const SegmentationSample*> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) out.push_back(&s);
  return out;
}

}  // namespace

Tensor StackImages(const Dataset& dataset) { return StackImages(Pointers(dataset)); }
ClassMap StackMasks(const Dataset& dataset) { return StackMasks(Pointers(dataset)); }

std::string FormatFixed4(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

namespace {

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<std::vector<std::string>> ReadCsv(const fs::path& path,
                                              const std::string& header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError(path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

double ParseDouble(const std::string& s, const fs::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": bad number '" + s + "'");
  }
}

constexpr char kMetricsHeader[] = "experiment,epoch,mean_iou";
constexpr char kSweepHeader[] = "direction,epsilon,adv_trained,mean_iou";

}  // namespace

void WriteMetricsCsv(std::span<const MetricRecord> records, const fs::path& path) {
  std::string text = std::string(kMetricsHeader) + "\n";
  for (const auto& r : records) {
    text += r.experiment + "," + std::to_string(r.epoch) + "," +
            FormatFixed4(r.mean_iou) + "\n";
  }
  WriteText(path, text);
}

std::vector<MetricRecord> ReadMetricsCsv(const fs::path& path) {
  std::vector<MetricRecord> out;
  for (const auto& f : ReadCsv(path, kMetricsHeader)) {
    if (f.size() != 3) throw FormatError(path.string() + ": expected 3 fields");
    out.push_back({f[0], static_cast<int>(ParseDouble(f[1], path)),
                   ParseDouble(f[2], path)});
  }
  return out;
}

void WriteSweepCsv(std::span<const RobustnessRow> rows, const fs::path& path) {
  std::string text = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) {
    text += std::string(ToString(r.direction)) + "," + FormatFixed4(r.epsilon) +
            "," + (r.adversarially_trained ? "true" : "false") + "," +
            FormatFixed4(r.mean_iou) + "\n";
  }
  WriteText(path, text);
}

std::vector<RobustnessRow> ReadSweepCsv(const fs::path& path) {
  std::vector<RobustnessRow> out;
  for (const auto& f : ReadCsv(path, kSweepHeader)) {
    if (f.size() != 4) throw FormatError(path.string() + ": expected 4 fields");
    if (f[2] != "true" && f[2] != "false") {
      throw FormatError(path.string() + ": bad adv_trained '" + f[2] + "'");
    }
    RobustnessRow r;
    r.direction = ParseAttackDirection(f[0]);
    r.epsilon = ParseDouble(f[1], path);
    r.adversarially_trained = f[2] == "true";
    r.mean_iou = ParseDouble(f[3], path);
    out.push_back(r);
  }
  return out;
}

void WriteSweepSvg(std::span<const RobustnessRow> rows, const fs::path& path) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 180, kTop = 20,
                   kBottom = 50;
  double max_eps = 0.0;
  for (const auto& r : rows) max_eps = std::max(max_eps, r.epsilon);
  if (max_eps <= 0.0) max_eps = 1.0;
  auto px = [&](double eps) { return kLeft + eps / max_eps * (kW - kLeft - kRight); };
  auto py = [&](double iou) { return kTop + (1.0 - iou) * (kH - kTop - kBottom); };

  std::map<std::pair<int, bool>, std::vector<std::pair<double, double>>> series;
  for (const auto& r : rows) {
    series[{static_cast<int>(r.direction), r.adversarially_trained}].push_back(
        {r.epsilon, r.mean_iou});
  }
  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                            "#d62728"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << px(max_eps)
     << "\" y2=\"" << py(0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft
     << "\" y2=\"" << py(1) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4
       << "\" text-anchor=\"end\">" << FormatFixed4(v).substr(0, 4) << "</text>\n";
    const double e = max_eps * i / 4.0;
    os << "<text x=\"" << px(e) << "\" y=\"" << py(0) + 18
       << "\" text-anchor=\"middle\">" << FormatFixed4(e) << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + px(max_eps)) / 2 << "\" y=\"" << kH - 10
     << "\" text-anchor=\"middle\">epsilon</text>\n";
  os << "<text x=\"15\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 15 " << kH / 2
     << ")\" text-anchor=\"middle\">mean IoU</text>\n";
  int index = 0;
  for (auto& [key, points] : series) {
    std::sort(points.begin(), points.end());
    const char* color = kColors[index % 4];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [e, v] : points) os << px(e) << ',' << py(v) << ' ';
    os << "\"/>\n";
    const std::string label =
        std::string(ToString(static_cast<AttackDirection>(key.first))) +
        (key.second ? " (adv. trained)" : " (baseline)");
    os << "<text x=\"" << kW - kRight + 10 << "\" y=\"" << kTop + 20 + 18 * index
       << "\" fill=\"" << color << "\">" << label << "</text>\n";
    ++index;
  }
  os << "</svg>\n";
  WriteText(path, os.str());
}

}  // namespace advseg
