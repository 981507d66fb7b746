#include "deba/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "deba/errors.hpp"
#include "deba/hash.hpp"
#include "deba/rng.hpp"
#include "deba/version.hpp"

namespace deba {

namespace {

constexpr int kCifarDim = 32;
constexpr std::size_t kCifarPlane = 1024;          // 32 * 32
constexpr std::size_t kCifarRecord = 1 + 3 * 1024;  // 3073
constexpr int kCifarClasses = 10;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path);
}

}  // namespace

void validate(const LabeledDataset& ds) {
  if (ds.images.size() != ds.labels.size())
    throw InvalidInput("dataset: image and label counts differ");
  if (ds.class_count < 1) throw InvalidInput("dataset: class_count must be >= 1");
  for (int label : ds.labels) {
    if (label < 0 || label >= ds.class_count)
      throw InvalidInput("dataset: label out of range");
  }
  for (const auto& img : ds.images) {
    validate(img);
    if (!same_shape(img, ds.images.front()))
      throw InvalidInput("dataset: image shapes are not uniform");
  }
}

LabeledDataset load_cifar10(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() % kCifarRecord != 0)
    throw FormatError(path + ": size is not a multiple of 3073 bytes");

  LabeledDataset ds;
  ds.class_count = kCifarClasses;
  const std::size_t n = bytes.size() / kCifarRecord;
  ds.images.reserve(n);
  ds.labels.reserve(n);

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t rec = 0; rec < n; ++rec, p += kCifarRecord) {
    const int label = p[0];
    if (label >= kCifarClasses)
      throw FormatError(path + ": label byte out of range at record " +
                        std::to_string(rec));
    ImageTensor img;
    img.space = ColorSpace::kRgb;
    img.planes.assign(3, RealMatrix(kCifarDim, kCifarDim));
    for (std::size_t c = 0; c < 3; ++c) {
      const unsigned char* plane = p + 1 + c * kCifarPlane;
      for (std::size_t i = 0; i < kCifarPlane; ++i) {
        img.planes[c].data()[i] = from_byte(plane[i]);
      }
    }
    ds.labels.push_back(label);
    ds.images.push_back(std::move(img));
  }
  return ds;
}

void save_cifar10(const LabeledDataset& ds, const std::string& path) {
  validate(ds);
  std::string bytes;
  bytes.reserve(ds.size() * kCifarRecord);
  for (std::size_t rec = 0; rec < ds.size(); ++rec) {
    const ImageTensor& img = ds.images[rec];
    if (img.space != ColorSpace::kRgb || img.height() != kCifarDim ||
        img.width() != kCifarDim)
      throw InvalidInput("save_cifar10: images must be 32x32 RGB");
    bytes.push_back(static_cast<char>(ds.labels[rec]));
    for (const auto& plane : img.planes) {
      for (std::size_t i = 0; i < plane.size(); ++i) {
        bytes.push_back(static_cast<char>(to_byte(plane.data()[i])));
      }
    }
  }
  write_file(path, bytes);
}

namespace {

// PNM token scanner: skips whitespace and '#' comments.
class PnmScanner {
 public:
  PnmScanner(const std::string& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  std::string next_token() {
    skip_separators();
    if (pos_ >= bytes_.size()) throw FormatError(path_ + ": truncated header");
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_]) &&
           bytes_[pos_] != '#') {
      ++pos_;
    }
    return bytes_.substr(start, pos_ - start);
  }

  int next_int() {
    const std::string tok = next_token();
    for (char c : tok) {
      if (c < '0' || c > '9')
        throw FormatError(path_ + ": expected integer in header, got '" + tok +
                          "'");
    }
    if (tok.empty() || tok.size() > 9)
      throw FormatError(path_ + ": bad integer in header");
    return std::stoi(tok);
  }

  // The header ends with exactly one whitespace byte before the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
      throw FormatError(path_ + ": missing separator before raster");
    return pos_ + 1;
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  }

  void skip_separators() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

ImageTensor load_ppm(const std::string& path) {
  const std::string bytes = read_file(path);
  PnmScanner scan(bytes, path);
  if (scan.next_token() != "P6") throw FormatError(path + ": not a P6 PPM");
  const int width = scan.next_int();
  const int height = scan.next_int();
  const int maxval = scan.next_int();
  if (width < 1 || height < 1) throw FormatError(path + ": bad dimensions");
  if (maxval != 255) throw FormatError(path + ": maxval must be 255");

  const std::size_t offset = scan.raster_offset();
  const std::size_t need = static_cast<std::size_t>(width) *
                           static_cast<std::size_t>(height) * 3;
  if (bytes.size() - offset < need)
    throw FormatError(path + ": truncated raster");

  ImageTensor img;
  img.space = ColorSpace::kRgb;
  img.planes.assign(3, RealMatrix(height, width));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + offset;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.planes[static_cast<std::size_t>(c)](y, x) = from_byte(*p++);
      }
    }
  }
  return img;
}

void save_ppm(const ImageTensor& img, const std::string& path) {
  validate(img);
  if (img.space != ColorSpace::kRgb)
    throw InvalidInput("save_ppm: expected an RGB image");
  std::string bytes = "P6\n" + std::to_string(img.width()) + " " +
                      std::to_string(img.height()) + "\n255\n";
  bytes.reserve(bytes.size() +
                static_cast<std::size_t>(img.width()) * img.height() * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        bytes.push_back(static_cast<char>(
            to_byte(img.planes[static_cast<std::size_t>(c)](y, x))));
      }
    }
  }
  write_file(path, bytes);
}

std::uint64_t content_digest(const ImageTensor& img) {
  validate(img);
  const std::string header = std::to_string(img.height()) + "|" +
                             std::to_string(img.width()) + "|" +
                             std::to_string(img.channels()) + "|";
  std::uint64_t h = fnv1a64(header);
  for (const auto& plane : img.planes) {
    for (std::size_t i = 0; i < plane.size(); ++i) {
      const std::uint8_t b = to_byte(plane.data()[i]);
      h = fnv1a64(&b, 1, h);
    }
  }
  return h;
}

namespace {

// floor(p * N), tolerating products one ULP below the exact decimal
// value (0.3 * 10 must count as 3, not 2).
std::size_t poison_count(double rate, std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(rate * static_cast<double>(n) + 1e-9));
}

}  // namespace

PoisonResult build_poisoned_set(const LabeledDataset& ds,
                                const ImageTensor& trigger,
                                const PoisonConfig& cfg) {
  validate(ds);
  validate(cfg);
  if (cfg.target_label >= ds.class_count)
    throw InvalidInput("build_poisoned_set: target label out of range");

  PoisonResult result;
  result.dataset = ds;
  result.manifest.config_hash = hash_to_hex(cfg.hash());
  result.manifest.target_label = cfg.target_label;
  result.manifest.tool_version = kToolVersion;

  if (!ds.images.empty()) {
    const ImageTensor prepared = prepare_trigger(
        trigger, ds.images.front().height(), ds.images.front().width());
    result.manifest.trigger_digest = hash_to_hex(content_digest(prepared));
  } else {
    result.manifest.trigger_digest = hash_to_hex(content_digest(trigger));
  }

  const std::size_t count = poison_count(cfg.poison_rate, ds.size());
  if (count == 0) {
    if (cfg.poison_rate > 0.0 && !ds.images.empty()) {
      result.warnings.push_back(
          "poison rate " + std::to_string(cfg.poison_rate) + " selects 0 of " +
          std::to_string(ds.size()) + " samples");
    }
    return result;
  }

  SplitMix64 rng(cfg.seed);
  const std::vector<std::size_t> chosen = sample_indices(ds.size(), count, rng);

  result.manifest.poisoned_indices = chosen;
  result.manifest.original_labels.reserve(chosen.size());
  for (std::size_t idx : chosen) {
    result.manifest.original_labels.push_back(ds.labels[idx]);
    result.dataset.images[idx] = embed(ds.images[idx], trigger, cfg);
    result.dataset.labels[idx] = cfg.target_label;
  }
  return result;
}

LabeledDataset apply_trigger_to_test_set(const LabeledDataset& ds,
                                         const ImageTensor& trigger,
                                         const PoisonConfig& cfg) {
  validate(ds);
  validate(cfg);
  if (cfg.target_label >= ds.class_count)
    throw InvalidInput("apply_trigger_to_test_set: target label out of range");

  LabeledDataset out;
  out.class_count = ds.class_count;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] == cfg.target_label) continue;
    out.images.push_back(embed(ds.images[i], trigger, cfg));
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

namespace {

using OrderedJson = nlohmann::ordered_json;

OrderedJson manifest_payload(const DatasetManifest& m) {
  OrderedJson j;
  j["config_hash"] = m.config_hash;
  j["poisoned_indices"] = m.poisoned_indices;
  j["original_labels"] = m.original_labels;
  j["target_label"] = m.target_label;
  j["trigger_digest"] = m.trigger_digest;
  j["tool_version"] = m.tool_version;
  return j;
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& m) {
  OrderedJson j = manifest_payload(m);
  j["manifest_hash"] = hash_to_hex(fnv1a64(manifest_payload(m).dump()));
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest: malformed JSON: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.config_hash = j.at("config_hash").get<std::string>();
    m.poisoned_indices = j.at("poisoned_indices").get<std::vector<std::size_t>>();
    m.original_labels = j.at("original_labels").get<std::vector<int>>();
    m.target_label = j.at("target_label").get<int>();
    m.trigger_digest = j.at("trigger_digest").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    const auto stored = j.at("manifest_hash").get<std::string>();
    const std::string expected = hash_to_hex(fnv1a64(manifest_payload(m).dump()));
    if (stored != expected)
      throw FormatError("manifest: integrity hash mismatch");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest: missing or mistyped field: ") +
                      e.what());
  }
  if (m.poisoned_indices.size() != m.original_labels.size())
    throw FormatError("manifest: index/label count mismatch");
  for (std::size_t i = 1; i < m.poisoned_indices.size(); ++i) {
    if (m.poisoned_indices[i] <= m.poisoned_indices[i - 1])
      throw FormatError("manifest: poisoned_indices not strictly increasing");
  }
  return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
  write_file(path, manifest_to_json(m));
}

DatasetManifest load_manifest(const std::string& path) {
  return manifest_from_json(read_file(path));
}

}  // namespace deba
