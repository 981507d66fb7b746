#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deba/embed.hpp"
#include "deba/image.hpp"

namespace deba {

struct LabeledDataset {
  std::vector<ImageTensor> images;  // uniform shape
  std::vector<int> labels;          // each < class_count
  int class_count = 0;

  std::size_t size() const { return images.size(); }
};

// InvalidInput if sizes disagree, a label is out of range, or image
// shapes are not uniform.
void validate(const LabeledDataset& ds);

// Record of one poisoning campaign: enough to audit which samples were
// touched and to restore the clean labeling. Hashes are 16-digit hex.
struct DatasetManifest {
  std::string config_hash;
  std::vector<std::size_t> poisoned_indices;  // strictly increasing
  std::vector<int> original_labels;           // aligned with poisoned_indices
  int target_label = 0;
  std::string trigger_digest;
  std::string tool_version;

  friend bool operator==(const DatasetManifest&,
                         const DatasetManifest&) = default;
};

// CIFAR-10 binary: 3073-byte records, 1 label byte then the 32x32 R, G
// and B planes row-major. Pixels map byte -> value/255. FormatError on a
// size that is not a multiple of 3073 or a label byte >= 10.
LabeledDataset load_cifar10(const std::string& path);
void save_cifar10(const LabeledDataset& ds, const std::string& path);

// Binary PPM (P6), maxval 255. The reader follows the PNM grammar:
// '#' comments and arbitrary whitespace between header tokens.
ImageTensor load_ppm(const std::string& path);
void save_ppm(const ImageTensor& img, const std::string& path);

// FNV-1a over "h|w|c|" followed by the quantized plane bytes in channel
// order; identifies prepared trigger content in manifests.
std::uint64_t content_digest(const ImageTensor& img);

struct PoisonResult {
  LabeledDataset dataset;
  DatasetManifest manifest;
  std::vector<std::string> warnings;
};

// All-to-One training-set poisoning: floor(p * N) indices drawn without
// replacement from the seeded generator, each replaced by
// embed(clean, trigger, cfg) and relabeled to cfg.target_label. Everything
// else is untouched. A positive rate that floors to zero samples yields a
// warning instead of an error.
PoisonResult build_poisoned_set(const LabeledDataset& ds,
                                const ImageTensor& trigger,
                                const PoisonConfig& cfg);

// Poisoned inference inputs: every sample whose label differs from the
// target is embedded (true labels kept for bookkeeping); samples already
// of the target class are dropped.
LabeledDataset apply_trigger_to_test_set(const LabeledDataset& ds,
                                         const ImageTensor& trigger,
                                         const PoisonConfig& cfg);

// Canonical JSON with a fixed key order and a trailing integrity hash
// over the payload; loading recomputes the hash (FormatError on tamper).
std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& text);
void save_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

}  // namespace deba
