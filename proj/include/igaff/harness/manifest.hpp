#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "igaff/imagecore/image.hpp"
#include "igaff/models/victim.hpp"

namespace igaff {

struct ManifestEntry {
  std::filesystem::path path;  // as written; relative paths resolve against the manifest directory
  int class_index = 0;
};

/// CSV `path,class_index` plus a JSON sidecar with the same stem:
/// {"num_classes": K, "shape": [C,H,W], "class_names": [...]}.
/// `shape` is the preprocessed size images are resized to on load.
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  std::vector<std::string> class_names;
  int num_classes = 0;
  Shape shape;

  static DatasetManifest load(const std::filesystem::path& csv);
  /// Writes the CSV and its sidecar. Paths are written as stored.
  void save(const std::filesystem::path& csv) const;

  std::filesystem::path resolve(const ManifestEntry& e) const;
  /// Throws std::invalid_argument on an empty manifest or bad class index.
  void validate() const;
};

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Images resized to the manifest shape, with their labels.
struct Dataset {
  Shape shape;
  int num_classes = 0;
  std::vector<Image> images;
  Labels labels;

  std::size_t size() const noexcept { return images.size(); }
  Batch batch(std::size_t begin, std::size_t end) const;
  Labels batch_labels(std::size_t begin, std::size_t end) const;
};

Dataset load_dataset(const DatasetManifest& manifest);

/// Contiguous [begin, end) ranges of at most batch_size items.
std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n, std::size_t batch_size);

struct ManifestSplit {
  DatasetManifest train, validation, test;
};

/// Seeded shuffle into train/validation/test by the given fractions
/// (test receives the remainder).
ManifestSplit split_manifest(const DatasetManifest& m, double train_fraction, double validation_fraction,
                             std::uint64_t seed);

}  // namespace igaff
