#include "igaff/harness/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "igaff/imagecore/io.hpp"
#include "igaff/imagecore/rng.hpp"
#include "igaff/imagecore/transform.hpp"
#include "json.hpp"

namespace igaff {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_class_index(const std::string& text, const fs::path& csv, int line) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument(csv.string() + ":" + std::to_string(line) + ": bad class index '" + text + "'");
  return v;
}

}  // namespace

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  return p.replace_extension(".json");
}

DatasetManifest DatasetManifest::load(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot open manifest " + csv.string());

  DatasetManifest m;
  m.root = csv.has_parent_path() ? csv.parent_path() : fs::path(".");

  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "path,class_index") continue;
    }
    if (line.find('"') != std::string::npos)
      throw std::invalid_argument(csv.string() + ":" + std::to_string(lineno) + ": quoted fields are not supported");
    const auto comma = line.rfind(',');
    if (comma == std::string::npos)
      throw std::invalid_argument(csv.string() + ":" + std::to_string(lineno) + ": expected path,class_index");
    ManifestEntry e;
    e.path = trim(line.substr(0, comma));
    e.class_index = parse_class_index(trim(line.substr(comma + 1)), csv, lineno);
    if (e.path.empty()) throw std::invalid_argument(csv.string() + ":" + std::to_string(lineno) + ": empty path");
    m.entries.push_back(std::move(e));
  }

  const fs::path side = sidecar_path(csv);
  std::ifstream sin(side);
  if (!sin) throw std::runtime_error("cannot open manifest sidecar " + side.string());
  nlohmann::json j;
  try {
    sin >> j;
    m.num_classes = j.at("num_classes").get<int>();
    const auto shape = j.at("shape").get<std::vector<int>>();
    if (shape.size() != 3) throw std::invalid_argument("shape must be [C,H,W]");
    m.shape = {shape[0], shape[1], shape[2]};
    if (j.contains("class_names")) m.class_names = j.at("class_names").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(side.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

void DatasetManifest::save(const fs::path& csv) const {
  {
    std::ofstream out(csv);
    if (!out) throw std::runtime_error("cannot write manifest " + csv.string());
    out << "path,class_index\n";
    for (const auto& e : entries) out << e.path.generic_string() << ',' << e.class_index << '\n';
  }
  nlohmann::ordered_json j;
  j["num_classes"] = num_classes;
  j["shape"] = {shape.channels, shape.height, shape.width};
  if (!class_names.empty()) j["class_names"] = class_names;
  std::ofstream out(sidecar_path(csv));
  if (!out) throw std::runtime_error("cannot write manifest sidecar " + sidecar_path(csv).string());
  out << j.dump(2) << '\n';
}

fs::path DatasetManifest::resolve(const ManifestEntry& e) const {
  return e.path.is_absolute() ? e.path : root / e.path;
}

void DatasetManifest::validate() const {
  if (entries.empty()) throw std::invalid_argument("manifest has no entries");
  if (num_classes < 1) throw std::invalid_argument("manifest num_classes must be >= 1");
  if (shape.channels < 1 || shape.height < 1 || shape.width < 1)
    throw std::invalid_argument("manifest shape must be positive, got " + shape.str());
  if (!class_names.empty() && class_names.size() != static_cast<std::size_t>(num_classes))
    throw std::invalid_argument("manifest class_names has " + std::to_string(class_names.size()) + " names for " +
                                std::to_string(num_classes) + " classes");
  for (const auto& e : entries)
    if (e.class_index < 0 || e.class_index >= num_classes)
      throw std::invalid_argument("manifest entry " + e.path.string() + " has class " +
                                  std::to_string(e.class_index) + " outside [0, " + std::to_string(num_classes) + ")");
}

Batch Dataset::batch(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > images.size()) throw std::out_of_range("dataset batch range out of bounds");
  return Batch(std::vector<Image>(images.begin() + static_cast<std::ptrdiff_t>(begin),
                                  images.begin() + static_cast<std::ptrdiff_t>(end)));
}

Labels Dataset::batch_labels(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > labels.size()) throw std::out_of_range("dataset batch range out of bounds");
  return Labels(labels.begin() + static_cast<std::ptrdiff_t>(begin), labels.begin() + static_cast<std::ptrdiff_t>(end));
}

Dataset load_dataset(const DatasetManifest& manifest) {
  manifest.validate();
  Dataset d;
  d.shape = manifest.shape;
  d.num_classes = manifest.num_classes;
  d.images.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    const fs::path p = manifest.resolve(e);
    Image img = load_image(p);
    if (img.channels() != manifest.shape.channels)
      throw IoError(IoErrorKind::kDimensionMismatch,
                    p.string() + " has " + std::to_string(img.channels()) + " channels, manifest expects " +
                        std::to_string(manifest.shape.channels));
    d.images.push_back(resize_to(img, manifest.shape));
    d.labels.push_back(e.class_index);
  }
  return d;
}

std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n, std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < n; b += batch_size) out.emplace_back(b, std::min(n, b + batch_size));
  return out;
}

ManifestSplit split_manifest(const DatasetManifest& m, double train_fraction, double validation_fraction,
                             std::uint64_t seed) {
  if (train_fraction < 0 || validation_fraction < 0 || train_fraction + validation_fraction > 1.0)
    throw std::invalid_argument("split fractions must be non-negative and sum to at most 1");
  const std::size_t n = m.entries.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Fisher-Yates on our own stream so the split does not depend on the
  // standard library's shuffle.
  RngStream rng(seed);
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);

  const auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(n));
  const auto n_val = std::min(n - n_train, static_cast<std::size_t>(validation_fraction * static_cast<double>(n)));
  ManifestSplit s{m, m, m};
  s.train.entries.clear();
  s.validation.entries.clear();
  s.test.entries.clear();
  for (std::size_t k = 0; k < n; ++k) {
    auto& dst = k < n_train ? s.train : (k < n_train + n_val ? s.validation : s.test);
    dst.entries.push_back(m.entries[order[k]]);
  }
  return s;
}

}  // namespace igaff
