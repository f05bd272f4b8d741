// Regenerates the committed test fixtures: a 32-image quadrant dataset and
// linear/mlp1 weights that classify it.
//
//   igaff_make_fixtures <out_dir>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "igaff/harness/manifest.hpp"
#include "igaff/imagecore/io.hpp"
#include "igaff/imagecore/rng.hpp"
#include "json.hpp"

namespace {

using namespace igaff;
namespace fs = std::filesystem;

constexpr int kClasses = 4;
constexpr int kPerClass = 8;
constexpr Shape kShape{3, 16, 16};

// Quadrant q (0 TL, 1 TR, 2 BL, 3 BR) of pixel (y, x).
int quadrant(int y, int x) { return (y >= kShape.height / 2 ? 2 : 0) + (x >= kShape.width / 2 ? 1 : 0); }

Image make_image(int cls, RngStream& rng) {
  Image img(kShape);
  const double base = rng.uniform(0.35, 0.45);
  const double lift = rng.uniform(0.12, 0.22);
  for (int c = 0; c < kShape.channels; ++c)
    for (int y = 0; y < kShape.height; ++y)
      for (int x = 0; x < kShape.width; ++x) {
        const double v = base + (quadrant(y, x) == cls ? lift : 0.0) + rng.uniform(-0.08, 0.08);
        // Quantize to 1/255 so the images also survive a PPM round trip.
        img.at(c, y, x) = static_cast<float>(std::clamp(std::round(v * 255.0), 0.0, 255.0) / 255.0);
      }
  return img;
}

void write_tensor(const fs::path& p, std::vector<std::uint32_t> dims, std::vector<float> data) {
  write_igt(p, Tensor{std::move(dims), std::move(data)});
}

// Zero-mean quadrant template for class k, scaled per pixel.
std::vector<float> quadrant_template(int k, double scale) {
  std::vector<float> w(kShape.numel());
  std::size_t i = 0;
  for (int c = 0; c < kShape.channels; ++c)
    for (int y = 0; y < kShape.height; ++y)
      for (int x = 0; x < kShape.width; ++x) w[i++] = static_cast<float>(scale * (quadrant(y, x) == k ? 0.75 : -0.25));
  return w;
}

void write_linear(const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<float> weight;
  for (int k = 0; k < kClasses; ++k) {
    auto t = quadrant_template(k, 0.05);
    weight.insert(weight.end(), t.begin(), t.end());
  }
  write_tensor(dir / "weight.igt", {kClasses, static_cast<std::uint32_t>(kShape.numel())}, weight);
  write_tensor(dir / "bias.igt", {kClasses}, std::vector<float>(kClasses, 0.0f));
  nlohmann::ordered_json j;
  j["kind"] = "linear";
  j["input_shape"] = {kShape.channels, kShape.height, kShape.width};
  j["num_classes"] = kClasses;
  j["tensors"] = {{"weight", "weight.igt"}, {"bias", "bias.igt"}};
  std::ofstream(dir / "model.json") << j.dump(2) << '\n';
}

void write_mlp(const fs::path& dir) {
  fs::create_directories(dir);
  constexpr int kHidden = 8;
  RngStream rng(0x4D4C5031);
  // Hidden unit h detects quadrant h % 4 with a small random perturbation.
  std::vector<float> w1, b1(kHidden, 0.0f), w2, b2(kClasses, 0.0f);
  for (int h = 0; h < kHidden; ++h) {
    auto t = quadrant_template(h % kClasses, 0.04);
    for (auto& v : t) v += static_cast<float>(rng.uniform(-0.01, 0.01));
    w1.insert(w1.end(), t.begin(), t.end());
  }
  for (int k = 0; k < kClasses; ++k)
    for (int h = 0; h < kHidden; ++h) w2.push_back(static_cast<float>(h % kClasses == k ? 1.0 : -0.3));
  write_tensor(dir / "hidden_weight.igt", {kHidden, static_cast<std::uint32_t>(kShape.numel())}, w1);
  write_tensor(dir / "hidden_bias.igt", {kHidden}, b1);
  write_tensor(dir / "output_weight.igt", {kClasses, kHidden}, w2);
  write_tensor(dir / "output_bias.igt", {kClasses}, b2);
  nlohmann::ordered_json j;
  j["kind"] = "mlp1";
  j["input_shape"] = {kShape.channels, kShape.height, kShape.width};
  j["num_classes"] = kClasses;
  j["hidden"] = kHidden;
  j["tensors"] = {{"hidden_weight", "hidden_weight.igt"},
                  {"hidden_bias", "hidden_bias.igt"},
                  {"output_weight", "output_weight.igt"},
                  {"output_bias", "output_bias.igt"}};
  std::ofstream(dir / "model.json") << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: igaff_make_fixtures <out_dir>\n";
    return 2;
  }
  const fs::path out = argv[1];
  fs::create_directories(out / "images");

  DatasetManifest m;
  m.root = out;
  m.num_classes = kClasses;
  m.shape = kShape;
  m.class_names = {"top_left", "top_right", "bottom_left", "bottom_right"};
  RngStream rng(0x46495854);
  // Interleave classes so every batch mixes them.
  for (int i = 0; i < kClasses * kPerClass; ++i) {
    const int cls = i % kClasses;
    char name[32];
    std::snprintf(name, sizeof name, "img_%02d.igt", i);
    save_image(make_image(cls, rng), out / "images" / name);
    m.entries.push_back({fs::path("images") / name, cls});
  }
  m.save(out / "manifest.csv");
  write_linear(out / "linear");
  write_mlp(out / "mlp1");
  std::cout << "wrote fixtures to " << out.string() << '\n';
  return 0;
}
