#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "igaff/imagecore/io.hpp"
#include "igaff/models/builtin.hpp"
#include "igaff/models/loss.hpp"
#include "igaff/models/victim.hpp"

using namespace igaff;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(IGAFF_TEST_DATA) / "fixture";

Batch single(const Image& img) { return Batch({img}); }

}  // namespace

TEST_CASE("softmax sums to one and is shift invariant") {
  const std::vector<double> row{1.0, -2.0, 0.5, 3.0};
  const auto p = softmax(std::span<const double>(row));
  double s = 0.0;
  for (double v : p) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> shifted = row;
  for (double& v : shifted) v += 1000.0;
  const auto q = softmax(std::span<const double>(shifted));
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - q[i]) < 1e-9);

  // Shifts that are exact in float give identical float-row results.
  const std::vector<float> fr{0.5f, 1.5f, -1.0f};
  const std::vector<float> fs{64.5f, 65.5f, 63.0f};
  const auto a = softmax(std::span<const float>(fr));
  const auto b = softmax(std::span<const float>(fs));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("softmax survives large logits") {
  const std::vector<double> row{1000.0, 0.0};
  const auto p = softmax(std::span<const double>(row));
  CHECK(p[0] == 1.0);
  CHECK(p[1] >= 0.0);
}

TEST_CASE("cross-entropy closed forms") {
  // K equal logits: ln K.
  for (int k : {2, 3, 10}) {
    const std::vector<float> row(static_cast<std::size_t>(k), 0.25f);
    CHECK(std::abs(cross_entropy_row(std::span<const float>(row), 0) - std::log(static_cast<double>(k))) < 1e-9);
  }
  // Two logits (0, ln 3): label 0 costs ln 4, label 1 costs ln(4/3).
  const std::vector<double> two{0.0, std::log(3.0)};
  CHECK(std::abs(cross_entropy_row(std::span<const double>(two), 0) - std::log(4.0)) < 1e-9);
  CHECK(std::abs(cross_entropy_row(std::span<const double>(two), 1) - std::log(4.0 / 3.0)) < 1e-9);
  // Shift invariance.
  const std::vector<double> two_shift{500.0, 500.0 + std::log(3.0)};
  CHECK(std::abs(cross_entropy_row(std::span<const double>(two_shift), 0) - std::log(4.0)) < 1e-9);
}

TEST_CASE("cross-entropy batch mean and errors") {
  LogitsBatch l(2, 2, {0.0f, 0.0f, 0.0f, 0.0f});
  CHECK(std::abs(cross_entropy(l, {0, 1}) - std::log(2.0)) < 1e-12);
  CHECK_THROWS_AS(cross_entropy(l, {0}), std::invalid_argument);
  CHECK_THROWS_AS(cross_entropy(l, {0, 2}), std::out_of_range);
  CHECK_THROWS_AS(LogitsBatch(2, 2, {0.0f}), std::invalid_argument);
}

TEST_CASE("argmax picks the lowest index among ties") {
  const std::vector<float> row{1.0f, 3.0f, 3.0f, 2.0f};
  CHECK(argmax(row) == 1);
}

TEST_CASE("check_labels") {
  CHECK_NOTHROW(check_labels({0, 1, 2}, 3));
  CHECK_THROWS_AS(check_labels({0, 3}, 3), std::out_of_range);
  CHECK_THROWS_AS(check_labels({-1}, 3), std::out_of_range);
}

TEST_CASE("linear model matches a hand computation") {
  // D = 2 (1x1x2 input), K = 2.
  LinearModel m({1, 1, 2}, 2, {1.0f, 2.0f, -1.0f, 0.5f}, {0.25f, -0.5f});
  const auto l = m.predict(single(Image({1, 1, 2}, std::vector<float>{0.5f, 0.25f})));
  REQUIRE(l.rows() == 1);
  CHECK(l.row(0)[0] == doctest::Approx(0.5 + 0.5 + 0.25));
  CHECK(l.row(0)[1] == doctest::Approx(-0.5 + 0.125 - 0.5));
  CHECK_THROWS_AS(m.predict(single(Image({1, 2, 2}))), ModelError);
  CHECK_THROWS_AS(LinearModel({1, 1, 2}, 2, {1.0f}, {0.0f, 0.0f}), ModelError);
}

TEST_CASE("mlp1 model applies ReLU between layers") {
  // Hidden: h0 = x0 - x1, h1 = x1 - x0. Output: y0 = h0, y1 = h1 + 0.1.
  Mlp1Model m({1, 1, 2}, 2, 2, {1, -1, -1, 1}, {0, 0}, {1, 0, 0, 1}, {0.0f, 0.1f});
  const auto l = m.predict(single(Image({1, 1, 2}, std::vector<float>{0.75f, 0.25f})));
  CHECK(l.row(0)[0] == doctest::Approx(0.5));
  CHECK(l.row(0)[1] == doctest::Approx(0.1));  // h1 = -0.5 clipped to 0
}

TEST_CASE("brightness oracle logits and bins") {
  BrightnessOracle m({1, 2, 2}, 4);
  CHECK(m.sharpness() == 200.0);
  const Image img({1, 2, 2}, std::vector<float>{0.25f, 0.25f, 0.5f, 0.5f});  // mean 0.375
  const auto l = m.predict(single(img));
  for (int k = 0; k < 4; ++k) {
    const double d = 0.375 - (k + 0.5) / 4.0;
    CHECK(l.row(0)[static_cast<std::size_t>(k)] == static_cast<float>(-200.0 * d * d));
  }
  CHECK(argmax(l.row(0)) == 1);
  CHECK(m.bin_of(0.0) == 0);
  CHECK(m.bin_of(0.999) == 3);
  CHECK(m.bin_of(1.0) == 3);
  CHECK_THROWS_AS(BrightnessOracle({1, 1, 1}, 2, 0.0), ModelError);
}

TEST_CASE("constant oracle ignores its input") {
  ConstantOracle m({1, 2, 2}, {0.1f, 0.9f, 0.0f});
  const auto a = m.predict(single(Image({1, 2, 2}, 0.0f)));
  const auto b = m.predict(single(Image({1, 2, 2}, 1.0f)));
  CHECK(a == b);
  CHECK(m.num_classes() == 3);
}

TEST_CASE("predict_labels over a batch") {
  BrightnessOracle m({1, 1, 1}, 2);
  Batch b({Image({1, 1, 1}, 0.1f), Image({1, 1, 1}, 0.9f)});
  CHECK(predict_labels(m, b) == Labels{0, 1});
}

TEST_CASE("fixture models load and classify the fixture images") {
  for (const char* kind : {"linear", "mlp1"}) {
    const auto m = load_builtin_model(kFixture / kind / "model.json");
    CHECK(m->num_classes() == 4);
    CHECK(m->input_shape() == Shape{3, 16, 16});
    // img_00 is class 0, img_01 class 1 (classes are interleaved).
    Batch b({load_image(kFixture / "images" / "img_00.igt"), load_image(kFixture / "images" / "img_01.igt")});
    CHECK(predict_labels(*m, b) == Labels{0, 1});
  }
}

TEST_CASE("model loader rejects bad manifests") {
  const fs::path dir = fs::temp_directory_path() / "igaff_models_bad";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto write = [&](const std::string& body) {
    std::ofstream(dir / "model.json") << body;
    return dir / "model.json";
  };
  CHECK_THROWS_AS(load_builtin_model(dir / "missing.json"), ModelError);
  CHECK_THROWS_AS(load_builtin_model(write("{not json")), ModelError);
  CHECK_THROWS_AS(load_builtin_model(write(R"({"kind":"tree","input_shape":[1,1,1],"num_classes":2})")),
                  ModelError);
  CHECK_THROWS_AS(load_builtin_model(write(R"({"kind":"linear","input_shape":[1,1,1],"num_classes":2})")),
                  ModelError);
  CHECK_THROWS_AS(
      load_builtin_model(write(R"({"kind":"constant-oracle","input_shape":[1,1,1],"num_classes":2,"logits":[1]})")),
      ModelError);
  const auto ok = load_builtin_model(
      write(R"({"kind":"brightness-oracle","input_shape":[3,4,4],"num_classes":5,"sharpness":50})"));
  CHECK(dynamic_cast<const BrightnessOracle&>(*ok).sharpness() == 50.0);
}
