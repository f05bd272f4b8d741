#include "igaff/models/builtin.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include "json.hpp"

#include "igaff/imagecore/io.hpp"

namespace igaff {

namespace {

void expect_size(const std::vector<float>& v, std::size_t n, const char* what) {
  if (v.size() != n)
    throw ModelError(std::string(what) + ": expected " + std::to_string(n) + " values, got " +
                     std::to_string(v.size()));
}

// out[k] = b[k] + sum_d W[k,d] x[d]
template <typename T>
void affine_layer(std::span<const float> w, std::span<const float> b, std::span<const T> x, std::span<double> out) {
  const std::size_t in = x.size();
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc = b[k];
    const float* wr = w.data() + k * in;
    for (std::size_t d = 0; d < in; ++d) acc += static_cast<double>(wr[d]) * x[d];
    out[k] = acc;
  }
}

Shape parse_shape(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw ModelError("model manifest: input_shape must be [C,H,W]");
  return Shape{j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

std::vector<float> load_tensor(const std::filesystem::path& dir, const nlohmann::json& tensors, const char* role,
                               std::size_t expected) {
  if (!tensors.contains(role)) throw ModelError(std::string("model manifest: missing tensor '") + role + "'");
  Tensor t = read_igt(dir / tensors.at(role).get<std::string>());
  expect_size(t.data, expected, role);
  return std::move(t.data);
}

}  // namespace

LinearModel::LinearModel(Shape input, int num_classes, std::vector<float> weight, std::vector<float> bias)
    : input_(input), num_classes_(num_classes), weight_(std::move(weight)), bias_(std::move(bias)) {
  if (num_classes_ < 1) throw ModelError("linear: num_classes must be positive");
  expect_size(weight_, static_cast<std::size_t>(num_classes_) * input_.numel(), "linear weight");
  expect_size(bias_, static_cast<std::size_t>(num_classes_), "linear bias");
}

LogitsBatch LinearModel::predict(const Batch& batch) const {
  check_input(batch);
  const auto k = static_cast<std::size_t>(num_classes_);
  std::vector<float> out(batch.size() * k);
  std::vector<double> row(k);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    affine_layer<float>(weight_, bias_, batch[i].data(), row);
    for (std::size_t c = 0; c < k; ++c) out[i * k + c] = static_cast<float>(row[c]);
  }
  return LogitsBatch(batch.size(), k, std::move(out));
}

Mlp1Model::Mlp1Model(Shape input, int num_classes, int hidden, std::vector<float> w1, std::vector<float> b1,
                     std::vector<float> w2, std::vector<float> b2)
    : input_(input),
      num_classes_(num_classes),
      hidden_(hidden),
      w1_(std::move(w1)),
      b1_(std::move(b1)),
      w2_(std::move(w2)),
      b2_(std::move(b2)) {
  if (num_classes_ < 1 || hidden_ < 1) throw ModelError("mlp1: sizes must be positive");
  const auto h = static_cast<std::size_t>(hidden_);
  const auto k = static_cast<std::size_t>(num_classes_);
  expect_size(w1_, h * input_.numel(), "mlp1 hidden weight");
  expect_size(b1_, h, "mlp1 hidden bias");
  expect_size(w2_, k * h, "mlp1 output weight");
  expect_size(b2_, k, "mlp1 output bias");
}

LogitsBatch Mlp1Model::predict(const Batch& batch) const {
  check_input(batch);
  const auto k = static_cast<std::size_t>(num_classes_);
  std::vector<float> out(batch.size() * k);
  std::vector<double> hid(static_cast<std::size_t>(hidden_));
  std::vector<double> row(k);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    affine_layer<float>(w1_, b1_, batch[i].data(), hid);
    for (double& v : hid) v = std::max(0.0, v);
    affine_layer<double>(w2_, b2_, hid, row);
    for (std::size_t c = 0; c < k; ++c) out[i * k + c] = static_cast<float>(row[c]);
  }
  return LogitsBatch(batch.size(), k, std::move(out));
}

BrightnessOracle::BrightnessOracle(Shape input, int num_classes, double sharpness)
    : input_(input), num_classes_(num_classes), sharpness_(sharpness) {
  if (num_classes_ < 1) throw ModelError("brightness-oracle: num_classes must be positive");
  if (!(sharpness_ > 0.0) || !std::isfinite(sharpness_))
    throw ModelError("brightness-oracle: sharpness must be positive");
}

int BrightnessOracle::bin_of(double mean) const noexcept {
  const int k = static_cast<int>(std::floor(mean * num_classes_));
  return std::clamp(k, 0, num_classes_ - 1);
}

LogitsBatch BrightnessOracle::predict(const Batch& batch) const {
  check_input(batch);
  const auto k = static_cast<std::size_t>(num_classes_);
  std::vector<float> out(batch.size() * k);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double m = batch[i].mean();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = m - (static_cast<double>(c) + 0.5) / num_classes_;
      out[i * k + c] = static_cast<float>(-sharpness_ * d * d);
    }
  }
  return LogitsBatch(batch.size(), k, std::move(out));
}

ConstantOracle::ConstantOracle(Shape input, std::vector<float> logits) : input_(input), logits_(std::move(logits)) {
  if (logits_.empty()) throw ModelError("constant-oracle: needs at least one class");
}

LogitsBatch ConstantOracle::predict(const Batch& batch) const {
  check_input(batch);
  std::vector<float> out;
  out.reserve(batch.size() * logits_.size());
  for (std::size_t i = 0; i < batch.size(); ++i) out.insert(out.end(), logits_.begin(), logits_.end());
  return LogitsBatch(batch.size(), logits_.size(), std::move(out));
}

std::unique_ptr<VictimModel> load_builtin_model(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ModelError("cannot open model manifest '" + manifest.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("model manifest '" + manifest.string() + "': " + e.what());
  }
  const std::filesystem::path dir = manifest.parent_path();
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const Shape input = parse_shape(j.at("input_shape"));
    const int k = j.at("num_classes").get<int>();
    if (k < 1) throw ModelError("model manifest: num_classes must be positive");
    const nlohmann::json tensors = j.value("tensors", nlohmann::json::object());
    const auto uk = static_cast<std::size_t>(k);

    if (kind == "linear") {
      auto w = load_tensor(dir, tensors, "weight", uk * input.numel());
      auto b = load_tensor(dir, tensors, "bias", uk);
      return std::make_unique<LinearModel>(input, k, std::move(w), std::move(b));
    }
    if (kind == "mlp1") {
      const int hidden = j.at("hidden").get<int>();
      if (hidden < 1) throw ModelError("model manifest: hidden must be positive");
      const auto uh = static_cast<std::size_t>(hidden);
      auto w1 = load_tensor(dir, tensors, "hidden_weight", uh * input.numel());
      auto b1 = load_tensor(dir, tensors, "hidden_bias", uh);
      auto w2 = load_tensor(dir, tensors, "output_weight", uk * uh);
      auto b2 = load_tensor(dir, tensors, "output_bias", uk);
      return std::make_unique<Mlp1Model>(input, k, hidden, std::move(w1), std::move(b1), std::move(w2),
                                         std::move(b2));
    }
    if (kind == "brightness-oracle") return std::make_unique<BrightnessOracle>(input, k, j.value("sharpness", 200.0));
    if (kind == "constant-oracle") {
      auto logits = j.at("logits").get<std::vector<float>>();
      if (logits.size() != uk) throw ModelError("constant-oracle: logits length must equal num_classes");
      return std::make_unique<ConstantOracle>(input, std::move(logits));
    }
    throw ModelError("model manifest: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("model manifest '" + manifest.string() + "': " + e.what());
  }
}

}  // namespace igaff
