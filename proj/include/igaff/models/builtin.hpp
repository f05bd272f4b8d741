#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "igaff/models/victim.hpp"

namespace igaff {

/// logits = W * flatten(x) + b, W is K x D.
class LinearModel final : public VictimModel {
 public:
  LinearModel(Shape input, int num_classes, std::vector<float> weight, std::vector<float> bias);

  int num_classes() const override { return num_classes_; }
  Shape input_shape() const override { return input_; }
  LogitsBatch predict(const Batch& batch) const override;

 private:
  Shape input_;
  int num_classes_;
  std::vector<float> weight_;
  std::vector<float> bias_;
};

/// One hidden ReLU layer: W2 * max(0, W1 * x + b1) + b2.
class Mlp1Model final : public VictimModel {
 public:
  Mlp1Model(Shape input, int num_classes, int hidden, std::vector<float> w1, std::vector<float> b1,
            std::vector<float> w2, std::vector<float> b2);

  int num_classes() const override { return num_classes_; }
  Shape input_shape() const override { return input_; }
  LogitsBatch predict(const Batch& batch) const override;
  int hidden() const noexcept { return hidden_; }

 private:
  Shape input_;
  int num_classes_;
  int hidden_;
  std::vector<float> w1_, b1_, w2_, b2_;
};

/// Classifies by mean pixel value: class k owns the brightness bin
/// [k/K, (k+1)/K). logits_k = -sharpness * (mean - (k + 0.5)/K)^2, so the
/// argmax is the bin containing the mean.
class BrightnessOracle final : public VictimModel {
 public:
  BrightnessOracle(Shape input, int num_classes, double sharpness = 200.0);

  int num_classes() const override { return num_classes_; }
  Shape input_shape() const override { return input_; }
  LogitsBatch predict(const Batch& batch) const override;

  double sharpness() const noexcept { return sharpness_; }
  int bin_of(double mean) const noexcept;

 private:
  Shape input_;
  int num_classes_;
  double sharpness_;
};

/// Same logits for every input.
class ConstantOracle final : public VictimModel {
 public:
  ConstantOracle(Shape input, std::vector<float> logits);

  int num_classes() const override { return static_cast<int>(logits_.size()); }
  Shape input_shape() const override { return input_; }
  LogitsBatch predict(const Batch& batch) const override;

 private:
  Shape input_;
  std::vector<float> logits_;
};

/// Loads a `model.json` manifest and its sibling IGT tensors.
///
/// Manifest fields: "kind" (linear | mlp1 | brightness-oracle |
/// constant-oracle), "input_shape" [C,H,W], "num_classes", and "tensors"
/// mapping tensor roles to file names relative to the manifest. Oracles take
/// "sharpness" or "logits" instead of tensors.
std::unique_ptr<VictimModel> load_builtin_model(const std::filesystem::path& manifest);

}  // namespace igaff
