#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "igaff/imagecore/image.hpp"

namespace igaff {

/// Class indices, one per image.
using Labels = std::vector<int>;

/// B x K row-major pre-softmax scores.
class LogitsBatch {
 public:
  LogitsBatch() = default;
  LogitsBatch(std::size_t rows, std::size_t cols, std::vector<float> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return std::span<const float>(values_).subspan(i * cols_, cols_);
  }
  std::span<const float> values() const noexcept { return values_; }

  bool operator==(const LogitsBatch&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Opaque classifier queried only through predict().
///
/// Implementations must be deterministic for fixed weights and must be safe
/// to call from several threads at once (serializing internally if needed).
class VictimModel {
 public:
  virtual ~VictimModel() = default;

  virtual int num_classes() const = 0;
  virtual Shape input_shape() const = 0;
  virtual LogitsBatch predict(const Batch& batch) const = 0;

 protected:
  /// Throws ModelError when the batch does not match input_shape().
  void check_input(const Batch& batch) const;
};

/// Lowest index among maximal entries.
int argmax(std::span<const float> row) noexcept;
Labels predict_labels(const VictimModel& model, const Batch& batch);

/// Throws std::out_of_range if any label is outside [0, num_classes).
void check_labels(const Labels& labels, int num_classes);

}  // namespace igaff
