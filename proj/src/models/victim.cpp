#include "igaff/models/victim.hpp"

#include <string>

namespace igaff {

LogitsBatch::LogitsBatch(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_)
    throw std::invalid_argument("LogitsBatch: " + std::to_string(values_.size()) + " values for " +
                                std::to_string(rows_) + "x" + std::to_string(cols_));
}

void VictimModel::check_input(const Batch& batch) const {
  if (batch.empty()) throw ModelError("predict: empty batch");
  if (batch.shape() != input_shape())
    throw ModelError("predict: batch shape " + batch.shape().str() + " does not match model input " +
                     input_shape().str());
}

int argmax(std::span<const float> row) noexcept {
  int best = 0;
  for (std::size_t k = 1; k < row.size(); ++k)
    if (row[k] > row[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  return best;
}

Labels predict_labels(const VictimModel& model, const Batch& batch) {
  const LogitsBatch logits = model.predict(batch);
  Labels out(logits.rows());
  for (std::size_t i = 0; i < logits.rows(); ++i) out[i] = argmax(logits.row(i));
  return out;
}

void check_labels(const Labels& labels, int num_classes) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw std::out_of_range("label " + std::to_string(labels[i]) + " at position " + std::to_string(i) +
                              " outside [0," + std::to_string(num_classes) + ")");
}

}  // namespace igaff
