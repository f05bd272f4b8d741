#include "igaff/models/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace igaff {

namespace {

template <typename T>
std::vector<double> softmax_impl(std::span<const T> row) {
  if (row.empty()) return {};
  double hi = -INFINITY;
  for (T v : row) hi = std::max(hi, static_cast<double>(v));
  std::vector<double> out(row.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    out[k] = std::exp(static_cast<double>(row[k]) - hi);
    sum += out[k];
  }
  for (double& v : out) v /= sum;
  return out;
}

template <typename T>
double cross_entropy_impl(std::span<const T> row, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= row.size())
    throw std::out_of_range("cross_entropy: label " + std::to_string(label) + " outside logit width " +
                            std::to_string(row.size()));
  double hi = -INFINITY;
  for (T v : row) hi = std::max(hi, static_cast<double>(v));
  double sum = 0.0;
  for (T v : row) sum += std::exp(static_cast<double>(v) - hi);
  // sum >= 1 and z_y - hi <= 0, so the result is never negative.
  return std::log(sum) - (static_cast<double>(row[static_cast<std::size_t>(label)]) - hi);
}

}  // namespace

std::vector<double> softmax(std::span<const double> row) { return softmax_impl(row); }
std::vector<double> softmax(std::span<const float> row) { return softmax_impl(row); }

double cross_entropy_row(std::span<const double> row, int label) { return cross_entropy_impl(row, label); }
double cross_entropy_row(std::span<const float> row, int label) { return cross_entropy_impl(row, label); }

double cross_entropy(const LogitsBatch& logits, const Labels& labels) {
  if (logits.rows() != labels.size())
    throw std::invalid_argument("cross_entropy: " + std::to_string(logits.rows()) + " logit rows vs " +
                                std::to_string(labels.size()) + " labels");
  if (labels.empty()) throw std::invalid_argument("cross_entropy: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) total += cross_entropy_row(logits.row(i), labels[i]);
  return total / static_cast<double>(labels.size());
}

}  // namespace igaff
