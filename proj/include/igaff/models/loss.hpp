#pragma once

#include <span>
#include <vector>

#include "igaff/models/victim.hpp"

namespace igaff {

/// Max-shifted softmax.
std::vector<double> softmax(std::span<const double> row);
std::vector<double> softmax(std::span<const float> row);

/// -log softmax(row)[label], computed via log-sum-exp.
double cross_entropy_row(std::span<const float> row, int label);
double cross_entropy_row(std::span<const double> row, int label);

/// Mean over the batch of cross_entropy_row, in nats. Throws
/// std::invalid_argument on a length mismatch and std::out_of_range on a
/// label outside the logit width.
double cross_entropy(const LogitsBatch& logits, const Labels& labels);

}  // namespace igaff
