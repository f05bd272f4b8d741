#pragma once

#include <span>
#include <vector>

#include "igaff/models/victim.hpp"

namespace igaff {

struct ClassStats {
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double f1 = 0.0;         // percent
  int support = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::vector<ClassStats> per_class;
};

struct SrReport {
  double acc_unattacked = 0.0;
  double acc_attacked = 0.0;
  double sr = 0.0;
};

struct AggregateStat {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  int n_repeats = 0;
};

/// 100 * correct / total. Throws std::invalid_argument on a length mismatch
/// or empty input.
double accuracy(const Labels& preds, const Labels& truth);

/// Per-class precision/recall/F1 (0 when undefined). Macro averages all
/// n_cls classes, including ones absent from `truth`; weighted averages by
/// support.
EvalReport f1_scores(const Labels& preds, const Labels& truth, int n_cls);

/// (1 - attacked/unattacked) * 100. Negative when accuracy improves.
/// Throws std::domain_error when acc_unattacked is not positive.
double success_rate(double acc_unattacked, double acc_attacked);
SrReport sr_report(double acc_unattacked, double acc_attacked);

/// Average images per class divided by the class count.
double diversity_factor(double avg_images_per_class, int n_cls);

/// Mean and population standard deviation. Throws on empty input.
AggregateStat aggregate(std::span<const double> values);

}  // namespace igaff
