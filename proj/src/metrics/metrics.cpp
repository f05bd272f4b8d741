#include "igaff/metrics/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace igaff {

double accuracy(const Labels& preds, const Labels& truth) {
  if (preds.size() != truth.size())
    throw std::invalid_argument("accuracy: " + std::to_string(preds.size()) + " predictions vs " +
                                std::to_string(truth.size()) + " labels");
  if (truth.empty()) throw std::invalid_argument("accuracy: no samples");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += preds[i] == truth[i];
  return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

EvalReport f1_scores(const Labels& preds, const Labels& truth, int n_cls) {
  if (preds.size() != truth.size()) throw std::invalid_argument("f1_scores: length mismatch");
  if (n_cls < 1) throw std::invalid_argument("f1_scores: n_cls must be positive");
  check_labels(preds, n_cls);
  check_labels(truth, n_cls);

  const auto k = static_cast<std::size_t>(n_cls);
  std::vector<int> tp(k, 0), fp(k, 0), fn(k, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = static_cast<std::size_t>(truth[i]);
    const auto p = static_cast<std::size_t>(preds[i]);
    if (t == p) {
      ++tp[t];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }

  EvalReport r;
  r.accuracy = truth.empty() ? 0.0 : accuracy(preds, truth);
  r.per_class.resize(k);
  double macro = 0.0;
  double weighted = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    ClassStats& s = r.per_class[c];
    s.support = tp[c] + fn[c];
    const double prec = tp[c] + fp[c] > 0 ? static_cast<double>(tp[c]) / (tp[c] + fp[c]) : 0.0;
    const double rec = s.support > 0 ? static_cast<double>(tp[c]) / s.support : 0.0;
    const double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    s.precision = 100.0 * prec;
    s.recall = 100.0 * rec;
    s.f1 = 100.0 * f1;
    macro += s.f1;
    weighted += s.f1 * s.support;
  }
  r.macro_f1 = macro / static_cast<double>(k);
  r.weighted_f1 = truth.empty() ? 0.0 : weighted / static_cast<double>(truth.size());
  return r;
}

double success_rate(double acc_unattacked, double acc_attacked) {
  if (!(acc_unattacked > 0.0)) throw std::domain_error("success_rate: unattacked accuracy must be positive");
  return (1.0 - acc_attacked / acc_unattacked) * 100.0;
}

SrReport sr_report(double acc_unattacked, double acc_attacked) {
  return {acc_unattacked, acc_attacked, success_rate(acc_unattacked, acc_attacked)};
}

double diversity_factor(double avg_images_per_class, int n_cls) {
  if (n_cls < 1) throw std::invalid_argument("diversity_factor: n_cls must be >= 1");
  return avg_images_per_class / n_cls;
}

AggregateStat aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate: no values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n), static_cast<int>(values.size())};
}

}  // namespace igaff
