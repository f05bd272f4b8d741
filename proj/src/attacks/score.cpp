#include "igaff/attacks/score.hpp"

#include <cmath>
#include <stdexcept>

#include "igaff/models/loss.hpp"
#include "internal.hpp"

namespace igaff {

double attack_score(double loss, ScoreMode mode) {
  if (!std::isfinite(loss)) throw std::domain_error("attack_score: non-finite loss");
  if (loss < 0.0) throw std::domain_error("attack_score: negative loss");
  const double e = std::exp(-loss);
  if (mode == ScoreMode::kTargetedIntent) return e / (1.0 + e);
  return 1.0 / (1.0 + e);
}

Labels effective_labels(const Labels& truth, const AttackConfig& cfg) {
  if (cfg.target) return Labels(truth.size(), *cfg.target);
  return truth;
}

Scored score_batch(const VictimModel& model, const Batch& batch, const Labels& labels, ScoreMode mode) {
  const double loss = cross_entropy(model.predict(batch), labels);
  return {loss, attack_score(loss, mode)};
}

void check_attack_inputs(const Batch& x, const Labels& y, const VictimModel& model, const AttackConfig& cfg) {
  cfg.validate();
  if (x.empty()) throw std::invalid_argument("attack: empty batch");
  if (y.size() != x.size())
    throw std::invalid_argument("attack: " + std::to_string(y.size()) + " labels for " + std::to_string(x.size()) +
                                " images");
  check_labels(y, model.num_classes());
  if (cfg.target && *cfg.target >= model.num_classes())
    throw std::out_of_range("attack: target class " + std::to_string(*cfg.target) + " >= num_classes " +
                            std::to_string(model.num_classes()));
}

}  // namespace igaff
