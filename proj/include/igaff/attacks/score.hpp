#pragma once

#include "igaff/attacks/config.hpp"
#include "igaff/imagecore/image.hpp"
#include "igaff/models/victim.hpp"

namespace igaff {

/// Sigmoid of the cross-entropy, signed per mode:
///   untargeted          1 / (1 + exp(-L))
///   targeted-literal    1 / (1 + exp(-L^c))
///   targeted-intent     1 / (1 + exp(+L^c))
/// Throws std::domain_error for a non-finite or negative loss.
double attack_score(double loss, ScoreMode mode);

/// Loss and score of one batch evaluation.
struct Scored {
  double loss = 0.0;
  double score = 0.0;
};

/// Labels the attack scores against: the target class repeated, or `truth`.
Labels effective_labels(const Labels& truth, const AttackConfig& cfg);

/// One model query: cross-entropy of M(batch) against `labels`, mapped to a score.
Scored score_batch(const VictimModel& model, const Batch& batch, const Labels& labels, ScoreMode mode);

/// One row of the per-iteration score log.
struct ScoreRecord {
  int iteration = 0;
  double loss = 0.0;
  double score = 0.0;
  /// Running incumbent for ATA; the selected candidate's score for AGA.
  double best_score = 0.0;
};

}  // namespace igaff
