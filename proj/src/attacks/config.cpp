#include "igaff/attacks/config.hpp"

#include <cmath>
#include <stdexcept>

namespace igaff {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

}  // namespace

void AttackConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (population < 1) throw std::invalid_argument("population must be >= 1");
  require_probability(p_mutation, "p_mutation");
  require_probability(p_crossover, "p_crossover");
  require_probability(epsilon, "epsilon");
  if (target && *target < 0) throw std::invalid_argument("target class must be non-negative");
}

ScoreMode AttackConfig::score_mode() const noexcept {
  if (!target) return ScoreMode::kUntargeted;
  return targeted_mode == TargetedMode::kLiteral ? ScoreMode::kTargetedLiteral : ScoreMode::kTargetedIntent;
}

const char* to_string(Algorithm a) noexcept { return a == Algorithm::kAta ? "ata" : "aga"; }

const char* to_string(TargetedMode m) noexcept { return m == TargetedMode::kLiteral ? "literal" : "intent"; }

const char* to_string(ScoreMode m) noexcept {
  switch (m) {
    case ScoreMode::kUntargeted: return "untargeted";
    case ScoreMode::kTargetedLiteral: return "targeted-literal";
    case ScoreMode::kTargetedIntent: return "targeted-intent";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "ata" || s == "ATA") return Algorithm::kAta;
  if (s == "aga" || s == "AGA") return Algorithm::kAga;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected ata or aga)");
}

TargetedMode parse_targeted_mode(const std::string& s) {
  if (s == "literal") return TargetedMode::kLiteral;
  if (s == "intent") return TargetedMode::kIntent;
  throw std::invalid_argument("unknown targeted mode '" + s + "' (expected literal or intent)");
}

}  // namespace igaff
