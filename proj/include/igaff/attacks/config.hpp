#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace igaff {

enum class Algorithm { kAta, kAga };

/// How a targeted loss maps to the score being maximized.
enum class TargetedMode {
  /// sigmoid(+L^c) taken as written. Maximizing pushes away from the target.
  kLiteral,
  /// sigmoid(-L^c): maximizing favors the smallest target loss.
  kIntent,
};

enum class ScoreMode { kUntargeted, kTargetedLiteral, kTargetedIntent };

struct AttackConfig {
  Algorithm algorithm = Algorithm::kAga;
  int iterations = 7;
  int population = 3;
  double p_mutation = 0.3;
  double p_crossover = 0.3;
  double epsilon = 0.1;
  std::optional<int> target;
  TargetedMode targeted_mode = TargetedMode::kIntent;
  std::uint64_t seed = 0;

  /// AGA only: also log the best generation seen overall. The returned batch
  /// is still the last generation's pick.
  bool track_global_best = false;

  /// Worker threads used inside one attack. Has no effect on results.
  unsigned lanes = 1;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
  ScoreMode score_mode() const noexcept;
};

const char* to_string(Algorithm a) noexcept;
const char* to_string(TargetedMode m) noexcept;
const char* to_string(ScoreMode m) noexcept;
Algorithm parse_algorithm(const std::string& s);
TargetedMode parse_targeted_mode(const std::string& s);

}  // namespace igaff
