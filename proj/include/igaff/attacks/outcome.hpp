#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "igaff/attacks/config.hpp"
#include "igaff/attacks/score.hpp"
#include "igaff/imagecore/transform.hpp"
#include "json.hpp"

namespace igaff {

/// ATA provenance: the winning iteration's per-image transforms, or nothing
/// when the original batch was never beaten.
struct AtaProvenance {
  std::optional<int> winning_iteration;
  std::vector<AffineParams> params;
};

/// Pre-drawn mutation decisions for one generation.
struct MutationPlan {
  std::vector<bool> mutate;            // one gate per candidate
  std::vector<AffineParams> params;    // identity where the gate is closed
  std::vector<std::uint64_t> noise_seeds;  // noise substream seed per candidate
};

/// Pre-drawn crossover decisions for one generation. Pair p couples
/// candidates 2p and 2p+1.
struct CrossoverPlan {
  std::vector<bool> swap;
  std::vector<int> row_cut;  // r in [1, H-1] where swap[p], else 0
};

struct GenerationLog {
  int generation = 0;
  std::uint64_t stream_seed = 0;
  MutationPlan mutation;
  CrossoverPlan crossover;
  std::vector<double> losses;
  std::vector<double> scores;
  int selected = 0;
};

struct AgaProvenance {
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  int population = 0;
  std::vector<GenerationLog> generations;
  /// Set only with track_global_best.
  std::optional<int> global_best_generation;
  std::optional<double> global_best_score;
};

using Provenance = std::variant<AtaProvenance, AgaProvenance>;

struct AttackOutcome {
  Batch adversarial;
  Scored initial;  // score of the unmodified input
  std::vector<ScoreRecord> records;
  Provenance provenance;

  double final_score() const noexcept { return records.empty() ? initial.score : records.back().best_score; }
};

/// Rebuilds the adversarial batch from the original input and provenance
/// alone, without querying a model.
Batch replay(const Batch& original, const Provenance& provenance, unsigned lanes = 1);

nlohmann::ordered_json to_json(const AffineParams& p);
nlohmann::ordered_json to_json(const Provenance& provenance);
nlohmann::ordered_json to_json(const AttackOutcome& outcome);
AffineParams affine_from_json(const nlohmann::json& j);
Provenance provenance_from_json(const nlohmann::json& j);

}  // namespace igaff
