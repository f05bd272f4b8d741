#pragma once

#include <cstdint>
#include <vector>

#include "igaff/attacks/config.hpp"
#include "igaff/attacks/outcome.hpp"
#include "igaff/attacks/score.hpp"
#include "igaff/imagecore/rng.hpp"
#include "igaff/models/victim.hpp"

namespace igaff {

// Random draws follow a fixed schedule so runs replay exactly:
//  * the attack stream is RngStream(cfg.seed); iteration/generation t uses
//    its substream(t);
//  * ATA draws one sample_affine per image in index order;
//  * AGA draws n_p mutation gates, then one sample_affine per open gate in
//    candidate order, then one crossover gate per pair, then one row cut per
//    open pair gate. Noise for candidate j comes from a separate stream seeded
//    by noise_seed(generation seed, j); image i of that candidate uses its
//    substream(i).

/// Affine Transformation Attack. Keeps the original batch unless a freshly
/// warped copy scores strictly higher.
AttackOutcome ata_attack(const Batch& x, const Labels& y, const VictimModel& model, const AttackConfig& cfg);

/// Affine Genetic Attack. Returns the last generation's selected candidate.
AttackOutcome aga_attack(const Batch& x, const Labels& y, const VictimModel& model, const AttackConfig& cfg);

/// Dispatches on cfg.algorithm.
AttackOutcome run_attack_algorithm(const Batch& x, const Labels& y, const VictimModel& model,
                                   const AttackConfig& cfg);

/// Candidate batches of one AGA generation.
struct Population {
  std::vector<Batch> candidates;
  std::vector<double> scores;

  static Population repeat(const Batch& x, int n);
  std::size_t size() const noexcept { return candidates.size(); }
  bool operator==(const Population&) const = default;
};

std::uint64_t noise_seed(std::uint64_t generation_seed, int candidate) noexcept;

MutationPlan plan_mutation(RngStream& rng, const AttackConfig& cfg);
CrossoverPlan plan_crossover(RngStream& rng, const AttackConfig& cfg, int height);

/// Open gate: one transform for the whole candidate batch, then U(0, eps)
/// noise and clamping. Closed gate: candidate unchanged.
Population aga_mutate(const Population& pop, const MutationPlan& plan, double epsilon, unsigned lanes = 1);
Population aga_mutate(const Population& pop, const AttackConfig& cfg, RngStream& rng);

/// Swaps pixel rows [0, r) between candidates 2p and 2p+1 for every open pair.
Population aga_crossover(const Population& pop, const CrossoverPlan& plan);
Population aga_crossover(const Population& pop, const AttackConfig& cfg, RngStream& rng);

/// Swaps rows [0, r) of every image and channel between two batches.
void swap_leading_rows(Batch& a, Batch& b, int r);

/// Lowest index among the maximal scores.
int aga_select(const std::vector<double>& scores);

/// Scores every candidate in place (possibly on several lanes).
void score_population(Population& pop, const VictimModel& model, const Labels& labels, ScoreMode mode,
                      unsigned lanes, std::vector<double>* losses = nullptr);

}  // namespace igaff
