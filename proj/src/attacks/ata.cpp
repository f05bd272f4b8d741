#include "igaff/attacks/attacks.hpp"
#include "igaff/common/parallel.hpp"
#include "internal.hpp"

namespace igaff {

AttackOutcome ata_attack(const Batch& x, const Labels& y, const VictimModel& model, const AttackConfig& cfg) {
  check_attack_inputs(x, y, model, cfg);
  const ScoreMode mode = cfg.score_mode();
  const Labels labels = effective_labels(y, cfg);
  const RngStream master(cfg.seed);

  AttackOutcome out;
  out.adversarial = x;
  out.initial = score_batch(model, x, labels, mode);
  double best = out.initial.score;
  AtaProvenance prov;

  for (int t = 0; t < cfg.iterations; ++t) {
    RngStream rng = master.substream(static_cast<std::uint64_t>(t));
    std::vector<AffineParams> params(x.size());
    for (auto& p : params) p = sample_affine(rng);

    std::vector<Image> warped(x.size());
    parallel_for(x.size(), cfg.lanes, [&](std::size_t j) { warped[j] = apply_affine(x[j], params[j]); });
    Batch candidate(std::move(warped));

    const Scored s = score_batch(model, candidate, labels, mode);
    if (s.score > best) {
      best = s.score;
      out.adversarial = std::move(candidate);
      prov.winning_iteration = t;
      prov.params = std::move(params);
    }
    out.records.push_back({t, s.loss, s.score, best});
  }
  out.provenance = std::move(prov);
  return out;
}

AttackOutcome run_attack_algorithm(const Batch& x, const Labels& y, const VictimModel& model,
                                   const AttackConfig& cfg) {
  return cfg.algorithm == Algorithm::kAta ? ata_attack(x, y, model, cfg) : aga_attack(x, y, model, cfg);
}

}  // namespace igaff
