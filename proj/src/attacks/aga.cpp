#include <stdexcept>

#include "igaff/attacks/attacks.hpp"
#include "igaff/common/parallel.hpp"
#include "internal.hpp"

namespace igaff {

namespace {

constexpr std::uint64_t kNoiseLabel = 0x4E4F495345000000ULL;  // "NOISE"

}  // namespace

Population Population::repeat(const Batch& x, int n) {
  if (n < 1) throw std::invalid_argument("population size must be >= 1");
  Population p;
  p.candidates.assign(static_cast<std::size_t>(n), x);
  p.scores.assign(static_cast<std::size_t>(n), 0.0);
  return p;
}

std::uint64_t noise_seed(std::uint64_t generation_seed, int candidate) noexcept {
  return RngStream::derive_seed(generation_seed, kNoiseLabel + static_cast<std::uint64_t>(candidate));
}

MutationPlan plan_mutation(RngStream& rng, const AttackConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.population);
  MutationPlan plan;
  plan.mutate.resize(n);
  plan.params.assign(n, AffineParams::identity());
  plan.noise_seeds.resize(n);
  for (std::size_t j = 0; j < n; ++j) plan.mutate[j] = rng.uniform01() < cfg.p_mutation;
  for (std::size_t j = 0; j < n; ++j)
    if (plan.mutate[j]) plan.params[j] = sample_affine(rng);
  for (std::size_t j = 0; j < n; ++j) plan.noise_seeds[j] = noise_seed(rng.seed(), static_cast<int>(j));
  return plan;
}

CrossoverPlan plan_crossover(RngStream& rng, const AttackConfig& cfg, int height) {
  const std::size_t pairs = static_cast<std::size_t>(cfg.population) / 2;
  CrossoverPlan plan;
  plan.swap.resize(pairs);
  plan.row_cut.assign(pairs, 0);
  for (std::size_t p = 0; p < pairs; ++p) plan.swap[p] = rng.uniform01() < cfg.p_crossover;
  for (std::size_t p = 0; p < pairs; ++p) {
    if (!plan.swap[p]) continue;
    if (height < 2) throw std::invalid_argument("crossover needs image height >= 2");
    plan.row_cut[p] = static_cast<int>(rng.uniform_int(1, height - 1));
  }
  return plan;
}

Population aga_mutate(const Population& pop, const MutationPlan& plan, double epsilon, unsigned lanes) {
  if (plan.mutate.size() != pop.size()) throw std::invalid_argument("mutation plan does not match population");
  Population out = pop;
  for (std::size_t j = 0; j < pop.size(); ++j) {
    if (!plan.mutate[j]) continue;
    const Batch& src = pop.candidates[j];
    Batch& dst = out.candidates[j];
    const RngStream noise(plan.noise_seeds[j]);
    parallel_for(src.size(), lanes, [&](std::size_t i) {
      RngStream image_noise = noise.substream(i);
      dst[i] = add_noise(apply_affine(src[i], plan.params[j]), epsilon, image_noise);
    });
  }
  return out;
}

Population aga_mutate(const Population& pop, const AttackConfig& cfg, RngStream& rng) {
  return aga_mutate(pop, plan_mutation(rng, cfg), cfg.epsilon, cfg.lanes);
}

void swap_leading_rows(Batch& a, Batch& b, int r) {
  if (a.size() != b.size() || a.shape() != b.shape()) throw std::invalid_argument("crossover: mismatched batches");
  if (r < 0 || r > a.shape().height) throw std::out_of_range("crossover: row cut out of range");
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int c = 0; c < a.shape().channels; ++c)
      for (int y = 0; y < r; ++y) {
        auto ra = a[i].row(c, y);
        auto rb = b[i].row(c, y);
        std::swap_ranges(ra.begin(), ra.end(), rb.begin());
      }
}

Population aga_crossover(const Population& pop, const CrossoverPlan& plan) {
  if (plan.swap.size() != pop.size() / 2) throw std::invalid_argument("crossover plan does not match population");
  Population out = pop;
  for (std::size_t p = 0; p < plan.swap.size(); ++p)
    if (plan.swap[p]) swap_leading_rows(out.candidates[2 * p], out.candidates[2 * p + 1], plan.row_cut[p]);
  return out;
}

Population aga_crossover(const Population& pop, const AttackConfig& cfg, RngStream& rng) {
  return aga_crossover(pop, plan_crossover(rng, cfg, pop.candidates.front().shape().height));
}

int aga_select(const std::vector<double>& scores) {
  if (scores.empty()) throw std::invalid_argument("aga_select: empty population");
  int best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j)
    if (scores[j] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
  return best;
}

void score_population(Population& pop, const VictimModel& model, const Labels& labels, ScoreMode mode,
                      unsigned lanes, std::vector<double>* losses) {
  std::vector<Scored> scored(pop.size());
  parallel_for(pop.size(), lanes,
               [&](std::size_t j) { scored[j] = score_batch(model, pop.candidates[j], labels, mode); });
  pop.scores.resize(pop.size());
  if (losses) losses->resize(pop.size());
  for (std::size_t j = 0; j < pop.size(); ++j) {
    pop.scores[j] = scored[j].score;
    if (losses) (*losses)[j] = scored[j].loss;
  }
}

AttackOutcome aga_attack(const Batch& x, const Labels& y, const VictimModel& model, const AttackConfig& cfg) {
  check_attack_inputs(x, y, model, cfg);
  const ScoreMode mode = cfg.score_mode();
  const Labels labels = effective_labels(y, cfg);
  const RngStream master(cfg.seed);

  AttackOutcome out;
  out.initial = score_batch(model, x, labels, mode);
  AgaProvenance prov;
  prov.seed = cfg.seed;
  prov.epsilon = cfg.epsilon;
  prov.population = cfg.population;

  Population pop = Population::repeat(x, cfg.population);
  Batch selected = x;
  for (int t = 0; t < cfg.iterations; ++t) {
    RngStream rng = master.substream(static_cast<std::uint64_t>(t));
    GenerationLog log;
    log.generation = t;
    log.stream_seed = rng.seed();
    log.mutation = plan_mutation(rng, cfg);
    log.crossover = plan_crossover(rng, cfg, x.shape().height);

    Population next = aga_crossover(aga_mutate(pop, log.mutation, cfg.epsilon, cfg.lanes), log.crossover);
    score_population(next, model, labels, mode, cfg.lanes, &log.losses);
    log.scores = next.scores;
    log.selected = aga_select(next.scores);

    const auto k = static_cast<std::size_t>(log.selected);
    out.records.push_back({t, log.losses[k], next.scores[k], next.scores[k]});
    if (cfg.track_global_best && (!prov.global_best_score || next.scores[k] > *prov.global_best_score)) {
      prov.global_best_score = next.scores[k];
      prov.global_best_generation = t;
    }
    selected = std::move(next.candidates[k]);
    pop = Population::repeat(selected, cfg.population);
    prov.generations.push_back(std::move(log));
  }
  out.adversarial = std::move(selected);
  out.provenance = std::move(prov);
  return out;
}

}  // namespace igaff
