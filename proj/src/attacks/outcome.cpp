#include "igaff/attacks/outcome.hpp"

#include <stdexcept>

#include "igaff/attacks/attacks.hpp"
#include "igaff/common/parallel.hpp"

namespace igaff {

namespace {

using ordered_json = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Seeds are emitted as decimal strings; JSON numbers lose precision past 2^53
// in many readers.
std::string seed_text(std::uint64_t s) { return std::to_string(s); }
std::uint64_t seed_value(const nlohmann::json& j) {
  return j.is_string() ? std::stoull(j.get<std::string>()) : j.get<std::uint64_t>();
}

}  // namespace

Batch replay(const Batch& original, const Provenance& provenance, unsigned lanes) {
  return std::visit(
      overloaded{
          [&](const AtaProvenance& p) -> Batch {
            if (!p.winning_iteration) return original;
            if (p.params.size() != original.size())
              throw std::invalid_argument("replay: provenance holds params for a different batch size");
            std::vector<Image> out(original.size());
            parallel_for(original.size(), lanes, [&](std::size_t j) { out[j] = apply_affine(original[j], p.params[j]); });
            return Batch(std::move(out));
          },
          [&](const AgaProvenance& p) -> Batch {
            Population pop = Population::repeat(original, p.population);
            Batch selected = original;
            for (const auto& g : p.generations) {
              Population next = aga_crossover(aga_mutate(pop, g.mutation, p.epsilon, lanes), g.crossover);
              selected = std::move(next.candidates.at(static_cast<std::size_t>(g.selected)));
              pop = Population::repeat(selected, p.population);
            }
            return selected;
          },
      },
      provenance);
}

ordered_json to_json(const AffineParams& p) {
  ordered_json j;
  j["theta"] = p.theta;
  j["tau_x"] = p.tau_x;
  j["tau_y"] = p.tau_y;
  j["scale"] = p.scale;
  j["shear"] = p.shear;
  return j;
}

AffineParams affine_from_json(const nlohmann::json& j) {
  AffineParams p;
  p.theta = j.at("theta").get<double>();
  p.tau_x = j.at("tau_x").get<double>();
  p.tau_y = j.at("tau_y").get<double>();
  p.scale = j.at("scale").get<double>();
  p.shear = j.at("shear").get<double>();
  return p;
}

ordered_json to_json(const Provenance& provenance) {
  return std::visit(
      overloaded{
          [](const AtaProvenance& p) {
            ordered_json j;
            j["algorithm"] = "ata";
            j["winning_iteration"] = p.winning_iteration ? ordered_json(*p.winning_iteration) : ordered_json(nullptr);
            ordered_json params = ordered_json::array();
            for (const auto& a : p.params) params.push_back(to_json(a));
            j["params"] = std::move(params);
            return j;
          },
          [](const AgaProvenance& p) {
            ordered_json j;
            j["algorithm"] = "aga";
            j["seed"] = seed_text(p.seed);
            j["epsilon"] = p.epsilon;
            j["population"] = p.population;
            ordered_json gens = ordered_json::array();
            for (const auto& g : p.generations) {
              ordered_json gj;
              gj["generation"] = g.generation;
              gj["stream_seed"] = seed_text(g.stream_seed);
              ordered_json muts = ordered_json::array();
              for (std::size_t c = 0; c < g.mutation.mutate.size(); ++c) {
                ordered_json m;
                m["candidate"] = c;
                m["mutate"] = static_cast<bool>(g.mutation.mutate[c]);
                m["params"] = to_json(g.mutation.params[c]);
                m["noise_seed"] = seed_text(g.mutation.noise_seeds[c]);
                muts.push_back(std::move(m));
              }
              gj["mutations"] = std::move(muts);
              ordered_json cross = ordered_json::array();
              for (std::size_t q = 0; q < g.crossover.swap.size(); ++q) {
                ordered_json c;
                c["pair"] = {2 * q, 2 * q + 1};
                c["swap"] = static_cast<bool>(g.crossover.swap[q]);
                c["row_cut"] = g.crossover.row_cut[q];
                cross.push_back(std::move(c));
              }
              gj["crossovers"] = std::move(cross);
              gj["losses"] = g.losses;
              gj["scores"] = g.scores;
              gj["selected"] = g.selected;
              gens.push_back(std::move(gj));
            }
            j["generations"] = std::move(gens);
            if (p.global_best_generation) {
              j["global_best_generation"] = *p.global_best_generation;
              j["global_best_score"] = *p.global_best_score;
            }
            return j;
          },
      },
      provenance);
}

Provenance provenance_from_json(const nlohmann::json& j) {
  const std::string algo = j.at("algorithm").get<std::string>();
  if (algo == "ata") {
    AtaProvenance p;
    if (!j.at("winning_iteration").is_null()) p.winning_iteration = j.at("winning_iteration").get<int>();
    for (const auto& a : j.at("params")) p.params.push_back(affine_from_json(a));
    return p;
  }
  if (algo != "aga") throw std::invalid_argument("provenance: unknown algorithm '" + algo + "'");
  AgaProvenance p;
  p.seed = seed_value(j.at("seed"));
  p.epsilon = j.at("epsilon").get<double>();
  p.population = j.at("population").get<int>();
  for (const auto& gj : j.at("generations")) {
    GenerationLog g;
    g.generation = gj.at("generation").get<int>();
    g.stream_seed = seed_value(gj.at("stream_seed"));
    for (const auto& m : gj.at("mutations")) {
      g.mutation.mutate.push_back(m.at("mutate").get<bool>());
      g.mutation.params.push_back(affine_from_json(m.at("params")));
      g.mutation.noise_seeds.push_back(seed_value(m.at("noise_seed")));
    }
    for (const auto& c : gj.at("crossovers")) {
      g.crossover.swap.push_back(c.at("swap").get<bool>());
      g.crossover.row_cut.push_back(c.at("row_cut").get<int>());
    }
    g.losses = gj.at("losses").get<std::vector<double>>();
    g.scores = gj.at("scores").get<std::vector<double>>();
    g.selected = gj.at("selected").get<int>();
    p.generations.push_back(std::move(g));
  }
  if (j.contains("global_best_generation")) {
    p.global_best_generation = j.at("global_best_generation").get<int>();
    p.global_best_score = j.at("global_best_score").get<double>();
  }
  return p;
}

ordered_json to_json(const AttackOutcome& outcome) {
  ordered_json j;
  j["initial_loss"] = outcome.initial.loss;
  j["initial_score"] = outcome.initial.score;
  ordered_json recs = ordered_json::array();
  for (const auto& r : outcome.records) {
    ordered_json rj;
    rj["iteration"] = r.iteration;
    rj["loss"] = r.loss;
    rj["score"] = r.score;
    rj["best_score"] = r.best_score;
    recs.push_back(std::move(rj));
  }
  j["records"] = std::move(recs);
  j["final_score"] = outcome.final_score();
  j["provenance"] = to_json(outcome.provenance);
  return j;
}

}  // namespace igaff
