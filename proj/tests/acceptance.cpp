// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "igaff/attacks/attacks.hpp"
#include "igaff/attacks/score.hpp"
#include "igaff/harness/runner.hpp"
#include "igaff/imagecore/rng.hpp"
#include "igaff/imagecore/transform.hpp"
#include "igaff/metrics/metrics.hpp"
#include "igaff/models/builtin.hpp"
#include "igaff/models/loss.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace igaff;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kData = IGAFF_TEST_DATA;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << std::fixed << v;
  return s.str();
}

Batch brightness_batch(int n, Shape s, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<Image> out;
  for (int i = 0; i < n; ++i) {
    const double level = rng.uniform(0.15, 0.85);
    Image img(s);
    for (float& v : img.data()) v = static_cast<float>(std::clamp(level + rng.uniform(-0.1, 0.1), 0.0, 1.0));
    out.push_back(std::move(img));
  }
  return Batch(std::move(out));
}

Image random_image(Shape s, RngStream& rng) {
  Image img(s);
  for (float& v : img.data()) v = static_cast<float>(rng.uniform01());
  return img;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1: success rate from reference clean/attacked accuracy pairs.
Verdict sr_reproduction() {
  struct Row {
    const char* name;
    double clean, attacked, sr;
  };
  const Row rows[] = {
      {"caltech/rn18", 80.02, 46.85, 41.45}, {"caltech/dn121", 84.47, 51.22, 39.36},
      {"caltech/stv2", 90.16, 51.30, 43.10}, {"caltech/vit", 89.41, 62.39, 30.22},
      {"food/rn18", 72.99, 32.68, 55.22},    {"food/dn121", 78.59, 36.38, 53.71},
      {"food/stv2", 82.70, 36.31, 56.09},    {"food/vit", 82.14, 41.21, 49.83},
      {"tiny/rn18", 70.96, 27.83, 60.78},    {"tiny/dn121", 75.20, 29.43, 60.86},
      {"tiny/stv2", 83.55, 33.74, 59.62},    {"tiny/vit", 85.42, 30.77, 63.97},
  };
  int ok = 0;
  std::string misses;
  for (const Row& r : rows) {
    const double sr = success_rate(r.clean, r.attacked);
    if (std::abs(sr - r.sr) <= 0.06) ++ok;
    else misses += std::string(" ") + r.name + "=" + fmt(sr, 2);
  }
  return {ok >= 8, std::to_string(ok) + "/12 rows within 0.06" + misses};
}

// 2: diversity factors.
Verdict diversity() {
  const double a = diversity_factor(550, 200);
  const double b = diversity_factor(1000, 101);
  const double c = diversity_factor(30607.0 / 257.0, 257);
  const bool ok = std::abs(a - 2.75) <= 0.005 && std::abs(b - 9.90) <= 0.005 && std::abs(c - 0.46) <= 0.005;
  return {ok, "food " + fmt(a) + ", tiny " + fmt(b) + ", caltech " + fmt(c)};
}

// 3: closed forms of the score, the loss and softmax.
Verdict closed_forms() {
  double worst = 0.0;
  auto near = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
  const double ln3 = std::log(3.0);
  near(attack_score(0.0, ScoreMode::kUntargeted), 0.5);
  near(attack_score(ln3, ScoreMode::kUntargeted), 0.75);
  near(attack_score(0.0, ScoreMode::kTargetedLiteral), 0.5);
  near(attack_score(ln3, ScoreMode::kTargetedLiteral), 0.75);
  near(attack_score(0.0, ScoreMode::kTargetedIntent), 0.5);
  near(attack_score(ln3, ScoreMode::kTargetedIntent), 0.25);

  for (int k : {2, 5, 10, 257}) {
    const std::vector<double> row(static_cast<std::size_t>(k), 1.5);
    near(cross_entropy_row(std::span<const double>(row), 0), std::log(static_cast<double>(k)));
  }
  const std::vector<double> two{0.0, ln3};
  near(cross_entropy_row(std::span<const double>(two), 0), std::log(4.0));
  near(cross_entropy_row(std::span<const double>(two), 1), std::log(4.0 / 3.0));

  const std::vector<double> row{0.3, -1.2, 2.5, 0.0};
  const auto p = softmax(std::span<const double>(row));
  for (double shift : {-50.0, 7.25, 400.0}) {
    std::vector<double> moved = row;
    for (double& v : moved) v += shift;
    const auto q = softmax(std::span<const double>(moved));
    for (std::size_t i = 0; i < p.size(); ++i) near(q[i], p[i]);
  }
  std::ostringstream msg;
  msg << "max error " << std::scientific << worst;
  return {worst <= 1e-9, msg.str()};
}

// 4: bit-identical results across runs and lane counts.
Verdict determinism() {
  const auto t0 = Clock::now();
  BrightnessOracle m({3, 32, 32}, 4);
  const Batch x = brightness_batch(8, {3, 32, 32}, 404);
  const Labels y = predict_labels(m, x);
  bool same = true;
  for (Algorithm a : {Algorithm::kAta, Algorithm::kAga}) {
    AttackConfig cfg;
    cfg.algorithm = a;
    cfg.seed = 99;
    cfg.lanes = 1;
    const AttackOutcome r1 = run_attack_algorithm(x, y, m, cfg);
    const AttackOutcome r2 = run_attack_algorithm(x, y, m, cfg);
    cfg.lanes = 4;
    const AttackOutcome r4 = run_attack_algorithm(x, y, m, cfg);
    same = same && bitwise_equal(r1.adversarial, r2.adversarial) && bitwise_equal(r1.adversarial, r4.adversarial);
    same = same && to_json(r1).dump() == to_json(r2).dump() && to_json(r1).dump() == to_json(r4).dump();
  }
  const double secs = seconds_since(t0);
  return {same && secs < 5.0, std::string(same ? "identical" : "DIFFERENT") + " in " + fmt(secs, 3) + " s"};
}

// 5: ATA identity on a flat oracle, monotone score, exact replay.
Verdict ata_properties() {
  std::string why;
  {
    ConstantOracle m({3, 16, 16}, {0.4f, 0.1f, 0.3f, 0.2f});
    const Batch x = brightness_batch(4, {3, 16, 16}, 5);
    AttackConfig cfg;
    cfg.algorithm = Algorithm::kAta;
    cfg.seed = 5;
    const AttackOutcome o = ata_attack(x, {0, 1, 2, 3}, m, cfg);
    if (!bitwise_equal(o.adversarial, x)) why += " constant-oracle changed the batch;";
  }
  BrightnessOracle m({3, 16, 16}, 4);
  int monotone = 0, replayed = 0, improved = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Batch x = brightness_batch(6, {3, 16, 16}, 1000 + seed);
    const Labels y = predict_labels(m, x);
    AttackConfig cfg;
    cfg.algorithm = Algorithm::kAta;
    cfg.seed = seed;
    const AttackOutcome o = ata_attack(x, y, m, cfg);
    const double before = score_batch(m, x, y, ScoreMode::kUntargeted).score;
    const double after = score_batch(m, o.adversarial, y, ScoreMode::kUntargeted).score;
    monotone += after >= before;
    improved += after > before;
    replayed += bitwise_equal(replay(x, o.provenance), o.adversarial) &&
                bitwise_equal(replay(x, provenance_from_json(to_json(o.provenance))), o.adversarial);
  }
  if (monotone != 50) why += " score dropped on " + std::to_string(50 - monotone) + " seeds;";
  if (replayed != 50) why += " replay differed on " + std::to_string(50 - replayed) + " seeds;";
  if (improved == 0) why += " no seed ever improved;";
  return {why.empty(), "monotone " + std::to_string(monotone) + "/50 (" + std::to_string(improved) +
                           " improved), replay " + std::to_string(replayed) + "/50" + why};
}

// 6: AGA identity at zero rates, crossover involution, independent oracle.
Verdict aga_properties() {
  std::string why;
  BrightnessOracle m({3, 16, 16}, 4);
  {
    const Batch x = brightness_batch(4, {3, 16, 16}, 6);
    AttackConfig cfg;
    cfg.p_mutation = 0.0;
    cfg.p_crossover = 0.0;
    cfg.seed = 6;
    if (!bitwise_equal(aga_attack(x, predict_labels(m, x), m, cfg).adversarial, x)) why += " zero rates changed x;";
  }
  RngStream rng(2024);
  int involutions = 0;
  for (int c = 0; c < 100; ++c) {
    const Shape s{1 + static_cast<int>(rng.uniform_int(0, 2)), 2 + static_cast<int>(rng.uniform_int(0, 14)),
                  1 + static_cast<int>(rng.uniform_int(0, 15))};
    const int np = 2 + static_cast<int>(rng.uniform_int(0, 5));
    const int b = 1 + static_cast<int>(rng.uniform_int(0, 3));
    Population pop;
    for (int j = 0; j < np; ++j) {
      std::vector<Image> imgs;
      for (int i = 0; i < b; ++i) imgs.push_back(random_image(s, rng));
      pop.candidates.emplace_back(imgs);
    }
    CrossoverPlan plan;
    for (int p = 0; p < np / 2; ++p) {
      const bool open = rng.uniform01() < 0.7;
      plan.swap.push_back(open);
      plan.row_cut.push_back(open ? static_cast<int>(rng.uniform_int(1, s.height - 1)) : 0);
    }
    const Population once = aga_crossover(pop, plan);
    const Population twice = aga_crossover(once, plan);
    bool same = true;
    for (int j = 0; j < np; ++j) same = same && bitwise_equal(twice.candidates[j], pop.candidates[j]);
    involutions += same;
  }
  if (involutions != 100) why += " crossover not an involution;";

  int agree = 0;
  const std::uint64_t seeds[] = {0, 1, 7, 42, 1000};
  for (std::uint64_t seed : seeds) {
    const Batch x = brightness_batch(4, {3, 16, 16}, 600 + seed);
    const Labels y = predict_labels(m, x);
    AttackConfig cfg;
    cfg.population = 3;
    cfg.iterations = 3;
    cfg.p_mutation = 0.6;
    cfg.p_crossover = 0.6;
    cfg.seed = seed;
    std::vector<int> picks;
    const Batch ref = oracle::aga(x, y, m, cfg, &picks);
    const AttackOutcome o = aga_attack(x, y, m, cfg);
    const auto& prov = std::get<AgaProvenance>(o.provenance);
    bool ok = bitwise_equal(ref, o.adversarial) && prov.generations.size() == picks.size();
    for (std::size_t g = 0; ok && g < picks.size(); ++g) ok = prov.generations[g].selected == picks[g];
    agree += ok;
  }
  if (agree != 5) why += " dual implementation disagrees;";
  return {why.empty(), "involution " + std::to_string(involutions) + "/100, oracle agreement " +
                           std::to_string(agree) + "/5" + why};
}

// 7: SR trends on the brightness oracle.
Verdict trends() {
  const auto t0 = Clock::now();
  const Shape shape{3, 64, 64};
  BrightnessOracle m(shape, 4);
  Dataset d;
  d.shape = shape;
  d.num_classes = 4;
  const Batch x = brightness_batch(16, shape, 7070);
  for (std::size_t i = 0; i < x.size(); ++i) d.images.push_back(x[i]);
  d.labels = predict_labels(m, x);

  RunSpec base;
  base.repeats = 5;
  base.batch_size = 16;
  base.attack.seed = 500;
  base.attack.lanes = 4;
  auto sr_of = [&](const std::function<void(AttackConfig&)>& tweak) {
    RunSpec s = base;
    tweak(s.attack);
    return run_attack(s, d, m).sr.mean;
  };

  std::vector<double> by_iters;
  for (int n = 1; n <= 10; ++n) by_iters.push_back(sr_of([n](AttackConfig& c) { c.iterations = n; }));
  int inversions = 0;
  bool small = true;
  for (std::size_t i = 1; i < by_iters.size(); ++i)
    if (by_iters[i] < by_iters[i - 1]) {
      ++inversions;
      small = small && by_iters[i - 1] - by_iters[i] <= 2.0;
    }
  const bool iters_ok = inversions == 0 || (inversions == 1 && small);

  const double pm_lo = sr_of([](AttackConfig& c) { c.p_mutation = 0.1; });
  const double pm_hi = sr_of([](AttackConfig& c) { c.p_mutation = 1.0; });
  const double eps_lo = sr_of([](AttackConfig& c) { c.epsilon = 0.05; });
  const double eps_hi = sr_of([](AttackConfig& c) { c.epsilon = 0.5; });
  const double secs = seconds_since(t0);

  std::string curve;
  for (double v : by_iters) curve += (curve.empty() ? "" : ",") + fmt(v, 1);
  const bool ok = iters_ok && pm_hi >= pm_lo && eps_hi >= eps_lo && secs < 60.0;
  return {ok, "iters [" + curve + "] inversions " + std::to_string(inversions) + "; p_mut 0.1->" + fmt(pm_lo, 1) +
                  " 1.0->" + fmt(pm_hi, 1) + "; eps 0.05->" + fmt(eps_lo, 1) + " 0.5->" + fmt(eps_hi, 1) + "; " +
                  fmt(secs, 2) + " s"};
}

// 8: affine identity, quarter turn, range.
Verdict affine_properties() {
  std::string why;
  RngStream rng(88);
  const Image img = random_image({3, 17, 23}, rng);
  if (!bitwise_equal(apply_affine(img, AffineParams::identity()), img)) why += " identity not exact;";

  for (int n : {6, 7, 16}) {
    const Image sq = random_image({2, n, n}, rng);
    AffineParams p;
    p.theta = 90.0;
    const Image out = apply_affine(sq, p);
    for (int c = 0; c < 2; ++c)
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
          if (out.at(c, y, x) != sq.at(c, n - 1 - x, y)) {
            why += " quarter turn mismatch at n=" + std::to_string(n) + ";";
            c = 2, y = n, x = n;
          }
  }

  int in_range = 0;
  for (int i = 0; i < 1000; ++i) {
    const Image src = random_image({3, 12, 12}, rng);
    const Image out = apply_affine(src, sample_affine(rng));
    in_range += std::all_of(out.data().begin(), out.data().end(), [](float v) { return v >= 0.0f && v <= 1.0f; });
  }
  if (in_range != 1000) why += " values left [0,1];";
  return {why.empty(), "identity, quarter turn, range " + std::to_string(in_range) + "/1000" + why};
}

// 9: command-line attack on the fixture, run twice.
Verdict cli_end_to_end() {
  const auto t0 = Clock::now();
  const fs::path root = fs::temp_directory_path() / "igaff_acceptance_cli";
  fs::remove_all(root);
  std::string why;
  std::string reports[2][2];
  for (int run = 0; run < 2; ++run) {
    const fs::path out = root / ("run" + std::to_string(run));
    const std::string cmd = std::string("\"") + IGAFF_CLI + "\" attack --model builtin:" +
                            (kData / "fixture" / "mlp1" / "model.json").string() + " --data " +
                            (kData / "fixture" / "manifest.csv").string() + " --repeats 5 --seed 2024 --out " +
                            out.string() + " > " + (root / "log.txt").string() + " 2>&1";
    fs::create_directories(root);
    if (std::system(cmd.c_str()) != 0) {
      why += " run " + std::to_string(run) + " failed: " + slurp(root / "log.txt");
      continue;
    }
    reports[run][0] = slurp(out / "report.json");
    reports[run][1] = slurp(out / "report.csv");
  }
  const double secs = seconds_since(t0);
  if (why.empty()) {
    if (reports[0][0] != reports[1][0] || reports[0][1] != reports[1][1]) why += " reports differ;";
    const auto j = nlohmann::json::parse(reports[0][0], nullptr, false);
    if (j.is_discarded() || !j.contains("aggregate") || !j["aggregate"]["sr"].contains("mean") ||
        !j["aggregate"]["sr"].contains("std") || j["repeats"].size() != 5)
      why += " report.json lacks mean/std over 5 repeats;";
    if (reports[0][1].find("\nmean,") == std::string::npos || reports[0][1].find("\nstd,") == std::string::npos)
      why += " report.csv lacks mean/std rows;";
    if (why.empty())
      return {secs < 120.0, "SR " + fmt(j["aggregate"]["sr"]["mean"].get<double>(), 2) + " +/- " +
                                fmt(j["aggregate"]["sr"]["std"].get<double>(), 2) + ", identical re-run, " +
                                fmt(secs, 2) + " s"};
  }
  return {false, why};
}

}  // namespace

int main() {
  const std::pair<const char*, Verdict (*)()> criteria[] = {
      {"sr-reproduction", sr_reproduction}, {"diversity-factor", diversity},
      {"closed-forms", closed_forms},       {"determinism", determinism},
      {"ata-properties", ata_properties},   {"aga-properties", aga_properties},
      {"sr-trends", trends},                {"affine-properties", affine_properties},
      {"cli-end-to-end", cli_end_to_end},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << index++ << " " << name << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
