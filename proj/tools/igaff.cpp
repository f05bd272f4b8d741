// Command-line front end for attack runs, sweeps, targeted batteries,
// augmentation export, evaluation and remote model probing.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "igaff/harness/report.hpp"
#include "igaff/harness/runner.hpp"
#include "igaff/remote/remote_model.hpp"

namespace {

using namespace igaff;

struct Options {
  std::string algo = "aga";
  int iters = 7;
  int pop = 3;
  double p_mut = 0.3;
  double p_cross = 0.3;
  double epsilon = 0.1;
  std::optional<int> target;
  std::string targeted_mode = "intent";
  std::uint64_t seed = 0;
  int repeats = 5;
  std::string model;
  std::string data;
  std::string out;
  int batch_size = 32;
  int timeout_ms = 30000;
  unsigned lanes = 1;
  unsigned attack_lanes = 1;
  bool track_global_best = false;

  std::vector<std::string> sweeps;
  bool cross_product = false;
  bool allow_out_of_range = false;
  std::vector<int> targets;
  std::string format = "igt";
};

void add_model_options(CLI::App* app, Options& o) {
  app->add_option("--model", o.model, "builtin:<model.json> or remote:<endpoint> (default: $IGAFF_MODEL_ENDPOINT)");
  app->add_option("--timeout-ms", o.timeout_ms, "Remote model timeout")->check(CLI::PositiveNumber);
}

void add_data_options(CLI::App* app, Options& o, bool need_out) {
  add_model_options(app, o);
  app->add_option("--data", o.data, "Dataset manifest CSV")->required()->check(CLI::ExistingFile);
  auto* out = app->add_option("--out", o.out, "Output directory");
  if (need_out) out->required();
  app->add_option("--batch-size", o.batch_size, "Images per attacked batch")->check(CLI::PositiveNumber);
  app->add_option("--lanes", o.lanes, "Batches processed concurrently")->check(CLI::PositiveNumber);
}

void add_attack_options(CLI::App* app, Options& o) {
  add_data_options(app, o, true);
  app->add_option("--algo", o.algo, "Attack algorithm")->check(CLI::IsMember({"ata", "aga"}));
  app->add_option("--iters", o.iters, "Iterations / generations");
  app->add_option("--pop", o.pop, "AGA population size");
  app->add_option("--p-mut", o.p_mut, "AGA mutation probability");
  app->add_option("--p-cross", o.p_cross, "AGA crossover probability");
  app->add_option("--epsilon", o.epsilon, "AGA noise bound");
  app->add_option("--targeted-mode", o.targeted_mode, "Targeted score sign")
      ->check(CLI::IsMember({"literal", "intent"}));
  app->add_option("--seed", o.seed, "Base seed; repeat r uses seed + r");
  app->add_option("--repeats", o.repeats, "Repeats per configuration")->check(CLI::PositiveNumber);
  app->add_option("--attack-lanes", o.attack_lanes, "Threads inside one attack")->check(CLI::PositiveNumber);
  app->add_flag("--track-global-best", o.track_global_best, "AGA: also log the best generation overall");
}

RunSpec make_spec(const Options& o, RunMode mode) {
  RunSpec s;
  s.mode = mode;
  s.attack.algorithm = parse_algorithm(o.algo);
  s.attack.iterations = o.iters;
  s.attack.population = o.pop;
  s.attack.p_mutation = o.p_mut;
  s.attack.p_crossover = o.p_cross;
  s.attack.epsilon = o.epsilon;
  s.attack.target = o.target;
  s.attack.targeted_mode = parse_targeted_mode(o.targeted_mode);
  s.attack.seed = o.seed;
  s.attack.track_global_best = o.track_global_best;
  s.attack.lanes = o.attack_lanes;
  s.model = ModelRef::parse(o.model);
  s.data = o.data;
  s.out_dir = o.out;
  s.repeats = o.repeats;
  s.batch_size = o.batch_size;
  s.batch_lanes = o.lanes;
  s.timeout = std::chrono::milliseconds(o.timeout_ms);
  s.targets = o.targets;
  s.export_format = o.format;
  s.cross_product = o.cross_product;
  s.allow_out_of_range = o.allow_out_of_range;
  for (const auto& text : o.sweeps) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--sweep expects name=v1,v2,..., got '" + text + "'");
    SweepAxis axis{text.substr(0, eq), {}};
    std::stringstream vals(text.substr(eq + 1));
    for (std::string v; std::getline(vals, v, ',');) {
      std::size_t used = 0;
      axis.values.push_back(std::stod(v, &used));
      if (used != v.size()) throw std::invalid_argument("bad sweep value '" + v + "'");
    }
    s.sweep.push_back(std::move(axis));
  }
  return s;
}

void emit(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  write_text_atomic(dir / name, text);
  std::cout << "wrote " << (dir / name).string() << '\n';
}

struct Loaded {
  DatasetManifest manifest;
  Dataset data;
  std::unique_ptr<VictimModel> model;
};

Loaded load(const RunSpec& s) {
  Loaded l;
  l.manifest = DatasetManifest::load(s.data);
  l.data = load_dataset(l.manifest);
  l.model = open_model(s.model, s.timeout);
  return l;
}

int run(int argc, char** argv) {
  CLI::App app{"Black-box affine adversarial attack engine"};
  app.require_subcommand(1);
  Options o;

  auto* attack = app.add_subcommand("attack", "Attack a dataset and report SR over repeats");
  add_attack_options(attack, o);
  attack->add_option("--target", o.target, "Target class for a targeted attack");

  auto* sweep = app.add_subcommand("sweep", "Run one attack report per grid value");
  add_attack_options(sweep, o);
  sweep->add_option("--target", o.target, "Target class for a targeted attack");
  sweep->add_option("--sweep", o.sweeps, "name=v1,v2,... with name in iters|pop|p-mut|p-cross|epsilon")->required();
  sweep->add_flag("--cross-product", o.cross_product, "Allow several swept parameters (full grid)");
  sweep->add_flag("--allow-out-of-range", o.allow_out_of_range, "Accept values outside the default ranges");

  auto* targeted = app.add_subcommand("targeted", "Targeted battery with a shared untargeted contrast");
  add_attack_options(targeted, o);
  targeted->add_option("--targets", o.targets, "Target classes (default: all)")->delimiter(',');

  auto* augment = app.add_subcommand("augment", "Export adversarial copies next to the originals");
  add_attack_options(augment, o);
  augment->add_option("--target", o.target, "Target class for a targeted attack");
  augment->add_option("--format", o.format, "Image format of the copies")->check(CLI::IsMember({"igt", "ppm"}));

  auto* eval = app.add_subcommand("eval", "Clean accuracy and F1 of a model over a manifest");
  add_data_options(eval, o, false);

  auto* probe = app.add_subcommand("probe", "Handshake with a remote model and print its metadata");
  add_model_options(probe, o);

  CLI11_PARSE(app, argc, argv);

  if (probe->parsed()) {
    const ModelRef ref = ModelRef::parse(o.model.empty() ? "" : o.model);
    if (ref.kind != ModelRef::Kind::kRemote) throw std::invalid_argument("probe needs a remote model");
    auto m = remote::RemoteModel::connect(ref.location, std::chrono::milliseconds(o.timeout_ms));
    nlohmann::ordered_json j;
    j["endpoint"] = ref.location;
    j["num_classes"] = m->num_classes();
    j["input_shape"] = {m->input_shape().channels, m->input_shape().height, m->input_shape().width};
    std::cout << j.dump() << '\n';
    return 0;
  }

  if (eval->parsed()) {
    RunSpec s = make_spec(o, RunMode::kEval);
    Loaded l = load(s);
    const EvalReport r = run_eval(l.data, *l.model, s.batch_size);
    nlohmann::ordered_json j;
    j["engine_version"] = kEngineVersion;
    j["model"] = s.model.str();
    j["data"] = s.data.generic_string();
    j["eval"] = to_json(r);
    if (o.out.empty()) {
      std::cout << j.dump(2) << '\n';
    } else {
      emit(o.out, "report.json", j.dump(2) + "\n");
      emit(o.out, "report.csv", eval_csv(r));
    }
    return 0;
  }

  if (attack->parsed()) {
    RunSpec s = make_spec(o, RunMode::kAttack);
    Loaded l = load(s);
    const RunReport r = run_attack(s, l.data, *l.model);
    emit(o.out, "report.json", to_json(r).dump(2) + "\n");
    emit(o.out, "report.csv", report_csv(r));
    std::cout << "SR " << r.sr.mean << " +- " << r.sr.std << " over " << r.repeats.size() << " repeats\n";
    return 0;
  }

  if (sweep->parsed()) {
    RunSpec s = make_spec(o, RunMode::kSweep);
    s.validate();
    Loaded l = load(s);
    const auto points = run_sweep(s, l.data, *l.model);
    emit(o.out, "report.json", to_json(points).dump(2) + "\n");
    emit(o.out, "sweep.csv", sweep_csv(points));
    return 0;
  }

  if (targeted->parsed()) {
    RunSpec s = make_spec(o, RunMode::kTargeted);
    Loaded l = load(s);
    if (s.targets.empty())
      for (int c = 0; c < l.data.num_classes; ++c) s.targets.push_back(c);
    const TargetedReport r = run_targeted(s, l.data, *l.model);
    emit(o.out, "report.json", to_json(r).dump(2) + "\n");
    emit(o.out, "report.csv", targeted_csv(r));
    return 0;
  }

  RunSpec s = make_spec(o, RunMode::kAugment);
  Loaded l = load(s);
  const AugmentSummary a = run_augment(s, l.manifest, l.data, *l.model);
  std::cout << "wrote " << a.manifest.string() << " (" << a.originals << " originals, " << a.adversarial
            << " adversarial)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
