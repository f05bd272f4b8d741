#include "igaff/harness/runner.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "igaff/attacks/attacks.hpp"
#include "igaff/common/parallel.hpp"
#include "igaff/imagecore/io.hpp"
#include "igaff/imagecore/rng.hpp"
#include "igaff/models/builtin.hpp"
#include "igaff/models/loss.hpp"
#include "igaff/remote/remote_model.hpp"

namespace igaff {

namespace fs = std::filesystem;

const char* to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::kAttack: return "attack";
    case RunMode::kSweep: return "sweep";
    case RunMode::kTargeted: return "targeted";
    case RunMode::kAugment: return "augment";
    case RunMode::kEval: return "eval";
  }
  return "?";
}

ModelRef ModelRef::parse(const std::string& text) {
  if (text.empty()) {
    const std::string env = remote::default_endpoint();
    if (env.empty())
      throw std::invalid_argument(std::string("no model given and ") + remote::kEndpointEnvVar + " is unset");
    return {Kind::kRemote, env};
  }
  if (text.rfind("builtin:", 0) == 0) return {Kind::kBuiltin, text.substr(8)};
  if (text.rfind("remote:", 0) == 0) return {Kind::kRemote, text.substr(7)};
  throw std::invalid_argument("model must be builtin:<path> or remote:<endpoint>, got '" + text + "'");
}

std::string ModelRef::str() const { return (kind == Kind::kBuiltin ? "builtin:" : "remote:") + location; }

std::unique_ptr<VictimModel> open_model(const ModelRef& ref, std::chrono::milliseconds timeout) {
  if (ref.location.empty()) throw std::invalid_argument("model reference has an empty location");
  if (ref.kind == ModelRef::Kind::kBuiltin) return load_builtin_model(ref.location);
  return remote::RemoteModel::connect(ref.location, timeout);
}

namespace {

struct ParamRange {
  const char* name;
  double lo, hi;
  bool integral;
};

constexpr ParamRange kSweepParams[] = {
    {"iters", 1, 10, true},
    {"pop", 1, 1e9, true},
    {"p-mut", 0, 1, false},
    {"p-cross", 0, 1, false},
    {"epsilon", 0, 1, false},
};

const ParamRange& sweep_param(const std::string& name) {
  for (const auto& p : kSweepParams)
    if (name == p.name) return p;
  throw std::invalid_argument("unknown sweep parameter '" + name + "' (iters, pop, p-mut, p-cross, epsilon)");
}

void check_compatible(const Dataset& data, const VictimModel& model) {
  if (data.size() == 0) throw std::invalid_argument("dataset is empty");
  if (model.input_shape() != data.shape)
    throw std::invalid_argument("model expects " + model.input_shape().str() + " but dataset images are " +
                                data.shape.str());
  if (model.num_classes() != data.num_classes)
    throw std::invalid_argument("model has " + std::to_string(model.num_classes()) + " classes, dataset has " +
                                std::to_string(data.num_classes));
}

struct AttackedSet {
  std::vector<AttackOutcome> outcomes;  // one per batch
  std::vector<LogitsBatch> logits;      // model output on each adversarial batch
};

AttackedSet attack_dataset(const RunSpec& spec, const AttackConfig& cfg, const Dataset& data, const VictimModel& model,
                           int repeat) {
  const auto ranges = batch_ranges(data.size(), static_cast<std::size_t>(spec.batch_size));
  AttackedSet out;
  out.outcomes.resize(ranges.size());
  out.logits.resize(ranges.size());
  parallel_for(ranges.size(), spec.batch_lanes, [&](std::size_t b) {
    try {
      AttackConfig c = cfg;
      c.seed = batch_seed(cfg.seed, repeat, b);
      const auto [lo, hi] = ranges[b];
      out.outcomes[b] = run_attack_algorithm(data.batch(lo, hi), data.batch_labels(lo, hi), model, c);
      out.logits[b] = model.predict(out.outcomes[b].adversarial);
    } catch (const std::exception& e) {
      throw RunError(repeat, b, e.what());
    }
  });
  return out;
}

Labels pooled_labels(const std::vector<LogitsBatch>& logits) {
  Labels out;
  for (const auto& l : logits)
    for (std::size_t i = 0; i < l.rows(); ++i) out.push_back(argmax(l.row(i)));
  return out;
}

std::vector<LogitsBatch> predict_logits(const Dataset& data, const VictimModel& model, int batch_size,
                                        unsigned lanes) {
  const auto ranges = batch_ranges(data.size(), static_cast<std::size_t>(batch_size));
  std::vector<LogitsBatch> out(ranges.size());
  parallel_for(ranges.size(), lanes, [&](std::size_t b) {
    try {
      out[b] = model.predict(data.batch(ranges[b].first, ranges[b].second));
    } catch (const std::exception& e) {
      throw RunError(-1, b, e.what());
    }
  });
  return out;
}

double mean_of(const std::vector<AttackOutcome>& outs, double (*get)(const AttackOutcome&)) {
  double s = 0.0;
  for (const auto& o : outs) s += get(o);
  return s / static_cast<double>(outs.size());
}

AggregateStat aggregate_field(const std::vector<RepeatMetrics>& rs, double RepeatMetrics::*field) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.*field);
  return aggregate(v);
}

template <class T, class Get>
AggregateStat aggregate_by(const std::vector<T>& rs, Get get) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(get(r));
  return aggregate(v);
}

// Percent of predictions equal to c, and mean softmax probability of c.
std::pair<double, double> target_stats(const std::vector<LogitsBatch>& logits, int c) {
  std::size_t n = 0, hits = 0;
  double prob = 0.0;
  for (const auto& l : logits)
    for (std::size_t i = 0; i < l.rows(); ++i, ++n) {
      hits += argmax(l.row(i)) == c;
      prob += softmax(l.row(i))[static_cast<std::size_t>(c)];
    }
  return {100.0 * static_cast<double>(hits) / static_cast<double>(n), prob / static_cast<double>(n)};
}

// Recall of class c in percent, or nothing without support.
std::optional<double> class_accuracy(const Labels& preds, const Labels& truth, int c) {
  std::size_t support = 0, correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (truth[i] == c) {
      ++support;
      correct += preds[i] == c;
    }
  if (support == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(support);
}

}  // namespace

void RunSpec::validate() const {
  attack.validate();
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (timeout.count() <= 0) throw std::invalid_argument("timeout must be positive");
  if (mode == RunMode::kSweep) {
    if (sweep.empty()) throw std::invalid_argument("sweep needs a parameter grid");
    if (sweep.size() > 1 && !cross_product)
      throw std::invalid_argument("sweeping several parameters requires the cross-product flag");
    for (const auto& axis : sweep) {
      const ParamRange& r = sweep_param(axis.param);
      if (axis.values.empty()) throw std::invalid_argument("sweep grid for " + axis.param + " is empty");
      for (double v : axis.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("sweep value for " + axis.param + " is not finite");
        if (r.integral && v != std::floor(v))
          throw std::invalid_argument("sweep value for " + axis.param + " must be an integer");
        if (!allow_out_of_range && (v < r.lo || v > r.hi)) {
          std::ostringstream msg;
          msg << "sweep value " << v << " for " << axis.param << " is outside [" << r.lo << ", " << r.hi << "]";
          throw std::invalid_argument(msg.str());
        }
      }
    }
  }
  if (mode == RunMode::kTargeted && targets.empty()) throw std::invalid_argument("targeted run needs target classes");
  if (mode == RunMode::kAugment && export_format != "igt" && export_format != "ppm")
    throw std::invalid_argument("export format must be igt or ppm");
}

std::uint64_t batch_seed(std::uint64_t base_seed, int repeat, std::size_t batch) noexcept {
  return RngStream::derive_seed(base_seed + static_cast<std::uint64_t>(repeat), batch);
}

Labels predict_dataset(const Dataset& data, const VictimModel& model, int batch_size) {
  return pooled_labels(predict_logits(data, model, batch_size, 1));
}

RunReport run_attack(const RunSpec& spec, const Dataset& data, const VictimModel& model) {
  spec.validate();
  check_compatible(data, model);

  RunReport rep;
  rep.config = spec.attack;
  rep.model = spec.model.str();
  rep.data = spec.data.generic_string();
  rep.batch_size = spec.batch_size;

  const Labels clean = pooled_labels(predict_logits(data, model, spec.batch_size, spec.batch_lanes));
  const EvalReport clean_eval = f1_scores(clean, data.labels, data.num_classes);

  for (int r = 0; r < spec.repeats; ++r) {
    const AttackedSet set = attack_dataset(spec, spec.attack, data, model, r);
    const Labels attacked = pooled_labels(set.logits);
    const EvalReport att_eval = f1_scores(attacked, data.labels, data.num_classes);

    RepeatMetrics m;
    m.repeat = r;
    m.seed = spec.attack.seed + static_cast<std::uint64_t>(r);
    m.acc_unattacked = clean_eval.accuracy;
    m.acc_attacked = att_eval.accuracy;
    m.sr = success_rate(m.acc_unattacked, m.acc_attacked);
    m.macro_f1_unattacked = clean_eval.macro_f1;
    m.macro_f1_attacked = att_eval.macro_f1;
    m.weighted_f1_unattacked = clean_eval.weighted_f1;
    m.weighted_f1_attacked = att_eval.weighted_f1;
    m.mean_initial_score = mean_of(set.outcomes, [](const AttackOutcome& o) { return o.initial.score; });
    m.mean_final_score = mean_of(set.outcomes, [](const AttackOutcome& o) { return o.final_score(); });
    rep.seeds.push_back(m.seed);
    rep.repeats.push_back(m);
  }
  rep.acc_unattacked = aggregate_field(rep.repeats, &RepeatMetrics::acc_unattacked);
  rep.acc_attacked = aggregate_field(rep.repeats, &RepeatMetrics::acc_attacked);
  rep.sr = aggregate_field(rep.repeats, &RepeatMetrics::sr);
  rep.macro_f1_attacked = aggregate_field(rep.repeats, &RepeatMetrics::macro_f1_attacked);
  rep.weighted_f1_attacked = aggregate_field(rep.repeats, &RepeatMetrics::weighted_f1_attacked);
  return rep;
}

void apply_sweep_value(AttackConfig& cfg, const std::string& param, double value) {
  const ParamRange& r = sweep_param(param);
  if (r.integral && value != std::floor(value))
    throw std::invalid_argument("sweep value for " + param + " must be an integer");
  if (param == "iters") cfg.iterations = static_cast<int>(value);
  else if (param == "pop") cfg.population = static_cast<int>(value);
  else if (param == "p-mut") cfg.p_mutation = value;
  else if (param == "p-cross") cfg.p_crossover = value;
  else cfg.epsilon = value;
}

std::vector<SweepPoint> run_sweep(const RunSpec& spec, const Dataset& data, const VictimModel& model) {
  spec.validate();
  if (spec.mode != RunMode::kSweep) throw std::invalid_argument("run_sweep needs mode sweep");

  std::vector<SweepPoint> out;
  std::vector<std::size_t> idx(spec.sweep.size(), 0);
  for (;;) {
    RunSpec point = spec;
    point.mode = RunMode::kAttack;
    SweepPoint sp;
    for (std::size_t a = 0; a < spec.sweep.size(); ++a) {
      const double v = spec.sweep[a].values[idx[a]];
      apply_sweep_value(point.attack, spec.sweep[a].param, v);
      sp.values.emplace_back(spec.sweep[a].param, v);
    }
    sp.report = run_attack(point, data, model);
    out.push_back(std::move(sp));

    // Odometer over the axes, last axis fastest.
    std::size_t a = spec.sweep.size();
    while (a > 0) {
      --a;
      if (++idx[a] < spec.sweep[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

TargetedReport run_targeted(const RunSpec& spec, const Dataset& data, const VictimModel& model) {
  spec.validate();
  check_compatible(data, model);
  for (int c : spec.targets)
    if (c < 0 || c >= data.num_classes)
      throw std::invalid_argument("target class " + std::to_string(c) + " outside [0, " +
                                  std::to_string(data.num_classes) + ")");

  TargetedReport rep;
  rep.config = spec.attack;
  rep.model = spec.model.str();
  rep.data = spec.data.generic_string();

  RunSpec untargeted = spec;
  untargeted.mode = RunMode::kAttack;
  untargeted.attack.target.reset();
  rep.untargeted = run_attack(untargeted, data, model);
  rep.seeds = rep.untargeted.seeds;

  const std::vector<LogitsBatch> clean_logits = predict_logits(data, model, spec.batch_size, spec.batch_lanes);
  const Labels clean = pooled_labels(clean_logits);
  const double acc_clean = accuracy(clean, data.labels);

  for (int c : spec.targets) {
    TargetReport t;
    t.target = c;
    for (int y : data.labels) t.support += y == c;
    t.support_zero = t.support == 0;
    const auto [hit_clean, prob_clean] = target_stats(clean_logits, c);
    const std::optional<double> cls_clean = class_accuracy(clean, data.labels, c);

    AttackConfig cfg = spec.attack;
    cfg.target = c;
    for (int r = 0; r < spec.repeats; ++r) {
      const AttackedSet set = attack_dataset(spec, cfg, data, model, r);
      const Labels attacked = pooled_labels(set.logits);
      const auto [hit_att, prob_att] = target_stats(set.logits, c);

      TargetRepeat tr;
      tr.repeat = r;
      tr.acc_unattacked = acc_clean;
      tr.acc_attacked = accuracy(attacked, data.labels);
      tr.sr_global = success_rate(tr.acc_unattacked, tr.acc_attacked);
      tr.class_acc_unattacked = cls_clean;
      tr.class_acc_attacked = class_accuracy(attacked, data.labels, c);
      if (cls_clean && *cls_clean > 0.0) tr.sr_class = success_rate(*cls_clean, *tr.class_acc_attacked);
      tr.hit_rate_unattacked = hit_clean;
      tr.hit_rate_attacked = hit_att;
      tr.mean_target_prob_unattacked = prob_clean;
      tr.mean_target_prob_attacked = prob_att;
      t.repeats.push_back(tr);
    }
    t.sr_global = aggregate_by(t.repeats, [](const TargetRepeat& r) { return r.sr_global; });
    t.hit_rate_attacked = aggregate_by(t.repeats, [](const TargetRepeat& r) { return r.hit_rate_attacked; });
    t.mean_target_prob_attacked =
        aggregate_by(t.repeats, [](const TargetRepeat& r) { return r.mean_target_prob_attacked; });
    if (t.repeats.front().sr_class)
      t.sr_class = aggregate_by(t.repeats, [](const TargetRepeat& r) { return *r.sr_class; });
    rep.targets.push_back(std::move(t));
  }
  return rep;
}

AugmentSummary run_augment(const RunSpec& spec, const DatasetManifest& manifest, const Dataset& data,
                           const VictimModel& model) {
  spec.validate();
  check_compatible(data, model);
  if (manifest.entries.size() != data.size()) throw std::invalid_argument("manifest and dataset sizes differ");
  if (spec.out_dir.empty()) throw std::invalid_argument("augment needs an output directory");
  if (fs::exists(spec.out_dir) && !(fs::is_directory(spec.out_dir) && fs::is_empty(spec.out_dir)))
    throw std::invalid_argument("output directory " + spec.out_dir.string() + " already exists and is not empty");

  const AttackedSet set = attack_dataset(spec, spec.attack, data, model, 0);
  const auto ranges = batch_ranges(data.size(), static_cast<std::size_t>(spec.batch_size));

  const fs::path out = spec.out_dir;
  fs::create_directories(out / "images");
  fs::create_directories(out / "provenance");
  const fs::path out_abs = fs::weakly_canonical(fs::absolute(out));

  DatasetManifest result = manifest;
  result.root = out;
  result.entries.clear();
  for (const auto& e : manifest.entries) {
    const fs::path src = fs::weakly_canonical(fs::absolute(manifest.resolve(e)));
    fs::path rel = src.lexically_relative(out_abs);
    result.entries.push_back({rel.empty() ? src : rel, e.class_index});
  }

  const std::string ext = "." + spec.export_format;
  auto adv_name = [&](std::size_t i) {
    std::ostringstream s;
    s << std::setfill('0') << std::setw(5) << i << '_' << manifest.entries[i].path.stem().string() << "_adv";
    return s.str();
  };

  const ScoreMode mode = spec.attack.score_mode();
  for (std::size_t b = 0; b < ranges.size(); ++b) {
    const auto [lo, hi] = ranges[b];
    const AttackOutcome& o = set.outcomes[b];

    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (std::size_t i = lo; i < hi; ++i) members.push_back("images/" + adv_name(i) + ext);

    const std::string batch_file = "provenance/batch_" + std::to_string(b) + ".json";
    nlohmann::ordered_json bj;
    bj["batch"] = b;
    bj["seed"] = std::to_string(batch_seed(spec.attack.seed, 0, b));
    bj["algorithm"] = to_string(spec.attack.algorithm);
    bj["score_mode"] = to_string(mode);
    bj["members"] = members;
    bj["outcome"] = to_json(o);
    std::ofstream(out / batch_file) << bj.dump(2) << '\n';

    for (std::size_t i = lo; i < hi; ++i) {
      const std::string name = adv_name(i);
      save_image(o.adversarial[i - lo], out / "images" / (name + ext));
      result.entries.push_back({"images/" + name + ext, manifest.entries[i].class_index});

      nlohmann::ordered_json pj;
      pj["source"] = result.entries[i].path.generic_string();
      pj["adversarial"] = "images/" + name + ext;
      pj["class_index"] = manifest.entries[i].class_index;
      pj["batch"] = b;
      pj["index_in_batch"] = i - lo;
      pj["batch_members"] = members;
      pj["batch_provenance"] = batch_file;
      pj["algorithm"] = to_string(spec.attack.algorithm);
      pj["score_mode"] = to_string(mode);
      if (spec.attack.target) pj["target"] = *spec.attack.target;
      pj["initial_score"] = o.initial.score;
      pj["final_score"] = o.final_score();
      if (const auto* ata = std::get_if<AtaProvenance>(&o.provenance); ata && ata->winning_iteration)
        pj["params"] = to_json(ata->params[i - lo]);
      std::ofstream(out / "provenance" / (name + ".json")) << pj.dump(2) << '\n';
    }
  }

  const fs::path mpath = out / "manifest.csv";
  result.save(mpath);
  return {mpath, manifest.entries.size(), data.size()};
}

EvalReport run_eval(const Dataset& data, const VictimModel& model, int batch_size) {
  check_compatible(data, model);
  return f1_scores(predict_dataset(data, model, batch_size), data.labels, data.num_classes);
}

}  // namespace igaff
