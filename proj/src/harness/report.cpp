#include "igaff/harness/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace igaff {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json seeds_json(const std::vector<std::uint64_t>& seeds) {
  ordered_json j = ordered_json::array();
  for (auto s : seeds) j.push_back(std::to_string(s));
  return j;
}

}  // namespace

ordered_json to_json(const AttackConfig& cfg) {
  ordered_json j;
  j["algorithm"] = to_string(cfg.algorithm);
  j["iterations"] = cfg.iterations;
  j["population"] = cfg.population;
  j["p_mutation"] = cfg.p_mutation;
  j["p_crossover"] = cfg.p_crossover;
  j["epsilon"] = cfg.epsilon;
  j["target"] = cfg.target ? ordered_json(*cfg.target) : ordered_json(nullptr);
  j["targeted_mode"] = to_string(cfg.targeted_mode);
  j["score_mode"] = to_string(cfg.score_mode());
  j["seed"] = std::to_string(cfg.seed);
  j["track_global_best"] = cfg.track_global_best;
  return j;
}

ordered_json to_json(const AggregateStat& s) {
  ordered_json j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["n"] = s.n_repeats;
  return j;
}

ordered_json to_json(const RunReport& r) {
  ordered_json j;
  j["engine_version"] = r.engine_version;
  j["model"] = r.model;
  j["data"] = r.data;
  j["batch_size"] = r.batch_size;
  j["config"] = to_json(r.config);
  j["seeds"] = seeds_json(r.seeds);
  ordered_json reps = ordered_json::array();
  for (const auto& m : r.repeats) {
    ordered_json rj;
    rj["repeat"] = m.repeat;
    rj["seed"] = std::to_string(m.seed);
    rj["acc_unattacked"] = m.acc_unattacked;
    rj["acc_attacked"] = m.acc_attacked;
    rj["sr"] = m.sr;
    rj["macro_f1_unattacked"] = m.macro_f1_unattacked;
    rj["macro_f1_attacked"] = m.macro_f1_attacked;
    rj["weighted_f1_unattacked"] = m.weighted_f1_unattacked;
    rj["weighted_f1_attacked"] = m.weighted_f1_attacked;
    rj["mean_initial_score"] = m.mean_initial_score;
    rj["mean_final_score"] = m.mean_final_score;
    reps.push_back(std::move(rj));
  }
  j["repeats"] = std::move(reps);
  ordered_json agg;
  agg["acc_unattacked"] = to_json(r.acc_unattacked);
  agg["acc_attacked"] = to_json(r.acc_attacked);
  agg["sr"] = to_json(r.sr);
  agg["macro_f1_attacked"] = to_json(r.macro_f1_attacked);
  agg["weighted_f1_attacked"] = to_json(r.weighted_f1_attacked);
  j["aggregate"] = std::move(agg);
  return j;
}

ordered_json to_json(const std::vector<SweepPoint>& points) {
  ordered_json j = ordered_json::array();
  for (const auto& p : points) {
    ordered_json pj;
    ordered_json vals;
    for (const auto& [name, v] : p.values) vals[name] = v;
    pj["values"] = std::move(vals);
    pj["report"] = to_json(p.report);
    j.push_back(std::move(pj));
  }
  return j;
}

ordered_json to_json(const TargetedReport& r) {
  ordered_json j;
  j["engine_version"] = r.engine_version;
  j["model"] = r.model;
  j["data"] = r.data;
  j["config"] = to_json(r.config);
  j["seeds"] = seeds_json(r.seeds);
  j["untargeted"] = to_json(r.untargeted);
  ordered_json targets = ordered_json::array();
  for (const auto& t : r.targets) {
    ordered_json tj;
    tj["target"] = t.target;
    tj["support"] = t.support;
    tj["support_zero"] = t.support_zero;
    ordered_json reps = ordered_json::array();
    for (const auto& tr : t.repeats) {
      ordered_json rj;
      rj["repeat"] = tr.repeat;
      rj["acc_unattacked"] = tr.acc_unattacked;
      rj["acc_attacked"] = tr.acc_attacked;
      rj["sr_global"] = tr.sr_global;
      rj["class_acc_unattacked"] = opt_json(tr.class_acc_unattacked);
      rj["class_acc_attacked"] = opt_json(tr.class_acc_attacked);
      rj["sr_class"] = opt_json(tr.sr_class);
      rj["hit_rate_unattacked"] = tr.hit_rate_unattacked;
      rj["hit_rate_attacked"] = tr.hit_rate_attacked;
      rj["mean_target_prob_unattacked"] = tr.mean_target_prob_unattacked;
      rj["mean_target_prob_attacked"] = tr.mean_target_prob_attacked;
      reps.push_back(std::move(rj));
    }
    tj["repeats"] = std::move(reps);
    tj["sr_global"] = to_json(t.sr_global);
    tj["sr_class"] = t.sr_class ? to_json(*t.sr_class) : ordered_json(nullptr);
    tj["hit_rate_attacked"] = to_json(t.hit_rate_attacked);
    tj["mean_target_prob_attacked"] = to_json(t.mean_target_prob_attacked);
    targets.push_back(std::move(tj));
  }
  j["targets"] = std::move(targets);
  return j;
}

ordered_json to_json(const EvalReport& r) {
  ordered_json j;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["weighted_f1"] = r.weighted_f1;
  ordered_json cls = ordered_json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const ClassStats& s = r.per_class[c];
    ordered_json cj;
    cj["class"] = c;
    cj["precision"] = s.precision;
    cj["recall"] = s.recall;
    cj["f1"] = s.f1;
    cj["support"] = s.support;
    cls.push_back(std::move(cj));
  }
  j["per_class"] = std::move(cls);
  return j;
}

std::string report_csv(const RunReport& r) {
  std::ostringstream out;
  out << "repeat,seed,acc_unattacked,acc_attacked,sr,macro_f1_unattacked,macro_f1_attacked,"
         "weighted_f1_unattacked,weighted_f1_attacked\n";
  for (const auto& m : r.repeats)
    out << m.repeat << ',' << m.seed << ',' << num(m.acc_unattacked) << ',' << num(m.acc_attacked) << ','
        << num(m.sr) << ',' << num(m.macro_f1_unattacked) << ',' << num(m.macro_f1_attacked) << ','
        << num(m.weighted_f1_unattacked) << ',' << num(m.weighted_f1_attacked) << '\n';
  out << "mean,," << num(r.acc_unattacked.mean) << ',' << num(r.acc_attacked.mean) << ',' << num(r.sr.mean)
      << ",," << num(r.macro_f1_attacked.mean) << ",," << num(r.weighted_f1_attacked.mean) << '\n';
  out << "std,," << num(r.acc_unattacked.std) << ',' << num(r.acc_attacked.std) << ',' << num(r.sr.std) << ",,"
      << num(r.macro_f1_attacked.std) << ",," << num(r.weighted_f1_attacked.std) << '\n';
  return out.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  if (points.empty()) return out.str();
  for (const auto& [name, v] : points.front().values) out << name << ',';
  out << "sr_mean,sr_std\n";
  for (const auto& p : points) {
    for (const auto& [name, v] : p.values) out << num(v) << ',';
    out << num(p.report.sr.mean) << ',' << num(p.report.sr.std) << '\n';
  }
  return out.str();
}

std::string targeted_csv(const TargetedReport& r) {
  std::ostringstream out;
  out << "target,support,support_zero,untargeted_sr_mean,untargeted_sr_std,sr_global_mean,sr_global_std,"
         "sr_class_mean,sr_class_std,hit_rate_attacked_mean,mean_target_prob_attacked\n";
  for (const auto& t : r.targets) {
    out << t.target << ',' << t.support << ',' << (t.support_zero ? "true" : "false") << ','
        << num(r.untargeted.sr.mean) << ',' << num(r.untargeted.sr.std) << ',' << num(t.sr_global.mean) << ','
        << num(t.sr_global.std) << ',' << opt_num(t.sr_class ? std::optional(t.sr_class->mean) : std::nullopt)
        << ',' << opt_num(t.sr_class ? std::optional(t.sr_class->std) : std::nullopt) << ','
        << num(t.hit_rate_attacked.mean) << ',' << num(t.mean_target_prob_attacked.mean) << '\n';
  }
  return out.str();
}

std::string eval_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "class,precision,recall,f1,support\n";
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const ClassStats& s = r.per_class[c];
    out << c << ',' << num(s.precision) << ',' << num(s.recall) << ',' << num(s.f1) << ',' << s.support << '\n';
  }
  return out.str();
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace igaff
