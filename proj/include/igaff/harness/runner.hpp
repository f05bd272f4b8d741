#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "igaff/attacks/config.hpp"
#include "igaff/attacks/outcome.hpp"
#include "igaff/harness/manifest.hpp"
#include "igaff/metrics/metrics.hpp"
#include "igaff/models/victim.hpp"

namespace igaff {

inline constexpr const char* kEngineVersion = "igaff 0.1.0";

enum class RunMode { kAttack, kSweep, kTargeted, kAugment, kEval };
const char* to_string(RunMode m) noexcept;

/// `builtin:<model.json>` or `remote:<endpoint>`.
struct ModelRef {
  enum class Kind { kBuiltin, kRemote };
  Kind kind = Kind::kBuiltin;
  std::string location;

  /// An empty string falls back to the remote endpoint in the environment.
  static ModelRef parse(const std::string& text);
  std::string str() const;
};

std::unique_ptr<VictimModel> open_model(const ModelRef& ref, std::chrono::milliseconds timeout);

/// One swept knob: iters | pop | p-mut | p-cross | epsilon.
struct SweepAxis {
  std::string param;
  std::vector<double> values;
};

struct RunSpec {
  RunMode mode = RunMode::kAttack;
  AttackConfig attack;
  ModelRef model;
  std::filesystem::path data;
  std::filesystem::path out_dir;
  int repeats = 5;
  int batch_size = 32;
  /// Batches attacked concurrently. Has no effect on results.
  unsigned batch_lanes = 1;
  std::chrono::milliseconds timeout{30000};

  std::vector<SweepAxis> sweep;
  /// Required to sweep more than one parameter.
  bool cross_product = false;
  /// Allows sweep values outside the default ranges.
  bool allow_out_of_range = false;

  std::vector<int> targets;
  /// Augment export format: "igt" or "ppm".
  std::string export_format = "igt";

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

/// A batch failed; the whole run is abandoned and nothing is written.
class RunError : public std::runtime_error {
 public:
  RunError(int repeat, std::size_t batch, const std::string& what)
      : std::runtime_error("repeat " + std::to_string(repeat) + ", batch " + std::to_string(batch) + ": " + what),
        repeat_(repeat),
        batch_(batch) {}
  int repeat() const noexcept { return repeat_; }
  std::size_t batch() const noexcept { return batch_; }

 private:
  int repeat_;
  std::size_t batch_;
};

/// Attack seed of one batch: substream `batch` of the repeat seed.
std::uint64_t batch_seed(std::uint64_t base_seed, int repeat, std::size_t batch) noexcept;

struct RepeatMetrics {
  int repeat = 0;
  std::uint64_t seed = 0;
  double acc_unattacked = 0.0;
  double acc_attacked = 0.0;
  double sr = 0.0;
  double macro_f1_unattacked = 0.0;
  double macro_f1_attacked = 0.0;
  double weighted_f1_unattacked = 0.0;
  double weighted_f1_attacked = 0.0;
  double mean_initial_score = 0.0;  // averaged over batches
  double mean_final_score = 0.0;
};

struct RunReport {
  AttackConfig config;
  std::string model;
  std::string data;
  int batch_size = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<RepeatMetrics> repeats;
  AggregateStat acc_unattacked, acc_attacked, sr, macro_f1_attacked, weighted_f1_attacked;
  std::string engine_version = kEngineVersion;
};

/// Attacks every batch of `data` for each repeat and pools predictions.
RunReport run_attack(const RunSpec& spec, const Dataset& data, const VictimModel& model);

/// Applies one sweep value to a config (iteration/population values must be
/// integral).
void apply_sweep_value(AttackConfig& cfg, const std::string& param, double value);

struct SweepPoint {
  std::vector<std::pair<std::string, double>> values;
  RunReport report;
};

/// One report per grid point, in grid order (row-major over axes when
/// cross_product is set).
std::vector<SweepPoint> run_sweep(const RunSpec& spec, const Dataset& data, const VictimModel& model);

/// Per-target results. Target-relevant accuracy is the recall of class c.
struct TargetRepeat {
  int repeat = 0;
  double acc_unattacked = 0.0;
  double acc_attacked = 0.0;
  double sr_global = 0.0;
  std::optional<double> class_acc_unattacked;  // unset when c has no support
  std::optional<double> class_acc_attacked;
  std::optional<double> sr_class;              // unset when undefined
  double hit_rate_unattacked = 0.0;  // percent predicted as c
  double hit_rate_attacked = 0.0;
  double mean_target_prob_unattacked = 0.0;
  double mean_target_prob_attacked = 0.0;
};

struct TargetReport {
  int target = 0;
  int support = 0;
  bool support_zero = false;
  std::vector<TargetRepeat> repeats;
  AggregateStat sr_global, hit_rate_attacked, mean_target_prob_attacked;
  std::optional<AggregateStat> sr_class;
};

struct TargetedReport {
  AttackConfig config;
  std::string model;
  std::string data;
  std::vector<std::uint64_t> seeds;
  /// Shared untargeted run for contrast.
  RunReport untargeted;
  std::vector<TargetReport> targets;
  std::string engine_version = kEngineVersion;
};

TargetedReport run_targeted(const RunSpec& spec, const Dataset& data, const VictimModel& model);

struct AugmentSummary {
  std::filesystem::path manifest;
  std::size_t originals = 0;
  std::size_t adversarial = 0;
};

/// Attacks each batch once (repeat 0) and writes originals plus adversarial
/// copies into spec.out_dir, which must not exist or be empty.
AugmentSummary run_augment(const RunSpec& spec, const DatasetManifest& manifest, const Dataset& data,
                           const VictimModel& model);

EvalReport run_eval(const Dataset& data, const VictimModel& model, int batch_size);

/// Predictions over the whole dataset in batch_size chunks.
Labels predict_dataset(const Dataset& data, const VictimModel& model, int batch_size);

}  // namespace igaff
