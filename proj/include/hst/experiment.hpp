#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hst/function_spec.hpp"
#include "hst/rng.hpp"
#include "hst/testers.hpp"

namespace hst {

/// Target family for a trial batch: either a fixed FunctionSpec or a
/// parametric family instantiated per trial (fresh random unit direction,
/// threshold/width/radius chosen for the requested Gaussian volume).
struct FamilySpec {
  enum class Kind { Fixed, Halfspace, Slab, Ball, UnionOpposite };
  Kind kind = Kind::Halfspace;
  double volume = 0.05;
  std::optional<FunctionSpec> fixed;

  FunctionSpec instantiate(int dimension, Rng& rng) const;
  nlohmann::json to_json() const;
  static FamilySpec from_json(const nlohmann::json& j);
  static const char* kind_name(Kind k);
};

struct ExperimentConfig {
  std::string tester = "hermite";  // gsa | hermite | fixed_noise | combined
  FamilySpec family;
  int dimension = 64;
  double eps = 0.3;
  std::optional<double> p_hat;  // gsa, hermite (defaults to family volume)
  std::optional<double> p_min;  // fixed_noise, combined (defaults to 0.01)
  std::optional<double> p2;     // fixed_noise (defaults to family volume)
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::optional<double> m_scale;     // overrides the schedule's m_scale
  nlohmann::json constants;          // partial ConstantSchedule overrides
  std::string output_path;           // directory for report.json / trials.csv
  int jobs = 1;
  std::int64_t max_samples_per_trial = 2'000'000'000;

  void validate() const;  // throws ConfigError naming the offending field
  ConstantSchedule schedule() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct TrialRecord {
  int index = 0;
  std::uint64_t seed = 0;
  bool completed = false;
  Verdict verdict;        // valid when completed
  std::string error;      // error type/message when not completed
  double wall_ms = 0.0;
};

struct TrialReport {
  std::vector<TrialRecord> trials;
  int accept_count = 0;
  double accept_frequency = 0.0;
  double wilson_low = 0.0, wilson_high = 0.0;  // 95% interval
  double statistic_mean = 0.0, statistic_variance = 0.0;
  std::uint64_t total_samples = 0, total_queries = 0;
  double wall_clock_ms = 0.0;
  std::string timestamp;  // excluded from determinism comparisons
  nlohmann::json config_echo;
  std::string defaults_version;

  nlohmann::json to_json() const;
  static TrialReport from_json(const nlohmann::json& j);
  std::string to_csv() const;  // header row + one row per trial
};

/// Runs `trials` independent seeded tester runs; per-trial failures are
/// recorded, never abort the batch. Writes report.json and trials.csv under
/// output_path when set.
TrialReport run_experiment(const ExperimentConfig& config);

/// Wilson 95% score interval for k successes out of n.
std::pair<double, double> wilson_interval(int k, int n);

struct SweepCell {
  int dimension;
  double volume;
  double eps;
  std::uint64_t samples = 0, queries = 0;  // realized per-trial counts (halfspace run)
  double accept_freq_halfspace = 0.0;
  double accept_freq_far = 0.0;
};

struct SweepConfig {
  ExperimentConfig base;
  std::vector<int> dimensions;
  std::vector<double> volumes;
  std::vector<double> eps_grid;
  FamilySpec::Kind far_family = FamilySpec::Kind::Slab;

  static SweepConfig from_json(const nlohmann::json& j);
};

/// One TrialReport pair (halfspace / far family) per grid cell; returns the
/// merged rows and optionally writes sweep.csv plus per-cell reports.
std::vector<SweepCell> sweep(const SweepConfig& config);
std::string sweep_csv(const std::vector<SweepCell>& cells, const std::string& tester);

/// Named practical-mode profiles produced by the calibration sweep (shipped
/// in defaults/constants_v1.json).
ConstantSchedule calibrated_profile(const std::string& name);

struct CalibrationRow {
  std::string tester;
  double m_scale_multiplier;
  double separation;  // accept_freq_halfspace - accept_freq_far
  double accept_half, accept_far;
  std::uint64_t samples_per_trial;
};

/// Grid sweep around the shipped profile maximizing two-point separation at
/// n = 64, p = 0.05; reproducible for a fixed seed.
std::vector<CalibrationRow> calibrate(const std::string& tester, int trials,
                                      std::uint64_t seed);

}  // namespace hst
