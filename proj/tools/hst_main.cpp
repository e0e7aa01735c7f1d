#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "hst/errors.hpp"
#include "hst/experiment.hpp"
#include "hst/validation.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hst::ConfigError("config", "cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return j;
}

void apply_overrides(hst::ExperimentConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<int>& trials, const std::string& out,
                     const std::optional<double>& m_scale, const std::optional<int>& jobs) {
  if (seed) cfg.base_seed = *seed;
  if (trials) cfg.trials = *trials;
  if (!out.empty()) cfg.output_path = out;
  if (m_scale) cfg.m_scale = *m_scale;
  if (jobs) cfg.jobs = *jobs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo toolkit for relative-error halfspace testing over "
               "the standard Gaussian measure"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite = "all", tester = "hermite";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, jobs;
  std::optional<double> m_scale;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "base seed (64-bit)");
    sub->add_option("--trials", trials, "number of trials");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--m-scale", m_scale, "practical-mode sample multiplier");
    sub->add_option("--jobs", jobs, "worker threads (0 = hardware)");
  };

  CLI::App* run = app.add_subcommand("run", "run a seeded trial batch");
  run->add_option("--config", config_path, "ExperimentConfig JSON")->required();
  add_common(run);

  CLI::App* validate = app.add_subcommand("validate", "run a validation suite");
  validate->add_option("suite", suite,
                       "gauss_special | estimators | inequalities | all");
  validate->add_option("--seed", seed, "suite seed");
  validate->add_option("--out", out_dir, "output directory");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "grid sweep with merged CSV");
  sweep_cmd->add_option("--config", config_path, "SweepConfig JSON")->required();
  add_common(sweep_cmd);

  CLI::App* cal = app.add_subcommand("calibrate", "separation sweep around a profile");
  cal->add_option("--tester", tester, "gsa | hermite | fixed_noise | combined");
  cal->add_option("--trials", trials, "trials per grid point (default 20)");
  cal->add_option("--seed", seed, "sweep seed");
  cal->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      hst::ExperimentConfig cfg = hst::ExperimentConfig::from_json(load_json(config_path));
      apply_overrides(cfg, seed, trials, out_dir, m_scale, jobs);
      hst::TrialReport report = hst::run_experiment(cfg);
      std::cout << "tester=" << cfg.tester << " trials=" << cfg.trials
                << " accept_frequency=" << report.accept_frequency << " wilson95=["
                << report.wilson_low << ", " << report.wilson_high << "]"
                << " samples=" << report.total_samples
                << " queries=" << report.total_queries << "\n";
      if (cfg.output_path.empty()) std::cout << report.to_json().dump(2) << "\n";
      return 0;
    }
    if (*validate) {
      std::vector<std::string> suites;
      if (suite == "all")
        suites = {"gauss_special", "estimators", "inequalities"};
      else
        suites = {suite};
      bool ok = true;
      for (const auto& s : suites) {
        hst::ValidationReport rep = hst::run_validation_suite(s, seed.value_or(12345));
        std::cout << rep.to_text();
        ok = ok && rep.all_pass();
        if (!out_dir.empty()) {
          std::filesystem::create_directories(out_dir);
          std::ofstream f(out_dir + "/validation_" + s + ".json");
          f << rep.to_json().dump(2) << "\n";
        }
      }
      return ok ? 0 : 1;
    }
    if (*sweep_cmd) {
      hst::SweepConfig cfg = hst::SweepConfig::from_json(load_json(config_path));
      apply_overrides(cfg.base, seed, trials, out_dir, m_scale, jobs);
      auto cells = hst::sweep(cfg);
      std::cout << hst::sweep_csv(cells, cfg.base.tester);
      return 0;
    }
    if (*cal) {
      auto rows = hst::calibrate(tester, trials.value_or(20), seed.value_or(777));
      nlohmann::json j = nlohmann::json::array();
      std::cout << "tester,m_scale_multiplier,accept_half,accept_far,separation,"
                   "samples_per_trial\n";
      for (const auto& r : rows) {
        std::cout << r.tester << "," << r.m_scale_multiplier << "," << r.accept_half
                  << "," << r.accept_far << "," << r.separation << ","
                  << r.samples_per_trial << "\n";
        j.push_back({{"tester", r.tester},
                     {"m_scale_multiplier", r.m_scale_multiplier},
                     {"accept_half", r.accept_half},
                     {"accept_far", r.accept_far},
                     {"separation", r.separation},
                     {"samples_per_trial", r.samples_per_trial}});
      }
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream f(out_dir + "/calibration.json");
        f << j.dump(2) << "\n";
      }
      return 0;
    }
  } catch (const hst::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
