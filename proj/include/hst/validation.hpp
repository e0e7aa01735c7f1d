#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace hst {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // signed distance to the bound, positive = pass side
  bool pass = false;
};

struct ValidationReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  nlohmann::json to_json() const;
  std::string to_text() const;  // one line per check
};

/// Runs every checkable invariant of the named suite
/// ("gauss_special" | "estimators" | "inequalities") under a fixed seed.
/// Failures are report content, never exceptions.
ValidationReport run_validation_suite(const std::string& suite, std::uint64_t seed);

}  // namespace hst
