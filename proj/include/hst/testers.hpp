#pragma once

#include <cstdint>
#include <json.hpp>
#include <map>
#include <string>

#include "hst/estimators.hpp"
#include "hst/oracle_bundle.hpp"
#include "hst/probability.hpp"

namespace hst {

/// Every symbolic "sufficiently small/large" constant of the four testers,
/// plus the practical-mode sample-count multiplier m_scale. The shipped
/// defaults (version 1) were fixed by the scripted calibration sweep; the
/// ordering gate c3 <= c2_fnt/10 <= c1_fnt/100 <= c_star/1000 is enforced
/// whenever a schedule is loaded.
struct ConstantSchedule {
  double c1_gsa = 0.05;      // zeta = c1_gsa eps^2 / log^2(1/p_hat)
  double c2_noise = 0.05;    // t = c2_noise eps^10 / log^10(1/p_lb)
  double c3_xi_doc = 0.0005; // xi of the soundness analysis; documented, never executed
  double c2_eta = 0.05;      // eta = c2_eta eps^2 / log(1/p), accuracy promise on p_hat
  double c_accept = 0.05;    // acceptance band |T - tau| <= c_accept eps^2
  double c1_fnt = 0.05;      // fixed-noise t = c1_fnt eps^8 / log^5(1/p_min)
  double c2_fnt = 0.005;     // fixed-noise kappa = c2_fnt eps^6 / log^3(1/p_min)
  double c_star = 0.5;       // combined-test case-2 slack
  double m_scale = 1.0;      // practical-mode multiplier on sample counts
  double k_hoeffding = 16.0; // est_sense N = ceil(k m_scale / kappa^2)
  std::string version = "1";

  void validate() const;
  nlohmann::json to_json() const;
  /// Partial overrides applied on top of the defaults; validates the result.
  static ConstantSchedule from_json(const nlohmann::json& j);
};

enum class Decision { Accept, Reject };

/// Outcome of one tester run: the realized statistic, the threshold it was
/// compared against, resource counts, and every realized schedule parameter.
/// Bit-reproducible from the bundle seed.
struct Verdict {
  Decision decision;
  double statistic;
  double threshold;
  std::uint64_t mq_used = 0;
  std::uint64_t samp_used = 0;
  std::map<std::string, double> params;
  std::string reason;  // set on reasoned rejects (combined-test range failures)

  bool accepted() const { return decision == Decision::Accept; }
  nlohmann::json to_json() const;
  static Verdict from_json(const nlohmann::json& j);
};

// Realized parameter schedules, exposed so resource accounting can be
// verified as pure arithmetic in (n, p, eps, m_scale).

struct GsaSchedule {
  double zeta, p_lb, t, kappa;
  std::int64_t n_pairs;  // est_sense draws this many sample/query pairs
};
GsaSchedule gsa_schedule(double eps, double p_hat, const ConstantSchedule& consts);

std::int64_t hermite_schedule_m(int dimension, double eps, double p_hat,
                                const ConstantSchedule& consts);

struct FixedNoiseSchedule {
  double t, kappa;
  std::int64_t n_pairs;
};
FixedNoiseSchedule fixed_noise_schedule(double eps, double p_min,
                                        const ConstantSchedule& consts);

std::int64_t combined_schedule_m(int dimension, double eps, double p_min,
                                 const ConstantSchedule& consts);

/// Surface-area tester: estimates the normalized noise sensitivity at the
/// schedule's noise rate and accepts iff it is at most the halfspace bound
/// (2 sqrt(t)/sqrt(pi)) psi(p_lb) + kappa. Requires p_hat <= 0.1.
Verdict gsa_test(OracleBundle& bundle, double eps, const Probability& p_hat,
                 const ConstantSchedule& consts);

/// Sample-based tester: compares the pairwise statistic T against
/// tau = V(p_hat) with acceptance band c_accept eps^2. Uses no MQ calls.
Verdict hermite_test(OracleBundle& bundle, double eps, const Probability& p_hat,
                     const ConstantSchedule& consts);

/// Fixed-noise variant with one-sided guarantees: sound when the guess p2 is
/// (essentially) at least the true volume. Requires 0 < p2 <= 0.1.
Verdict gsa_fixed_noise_test(OracleBundle& bundle, double eps, const Probability& p2,
                             const Probability& p_min, const ConstantSchedule& consts);

/// Unknown-volume tester: recovers p2 by inverting the level-1 ratio on the
/// pairwise statistic, then delegates to gsa_fixed_noise_test. Out-of-range
/// statistics become reasoned rejects (reason VolumeAboveGate or
/// VolumeBelowFloor) instead of clamped inversions.
Verdict combined_test(OracleBundle& bundle, double eps, const Probability& p_min,
                      const ConstantSchedule& consts);

/// Hook for the standard-model testers that handle p > 0.1. Out of scope;
/// always throws NotImplementedError.
Verdict standard_model_fallback(OracleBundle& bundle, double eps);

}  // namespace hst
