#include "hst/testers.hpp"

#include <cmath>

#include "hst/errors.hpp"
#include "hst/gauss_special.hpp"

namespace hst {

namespace {

constexpr double kUnderflowFloor = 1e-300;

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ContractError("eps must lie in (0, 1]");
}

std::int64_t ceil_to_count(double x, const char* what) {
  double n = std::ceil(x);
  if (!(n >= 2.0)) n = 2.0;
  if (n > 4.0e18)
    throw DegenerateParameters(std::string(what) +
                               ": sample schedule is not runnable at this scale");
  return static_cast<std::int64_t>(n);
}

}  // namespace

void ConstantSchedule::validate() const {
  const double all[] = {c1_gsa, c2_noise, c3_xi_doc, c2_eta,      c_accept,
                        c1_fnt, c2_fnt,   c_star,    k_hoeffding, m_scale};
  for (double c : all)
    if (!(c > 0.0) || !std::isfinite(c))
      throw ConfigError("constants", "all constants must be strictly positive");
  // c3 << c2 << c1 << c*, read as each at most 1/10 of the next
  const double slack = 1.0 + 1e-9;
  if (c3_xi_doc * 10.0 > c2_fnt * slack)
    throw ConfigError("constants", "ordering gate: c3_xi_doc must be <= c2_fnt/10");
  if (c2_fnt * 10.0 > c1_fnt * slack)
    throw ConfigError("constants", "ordering gate: c2_fnt must be <= c1_fnt/10");
  if (c1_fnt * 10.0 > c_star * slack)
    throw ConfigError("constants", "ordering gate: c1_fnt must be <= c_star/10");
}

nlohmann::json ConstantSchedule::to_json() const {
  return nlohmann::json{{"c1_gsa", c1_gsa},
                        {"c2_noise", c2_noise},
                        {"c3_xi_doc", c3_xi_doc},
                        {"c2_eta", c2_eta},
                        {"c_accept", c_accept},
                        {"c1_fnt", c1_fnt},
                        {"c2_fnt", c2_fnt},
                        {"c_star", c_star},
                        {"m_scale", m_scale},
                        {"k_hoeffding", k_hoeffding},
                        {"version", version}};
}

ConstantSchedule ConstantSchedule::from_json(const nlohmann::json& j) {
  ConstantSchedule c;
  auto get = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = j.at(key).get<double>();
  };
  get("c1_gsa", c.c1_gsa);
  get("c2_noise", c.c2_noise);
  get("c3_xi_doc", c.c3_xi_doc);
  get("c2_eta", c.c2_eta);
  get("c_accept", c.c_accept);
  get("c1_fnt", c.c1_fnt);
  get("c2_fnt", c.c2_fnt);
  get("c_star", c.c_star);
  get("m_scale", c.m_scale);
  get("k_hoeffding", c.k_hoeffding);
  if (j.contains("version")) c.version = j.at("version").get<std::string>();
  c.validate();
  return c;
}

nlohmann::json Verdict::to_json() const {
  nlohmann::json j;
  j["decision"] = decision == Decision::Accept ? "accept" : "reject";
  j["statistic"] = statistic;
  j["threshold"] = threshold;
  j["mq_used"] = mq_used;
  j["samp_used"] = samp_used;
  j["params"] = params;
  if (!reason.empty()) j["reason"] = reason;
  return j;
}

Verdict Verdict::from_json(const nlohmann::json& j) {
  Verdict v;
  v.decision = j.at("decision").get<std::string>() == "accept" ? Decision::Accept
                                                               : Decision::Reject;
  v.statistic = j.at("statistic").get<double>();
  v.threshold = j.at("threshold").get<double>();
  v.mq_used = j.at("mq_used").get<std::uint64_t>();
  v.samp_used = j.at("samp_used").get<std::uint64_t>();
  v.params = j.at("params").get<std::map<std::string, double>>();
  if (j.contains("reason")) v.reason = j.at("reason").get<std::string>();
  return v;
}

GsaSchedule gsa_schedule(double eps, double p_hat, const ConstantSchedule& consts) {
  check_eps(eps);
  double log_p = std::log(1.0 / p_hat);
  // zeta and the rest of the schedule are computed from p_hat, the only
  // volume the algorithm possesses; the (1+zeta) accuracy promise makes the
  // substitution for the true p a constant-factor matter
  double zeta = consts.c1_gsa * eps * eps / (log_p * log_p);
  double p_lb = p_hat / (1.0 + zeta);
  double log_plb = std::log(1.0 / p_lb);
  double t = consts.c2_noise * std::pow(eps, 10) / std::pow(log_plb, 10);
  double kappa = zeta * std::sqrt(t) * detail::isoperimetric_raw(p_lb) /
                 (2.0 * kSqrtPi * p_lb);
  GsaSchedule s{zeta, p_lb, t, kappa, 0};
  if (t < kUnderflowFloor || kappa < kUnderflowFloor)
    throw DegenerateParameters("gsa_test: t or kappa underflowed the schedule");
  s.n_pairs = est_sense_sample_count(kappa, {consts.k_hoeffding, consts.m_scale});
  return s;
}

std::int64_t hermite_schedule_m(int dimension, double eps, double p_hat,
                                const ConstantSchedule& consts) {
  check_eps(eps);
  double log_p = std::log(1.0 / p_hat);
  double raw = std::sqrt(static_cast<double>(dimension)) / (eps * eps) +
               log_p * log_p / std::pow(eps, 4);
  return ceil_to_count(consts.m_scale * raw, "hermite_test");
}

FixedNoiseSchedule fixed_noise_schedule(double eps, double p_min,
                                        const ConstantSchedule& consts) {
  check_eps(eps);
  double log_p = std::log(1.0 / p_min);
  double t = consts.c1_fnt * std::pow(eps, 8) / std::pow(log_p, 5);
  double kappa = consts.c2_fnt * std::pow(eps, 6) / std::pow(log_p, 3);
  if (t < kUnderflowFloor || kappa < kUnderflowFloor)
    throw DegenerateParameters("gsa_fixed_noise_test: t or kappa underflowed");
  // est_sense runs to +-kappa/2
  std::int64_t n =
      est_sense_sample_count(0.5 * kappa, {consts.k_hoeffding, consts.m_scale});
  return FixedNoiseSchedule{t, kappa, n};
}

std::int64_t combined_schedule_m(int dimension, double eps, double p_min,
                                 const ConstantSchedule& consts) {
  check_eps(eps);
  double log_p = std::log(1.0 / p_min);
  double raw = std::sqrt(static_cast<double>(dimension) * log_p) / (eps * eps) +
               log_p * log_p / std::pow(eps, 4);
  return ceil_to_count(consts.m_scale * raw, "combined_test");
}

Verdict gsa_test(OracleBundle& bundle, double eps, const Probability& p_hat,
                 const ConstantSchedule& consts) {
  consts.validate();
  if (p_hat.value() > 0.1)
    throw VolumeOutOfRange("gsa_test requires p_hat <= 0.1 (standard-model fallback)");
  GsaSchedule sch = gsa_schedule(eps, p_hat.value(), consts);
  std::uint64_t mq0 = bundle.mq_count(), samp0 = bundle.samp_count();
  NoiseSensEstimate est =
      est_sense(bundle, sch.t, sch.kappa, {consts.k_hoeffding, consts.m_scale});
  double threshold = 2.0 * std::sqrt(sch.t) / kSqrtPi *
                         detail::surface_ratio_raw(sch.p_lb) +
                     sch.kappa;
  Verdict v;
  v.decision = est.value <= threshold ? Decision::Accept : Decision::Reject;
  v.statistic = est.value;
  v.threshold = threshold;
  v.mq_used = bundle.mq_count() - mq0;
  v.samp_used = bundle.samp_count() - samp0;
  v.params = {{"zeta", sch.zeta},
              {"p_lb", sch.p_lb},
              {"t", sch.t},
              {"kappa", sch.kappa},
              {"n_pairs", static_cast<double>(sch.n_pairs)},
              {"eps", eps},
              {"p_hat", p_hat.value()}};
  return v;
}

Verdict hermite_test(OracleBundle& bundle, double eps, const Probability& p_hat,
                     const ConstantSchedule& consts) {
  consts.validate();
  if (p_hat.value() > 0.1)
    throw VolumeOutOfRange("hermite_test requires p_hat <= 0.1");
  std::int64_t m = hermite_schedule_m(bundle.spec().dimension(), eps, p_hat.value(),
                                      consts);
  std::uint64_t mq0 = bundle.mq_count(), samp0 = bundle.samp_count();
  PairwiseStatistic stat = pairwise_T(bundle, m);
  double tau = halfspace_level1_ratio(p_hat);
  double threshold = consts.c_accept * eps * eps;
  Verdict v;
  v.decision =
      std::fabs(stat.value - tau) <= threshold ? Decision::Accept : Decision::Reject;
  v.statistic = stat.value;
  v.threshold = threshold;
  v.mq_used = bundle.mq_count() - mq0;
  v.samp_used = bundle.samp_count() - samp0;
  v.params = {{"m", static_cast<double>(m)},
              {"tau", tau},
              {"eps", eps},
              {"p_hat", p_hat.value()}};
  return v;
}

Verdict gsa_fixed_noise_test(OracleBundle& bundle, double eps, const Probability& p2,
                             const Probability& p_min, const ConstantSchedule& consts) {
  consts.validate();
  check_eps(eps);
  if (p2.value() > 0.1)
    throw ContractError("gsa_fixed_noise_test requires 0 < p2 <= 0.1");
  if (p_min.value() > 0.1)
    throw ContractError("gsa_fixed_noise_test requires p_min <= 0.1");
  FixedNoiseSchedule sch = fixed_noise_schedule(eps, p_min.value(), consts);
  std::uint64_t mq0 = bundle.mq_count(), samp0 = bundle.samp_count();
  NoiseSensEstimate est = est_sense(bundle, sch.t, 0.5 * sch.kappa,
                                    {consts.k_hoeffding, consts.m_scale});
  double threshold =
      2.0 * std::sqrt(sch.t) / kSqrtPi * halfspace_surface_ratio(p2) + sch.kappa;
  Verdict v;
  v.decision = est.value <= threshold ? Decision::Accept : Decision::Reject;
  v.statistic = est.value;
  v.threshold = threshold;
  v.mq_used = bundle.mq_count() - mq0;
  v.samp_used = bundle.samp_count() - samp0;
  v.params = {{"t", sch.t},
              {"kappa", sch.kappa},
              {"n_pairs", static_cast<double>(sch.n_pairs)},
              {"eps", eps},
              {"p2", p2.value()},
              {"p_min", p_min.value()}};
  return v;
}

Verdict combined_test(OracleBundle& bundle, double eps, const Probability& p_min,
                      const ConstantSchedule& consts) {
  consts.validate();
  check_eps(eps);
  if (p_min.value() > 0.1)
    throw ContractError("combined_test requires p_min <= 0.1");
  std::int64_t m = combined_schedule_m(bundle.spec().dimension(), eps, p_min.value(),
                                       consts);
  std::uint64_t mq0 = bundle.mq_count(), samp0 = bundle.samp_count();
  PairwiseStatistic stat = pairwise_T(bundle, m);

  auto reasoned_reject = [&](const std::string& reason, double threshold) {
    Verdict v;
    v.decision = Decision::Reject;
    v.statistic = stat.value;
    v.threshold = threshold;
    v.mq_used = bundle.mq_count() - mq0;
    v.samp_used = bundle.samp_count() - samp0;
    v.params = {{"m", static_cast<double>(m)},
                {"T", stat.value},
                {"eps", eps},
                {"p_min", p_min.value()}};
    v.reason = reason;
    return v;
  };

  // invert the level-1 ratio over [p_min, 0.5]; out-of-range statistics are
  // reasoned rejects, since an in-promise halfspace lands in range with
  // overwhelming probability at the scheduled m
  Probability p2(0.5);
  try {
    p2 = halfspace_volume_for_level1_ratio(stat.value, p_min.value());
  } catch (const OutOfRangeLow&) {
    return reasoned_reject("VolumeAboveGate",
                           detail::level1_ratio_raw(0.5));
  } catch (const OutOfRangeHigh&) {
    return reasoned_reject("VolumeBelowFloor",
                           detail::level1_ratio_raw(p_min.value()));
  }
  if (p2.value() > 0.1)
    return reasoned_reject("VolumeAboveGate", detail::level1_ratio_raw(0.1));

  Verdict v = gsa_fixed_noise_test(bundle, eps, p2, p_min, consts);
  v.mq_used = bundle.mq_count() - mq0;
  v.samp_used = bundle.samp_count() - samp0;
  v.params["p2"] = p2.value();
  v.params["m"] = static_cast<double>(m);
  v.params["T"] = stat.value;
  return v;
}

Verdict standard_model_fallback(OracleBundle&, double) {
  throw NotImplementedError(
      "standard-model fallback testers for p > 0.1 are cited black boxes");
}

}  // namespace hst
