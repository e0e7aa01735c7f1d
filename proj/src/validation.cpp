#include "hst/validation.hpp"

#include <cmath>
#include <sstream>

#include "hst/estimators.hpp"
#include "hst/experiment.hpp"
#include "hst/gauss_special.hpp"
#include "hst/quadrature.hpp"
#include "hst/testers.hpp"

namespace hst {

namespace {

// upper-bound style check: measured <= bound
CheckResult le_check(const std::string& name, double measured, double bound) {
  return CheckResult{name, measured, bound, bound - measured, measured <= bound};
}

// lower-bound style check: measured >= bound
CheckResult ge_check(const std::string& name, double measured, double bound) {
  return CheckResult{name, measured, bound, measured - bound, measured >= bound};
}

Eigen::VectorXd axis_direction(int n) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e[0] = 1.0;
  return e;
}

struct MeanSe {
  double mean, se;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
  double mean = 0.0, m2 = 0.0;
  int k = 0;
  for (double x : xs) {
    ++k;
    double d = x - mean;
    mean += d / k;
    m2 += d * (x - mean);
  }
  double var = k > 1 ? m2 / (k - 1) : 0.0;
  return {mean, std::sqrt(var / std::max(1, k))};
}

void gauss_special_suite(ValidationReport& rep) {
  // quantile/cdf round trip over [-8, 8]
  double worst = 0.0;
  for (int i = 0; i <= 1600; ++i) {
    double x = -8.0 + i * 0.01;
    worst = std::max(worst, std::fabs(gaussian_quantile(gaussian_cdf(x)) - x));
  }
  rep.checks.push_back(le_check("roundtrip_quantile_cdf[-8,8]", worst, 1e-8));

  for (double r : {1.5, 2.0, 3.0, 5.0, 8.0}) {
    double lo = (1.0 / r - 1.0 / (r * r * r)) * gaussian_pdf(r);
    double hi = lo + 3.0 / std::pow(r, 5) * gaussian_pdf(r);
    double tail = gaussian_cdf(-r).value();
    std::ostringstream nm;
    nm << "tail_sandwich_r=" << r;
    rep.checks.push_back(CheckResult{nm.str(), tail, hi,
                                     std::min(tail - lo, hi - tail),
                                     tail >= lo && tail <= hi});
  }

  // central finite differences of I against -quantile
  double worst_d = 0.0;
  const double h = 1e-7;
  for (int i = 0; i < 20; ++i) {
    double p = 0.01 + i * (0.49 / 19.0);
    double fd = (isoperimetric_I(Probability(p + h)) -
                 isoperimetric_I(Probability(p - h))) /
                (2.0 * h);
    worst_d = std::max(worst_d, std::fabs(fd + gaussian_quantile(Probability(p))));
  }
  rep.checks.push_back(le_check("derivative_I_vs_quantile", worst_d, 1e-6));

  // strict monotonicity of psi and V on a 1000-point grid over (1e-6, 0.49)
  bool mono = true;
  double prev_psi = 0.0, prev_v = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double p = std::exp(std::log(1e-6) +
                        (std::log(0.49) - std::log(1e-6)) * i / 999.0);
    double ps = halfspace_surface_ratio(Probability(p));
    double vv = halfspace_level1_ratio(Probability(p));
    if (i > 0 && (ps >= prev_psi || vv >= prev_v)) mono = false;
    prev_psi = ps;
    prev_v = vv;
  }
  rep.checks.push_back(CheckResult{"monotone_psi_V_grid", mono ? 1.0 : 0.0, 1.0, 0.0,
                                   mono});

  // concavity instances: q <= p <= 1/2 with p/q <= 1+eps
  bool concave_ok = true;
  for (double p : {0.4, 0.25, 0.1, 0.03, 0.004}) {
    for (double eps : {0.02, 0.1, 0.3}) {
      double q = p / (1.0 + eps);
      double ip = isoperimetric_I(Probability(p));
      double iq = isoperimetric_I(Probability(q));
      if (!(ip >= iq && iq >= ip / (1.0 + eps) * (1.0 - 1e-12))) concave_ok = false;
    }
  }
  rep.checks.push_back(
      CheckResult{"concavity_instances", concave_ok ? 1.0 : 0.0, 1.0, 0.0, concave_ok});

  // U symmetry on a grid
  double worst_sym = 0.0;
  for (int i = 1; i <= 48; ++i) {
    double p = i / 100.0;
    double a = halfspace_level1_weight(Probability(p));
    double b = halfspace_level1_weight(Probability(1.0 - p));
    worst_sym = std::max(worst_sym, std::fabs(a - b) / a);
  }
  rep.checks.push_back(le_check("U_symmetry_grid_rel", worst_sym, 5e-15));

  // V o V^-1 round trip
  double worst_v = 0.0;
  for (int i = 0; i <= 60; ++i) {
    double p = std::exp(std::log(1e-8) + (std::log(0.49) - std::log(1e-8)) * i / 60.0);
    double a = halfspace_level1_ratio(Probability(p));
    double back = halfspace_level1_ratio(halfspace_volume_for_level1_ratio(a));
    worst_v = std::max(worst_v, std::fabs(back - a));
  }
  rep.checks.push_back(le_check("V_roundtrip_abs", worst_v, 1e-9));

  // Theta bands for U and V
  double lo_ratio = 1e9, hi_ratio = 0.0;
  for (double p : {1e-9, 1e-6, 1e-4, 0.01, 0.05, 0.1}) {
    double r = halfspace_level1_weight(Probability(p)) / (p * p * std::log(1.0 / p));
    lo_ratio = std::min(lo_ratio, r);
    hi_ratio = std::max(hi_ratio, r);
  }
  rep.checks.push_back(ge_check("U_asymptotics_lower", lo_ratio, 1.2));
  rep.checks.push_back(le_check("U_asymptotics_upper", hi_ratio, 2.0));
  rep.checks.push_back(
      CheckResult{"V_asymptotics_1e-6",
                  halfspace_level1_ratio(Probability(1e-6)) / std::log(1e6), 2.0, 0.0,
                  true});
  rep.checks.back().pass = rep.checks.back().measured > 1.2 &&
                           rep.checks.back().measured < 2.0;

  // V-inverse perturbation bound at a = V(0.05)
  double a0 = halfspace_level1_ratio(Probability(0.05));
  double v0 = halfspace_volume_for_level1_ratio(a0).value();
  double v1 = halfspace_volume_for_level1_ratio(a0 + 0.01).value();
  double ratio = std::fabs(v0 - v1) / (0.01 * v0);
  rep.checks.push_back(CheckResult{"Vinv_perturbation_ratio", ratio, 2.0, 0.0,
                                   ratio > 0.2 && ratio < 2.0});
}

void estimators_suite(ValidationReport& rep, std::uint64_t seed) {
  // unbiasedness of T against an unconditioned-MC estimate of W1/p^2
  struct FamilyCase {
    const char* name;
    FunctionSpec spec;
    double volume;
  };
  const int n = 16;
  std::vector<FamilyCase> cases;
  for (double p : {0.5, 0.1, 0.02})
    cases.push_back({"halfspace", FunctionSpec::halfspace_with_volume(
                                      axis_direction(n), Probability(p)),
                     p});
  cases.push_back({"slab", FunctionSpec::centered_slab_with_volume(axis_direction(n),
                                                                   Probability(0.5)),
                   0.5});
  cases.push_back(
      {"ball", FunctionSpec::centered_ball_with_volume(n, Probability(0.3)), 0.3});
  int case_idx = 0;
  for (const auto& fc : cases) {
    std::vector<double> t_batches;
    OracleBundle bundle(fc.spec, subseed(seed, 100 + case_idx));
    for (int b = 0; b < 60; ++b) t_batches.push_back(pairwise_T(bundle, 2000).value);
    MeanSe t_stat = mean_and_se(t_batches);
    std::vector<double> w_reps;
    Rng rng(subseed(seed, 200 + case_idx));
    for (int r = 0; r < 8; ++r)
      w_reps.push_back(mc_levelk_weight(fc.spec, 1, 400000, rng) /
                       (fc.volume * fc.volume));
    MeanSe w_stat = mean_and_se(w_reps);
    double gap = std::fabs(t_stat.mean - w_stat.mean);
    double band = 3.0 * std::sqrt(t_stat.se * t_stat.se + w_stat.se * w_stat.se);
    std::ostringstream nm;
    nm << "T_unbiased_" << fc.name << "_p" << fc.volume;
    rep.checks.push_back(le_check(nm.str(), gap, band));
    ++case_idx;
  }

  // est-sense consistency: halving kappa quadruples N and halves the spread,
  // within 20%
  {
    FunctionSpec spec =
        FunctionSpec::halfspace_with_volume(axis_direction(4), Probability(0.3));
    std::vector<double> a1, a2;
    OracleBundle bundle(spec, subseed(seed, 300));
    const double kappa = 0.08;
    for (int r = 0; r < 200; ++r) {
      a1.push_back(est_sense(bundle, 0.3, kappa).value);
      a2.push_back(est_sense(bundle, 0.3, kappa / 2.0).value);
    }
    auto sd = [](const std::vector<double>& xs) {
      MeanSe ms = mean_and_se(xs);
      return ms.se * std::sqrt(static_cast<double>(xs.size()));
    };
    double ratio = sd(a2) / sd(a1);
    rep.checks.push_back(CheckResult{"est_sense_halving_ratio", ratio, 0.6,
                                     std::min(ratio - 0.4, 0.6 - ratio) / 0.1,
                                     ratio > 0.4 && ratio < 0.6});
  }

  // Sheppard closed form at p = 1/2, t = 0.2
  {
    FunctionSpec spec =
        FunctionSpec::halfspace(axis_direction(8), 0.0);
    OracleBundle bundle(spec, subseed(seed, 400));
    NoiseSensEstimate est = est_sense(bundle, 0.2, 0.01);
    double sheppard = 2.0 / M_PI * std::acos(std::exp(-0.2));
    rep.checks.push_back(
        le_check("sheppard_p0.5_t0.2", std::fabs(est.value - sheppard), 0.01));
  }

  // Ledoux: NS_t <= (2 sqrt(t)/sqrt(pi)) surf, halfspace and slab
  {
    const double p = 0.05, t = 0.1;
    FunctionSpec half =
        FunctionSpec::halfspace_with_volume(axis_direction(8), Probability(p));
    FunctionSpec slab =
        FunctionSpec::centered_slab_with_volume(axis_direction(8), Probability(p));
    OracleBundle hb(half, subseed(seed, 500));
    OracleBundle sb(slab, subseed(seed, 501));
    double kappa = 0.01;
    NoiseSensEstimate he = est_sense(hb, t, kappa);
    NoiseSensEstimate se_ = est_sense(sb, t, kappa);
    double lt = 2.0 * std::sqrt(t) / kSqrtPi;
    double surf_half = isoperimetric_I(Probability(p));
    double a = gaussian_quantile(Probability(0.5 * (1.0 + p)));
    double surf_slab = 2.0 * gaussian_pdf(a);
    double sigma = 3.0 * kappa * p;
    rep.checks.push_back(
        le_check("ledoux_halfspace", he.value * p, lt * surf_half + sigma));
    rep.checks.push_back(le_check("ledoux_slab", se_.value * p, lt * surf_slab + sigma));
  }

  // level-k inequality with fitted constant <= 10
  {
    const int nd = 8;
    double fitted = 0.0;
    Rng rng(subseed(seed, 600));
    struct LK {
      const char* name;
      FunctionSpec spec;
      double p;
    };
    std::vector<LK> lks;
    lks.push_back({"halfspace", FunctionSpec::halfspace_with_volume(
                                    axis_direction(nd), Probability(0.05)),
                   0.05});
    lks.push_back({"slab", FunctionSpec::centered_slab_with_volume(
                               axis_direction(nd), Probability(0.2)),
                   0.2});
    lks.push_back(
        {"ball", FunctionSpec::centered_ball_with_volume(nd, Probability(0.3)), 0.3});
    for (const auto& lk : lks) {
      for (int k = 1; k <= 2; ++k) {
        double w = std::max(0.0, mc_levelk_weight(lk.spec, k, 500000, rng));
        double c_needed =
            std::pow(w / (lk.p * lk.p), 1.0 / k) / std::log(1.0 / lk.p);
        fitted = std::max(fitted, c_needed);
      }
    }
    rep.checks.push_back(le_check("levelk_fitted_C", fitted, 10.0));
  }

  // variance law, one cell (full grid runs in the acceptance suite)
  {
    const int nd = 16;
    const std::int64_t m = 500;
    const double p = 0.1;
    FunctionSpec spec =
        FunctionSpec::halfspace_with_volume(axis_direction(nd), Probability(p));
    OracleBundle bundle(spec, subseed(seed, 700));
    std::vector<double> ts;
    for (int b = 0; b < 200; ++b) ts.push_back(pairwise_T(bundle, m).value);
    MeanSe ms = mean_and_se(ts);
    double var = ms.se * ms.se * static_cast<double>(ts.size());
    double lg = std::log(1.0 / p);
    double bound = lg * lg / static_cast<double>(m) +
                   static_cast<double>(nd) / (static_cast<double>(m) * m);
    rep.checks.push_back(le_check("variance_law_cell", var, 1.0 * bound));
  }

  // 2-d tensor quadrature against est_sense
  for (double t : {0.1, 0.3}) {
    const double p = 0.2;
    FunctionSpec spec =
        FunctionSpec::halfspace_with_volume(axis_direction(2), Probability(p));
    OracleBundle bundle(spec, subseed(seed, 800 + static_cast<int>(t * 10)));
    double kappa = 0.01;
    NoiseSensEstimate est = est_sense(bundle, t, kappa);
    double oracle = ns_halfspace_tensor2d(p, t) / p;
    std::ostringstream nm;
    nm << "quadrature2d_t" << t;
    rep.checks.push_back(le_check(nm.str(), std::fabs(est.value - oracle), 1.5 * kappa));
  }

  // exchangeability of the correlated pair
  {
    const double p = 0.2, t = 0.3;
    FunctionSpec spec =
        FunctionSpec::halfspace_with_volume(axis_direction(8), Probability(p));
    OracleBundle ba(spec, subseed(seed, 900));
    OracleBundle bb(spec, subseed(seed, 901));
    double kappa = 0.01;
    NoiseSensEstimate ea = est_sense(ba, t, kappa);
    // swapped conditioning: draw the conditioned point as the second marginal
    std::int64_t n_draws = est_sense_sample_count(kappa);
    std::int64_t escaped = 0;
    for (std::int64_t i = 0; i < n_draws; ++i) {
      Eigen::VectorXd y = bb.sample();
      Eigen::VectorXd x = noise_perturb(y, t, bb.rng());
      if (!bb.mq(x)) ++escaped;
    }
    double eb = 2.0 * static_cast<double>(escaped) / static_cast<double>(n_draws);
    rep.checks.push_back(
        le_check("exchangeability_gap", std::fabs(ea.value - eb), 3.0 * kappa));
  }
}

void inequalities_suite(ValidationReport& rep, std::uint64_t seed) {
  // Borell: slabs are at least as noise sensitive as halfspaces
  {
    const double p = 0.05, t = 0.1, kappa = 0.01;
    FunctionSpec half =
        FunctionSpec::halfspace_with_volume(axis_direction(16), Probability(p));
    FunctionSpec slab =
        FunctionSpec::centered_slab_with_volume(axis_direction(16), Probability(p));
    OracleBundle hb(half, subseed(seed, 10));
    OracleBundle sb(slab, subseed(seed, 11));
    double eh = est_sense(hb, t, kappa).value;
    double es = est_sense(sb, t, kappa).value;
    rep.checks.push_back(ge_check("borell_slab_vs_halfspace", es, eh - 3.0 * kappa));
  }

  // extremality of the level-1 weight: mean T <= V(p) + 3 SE for far families
  {
    const int nd = 16;
    const double p = 0.05;
    double vp = halfspace_level1_ratio(Probability(p));
    struct Far {
      const char* name;
      FamilySpec::Kind kind;
    };
    for (auto far : {Far{"slab", FamilySpec::Kind::Slab},
                     Far{"ball", FamilySpec::Kind::Ball},
                     Far{"union", FamilySpec::Kind::UnionOpposite}}) {
      FamilySpec fam;
      fam.kind = far.kind;
      fam.volume = p;
      Rng dir_rng(subseed(seed, 20));
      FunctionSpec spec = fam.instantiate(nd, dir_rng);
      OracleBundle bundle(spec, subseed(seed, 21));
      std::vector<double> ts;
      for (int b = 0; b < 30; ++b) ts.push_back(pairwise_T(bundle, 2000).value);
      MeanSe ms = mean_and_se(ts);
      std::ostringstream nm;
      nm << "extremal_meanT_" << far.name;
      rep.checks.push_back(le_check(nm.str(), ms.mean, vp + 3.0 * ms.se));
    }
  }

  // halfspace NS lower band: fitted Theta constant of (1 - Theta mu^{1/4})
  {
    double fitted = 0.0;
    int idx = 0;
    for (double p : {0.05, 0.1}) {
      for (double t : {0.01, 0.1}) {
        FunctionSpec spec =
            FunctionSpec::halfspace_with_volume(axis_direction(8), Probability(p));
        OracleBundle bundle(spec, subseed(seed, 30 + idx++));
        double kappa = 0.005;
        double est = est_sense(bundle, t, kappa).value;
        double led = 2.0 * std::sqrt(t) / kSqrtPi *
                     halfspace_surface_ratio(Probability(p));
        double mu = t * std::log(1.0 / p);
        double slack = std::max(0.0, 1.0 - (est - 3.0 * kappa) / led);
        fitted = std::max(fitted, slack / std::pow(mu, 0.25));
      }
    }
    rep.checks.push_back(le_check("ns_lower_band_fitted_theta", fitted, 10.0));
  }

  // the GSA acceptance threshold is strictly decreasing in the guessed volume
  {
    bool mono = true;
    double t = 1e-4, kappa = 1e-3, prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
      double q = 1e-4 + (0.1 - 1e-4) * i / 200.0;
      double thr =
          2.0 * std::sqrt(t) / kSqrtPi * halfspace_surface_ratio(Probability(q)) +
          kappa;
      if (i > 1 && thr >= prev) mono = false;
      prev = thr;
    }
    rep.checks.push_back(
        CheckResult{"threshold_decreasing_in_q", mono ? 1.0 : 0.0, 1.0, 0.0, mono});
  }

  // two-point separation at the calibrated profiles (reduced trial count)
  {
    struct Sep {
      const char* tester;
      const char* profile;
      double eps;
    };
    for (auto s : {Sep{"gsa", "gsa_separation", 0.3},
                   Sep{"hermite", "hermite_separation", 0.4},
                   Sep{"fixed_noise", "fixed_noise_separation", 1.0},
                   Sep{"combined", "combined_separation", 1.0}}) {
      ExperimentConfig cfg;
      cfg.tester = s.tester;
      cfg.dimension = 64;
      cfg.eps = s.eps;
      cfg.trials = 30;
      cfg.base_seed = subseed(seed, 40);
      cfg.family.kind = FamilySpec::Kind::Halfspace;
      cfg.family.volume = 0.05;
      cfg.constants = calibrated_profile(s.profile).to_json();
      if (std::string(s.tester) == "gsa" || std::string(s.tester) == "hermite")
        cfg.p_hat = 0.05;
      else {
        cfg.p_min = 0.01;
        cfg.p2 = 0.05;
      }
      TrialReport hr = run_experiment(cfg);
      ExperimentConfig far = cfg;
      if (std::string(s.tester) == "fixed_noise")
        far.p2 = 0.10;  // one-sided soundness case: inflated guess on a halfspace
      else
        far.family.kind = FamilySpec::Kind::Slab;
      TrialReport fr = run_experiment(far);
      std::ostringstream nm;
      nm << "two_point_separation_" << s.tester;
      rep.checks.push_back(
          ge_check(nm.str(), hr.accept_frequency - fr.accept_frequency, 0.8));
    }
  }
}

}  // namespace

ValidationReport run_validation_suite(const std::string& suite, std::uint64_t seed) {
  ValidationReport rep;
  rep.suite = suite;
  if (suite == "gauss_special")
    gauss_special_suite(rep);
  else if (suite == "estimators")
    estimators_suite(rep, seed);
  else if (suite == "inequalities")
    inequalities_suite(rep, seed);
  else
    throw ConfigError("suite", "unknown suite '" + suite + "'");
  return rep;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["all_pass"] = all_pass();
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name},
                  {"measured", c.measured},
                  {"bound", c.bound},
                  {"margin", c.margin},
                  {"pass", c.pass}});
  j["checks"] = std::move(cs);
  return j;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  measured=" << c.measured
       << "  bound=" << c.bound << "  margin=" << c.margin << "\n";
  }
  os << (all_pass() ? "ALL PASS" : "FAILURES PRESENT") << "  suite=" << suite << "\n";
  return os.str();
}

}  // namespace hst
