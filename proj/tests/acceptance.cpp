// Acceptance suite: one pass/fail line per criterion, each run at its stated
// tolerance and wall-clock budget. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hst/estimators.hpp"
#include "hst/experiment.hpp"
#include "hst/gauss_special.hpp"
#include "hst/quadrature.hpp"
#include "hst/testers.hpp"

using namespace hst;

namespace {

int g_failures = 0;

Eigen::VectorXd e1(int n) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[0] = 1.0;
  return v;
}

struct MeanVar {
  double mean, var, se;
};

MeanVar mean_var(const std::vector<double>& xs) {
  double mean = 0.0, m2 = 0.0;
  int k = 0;
  for (double x : xs) {
    ++k;
    double d = x - mean;
    mean += d / k;
    m2 += d * (x - mean);
  }
  double var = k > 1 ? m2 / (k - 1) : 0.0;
  return {mean, var, std::sqrt(var / k)};
}

void run_criterion(int id, const std::string& name, double budget_s,
                   const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream detail;
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << " exception: " << e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_budget = secs < budget_s;
  bool pass = ok && in_budget;
  if (!pass) ++g_failures;
  std::printf("%s criterion %d: %s (%.1fs / budget %.0fs)%s\n",
              pass ? "PASS" : "FAIL", id, name.c_str(), secs, budget_s,
              detail.str().c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------

bool criterion1(std::ostringstream& out) {
  double worst_rt = 0.0;
  for (int i = 0; i <= 1600; ++i) {
    double x = -8.0 + i * 0.01;
    worst_rt = std::max(worst_rt, std::fabs(gaussian_quantile(gaussian_cdf(x)) - x));
  }
  bool rt = worst_rt <= 1e-8;

  bool sandwich = true;
  for (double r : {1.5, 2.0, 3.0, 5.0, 8.0}) {
    double lo = (1.0 / r - 1.0 / (r * r * r)) * gaussian_pdf(r);
    double hi = lo + 3.0 / std::pow(r, 5) * gaussian_pdf(r);
    double tail = gaussian_cdf(-r).value();
    sandwich = sandwich && tail >= lo && tail <= hi;
  }

  double worst_d = 0.0;
  const double h = 1e-7;
  for (int i = 0; i < 20; ++i) {
    double p = 0.01 + i * (0.49 / 19.0);
    double fd =
        (isoperimetric_I(Probability(p + h)) - isoperimetric_I(Probability(p - h))) /
        (2 * h);
    worst_d = std::max(worst_d, std::fabs(fd + gaussian_quantile(Probability(p))));
  }
  bool deriv = worst_d <= 1e-6;

  out << " roundtrip=" << worst_rt << " deriv_err=" << worst_d;
  return rt && sandwich && deriv;
}

bool criterion2(std::ostringstream& out) {
  double u_half = halfspace_level1_weight(Probability(0.5));
  bool u_ok = std::fabs(u_half - 1.0 / (2.0 * M_PI)) <= 1e-12;

  bool sym = true;
  for (int i = 1; i <= 49; ++i) {
    double p = i / 100.0;
    // exact on the grid when the complement is carried exactly
    sym = sym && halfspace_level1_weight(Probability(p)) ==
                     halfspace_level1_weight(Probability::from_upper_tail(p));
    double plain = halfspace_level1_weight(Probability(1.0 - p));
    sym = sym && std::fabs(plain - halfspace_level1_weight(Probability(p))) <=
                     5e-15 * halfspace_level1_weight(Probability(p));
  }

  bool mono = true;
  double prev = 1e300;
  for (int i = 0; i < 1000; ++i) {
    double p =
        std::exp(std::log(1e-6) + (std::log(0.49) - std::log(1e-6)) * i / 999.0);
    double v = halfspace_level1_ratio(Probability(p));
    mono = mono && v < prev;
    prev = v;
  }

  double worst_inv = 0.0;
  for (int i = 0; i <= 80; ++i) {
    double p = std::exp(std::log(1e-8) + (std::log(0.49) - std::log(1e-8)) * i / 80.0);
    double a = halfspace_level1_ratio(Probability(p));
    worst_inv = std::max(
        worst_inv,
        std::fabs(halfspace_level1_ratio(halfspace_volume_for_level1_ratio(a)) - a));
  }
  bool inv = worst_inv <= 1e-9;

  out << " U(1/2)err=" << std::fabs(u_half - 1.0 / (2.0 * M_PI))
      << " Vinv_err=" << worst_inv;
  return u_ok && sym && mono && inv;
}

bool criterion3(std::ostringstream& out) {
  const int n = 64, batches = 200;
  const std::int64_t m = 5000;
  bool all = true;
  for (double p : {0.5, 0.1, 0.02}) {
    FunctionSpec spec = FunctionSpec::halfspace_with_volume(e1(n), Probability(p));
    OracleBundle bundle(spec, subseed(3000, static_cast<std::uint64_t>(p * 1000)));
    std::vector<double> ts;
    for (int b = 0; b < batches; ++b) ts.push_back(pairwise_T(bundle, m).value);
    MeanVar mv = mean_var(ts);
    double target = halfspace_level1_ratio(Probability(p));
    bool ok = std::fabs(mv.mean - target) <= 3.0 * mv.se;
    out << " p=" << p << ":|dT|=" << std::fabs(mv.mean - target)
        << " 3se=" << 3.0 * mv.se << (ok ? "" : " FAIL");
    all = all && ok;
  }
  return all;
}

bool criterion4(std::ostringstream& out) {
  const double c_var = 1.0;  // fitted during calibration; pinned here
  const int batches = 200;
  double worst_ratio = 0.0;
  for (int n : {16, 64, 256}) {
    for (std::int64_t m : {500, 2000}) {
      for (double p : {0.1, 0.02}) {
        FunctionSpec spec = FunctionSpec::halfspace_with_volume(e1(n), Probability(p));
        OracleBundle bundle(
            spec, subseed(4000, static_cast<std::uint64_t>(n + m + p * 1000)));
        std::vector<double> ts;
        for (int b = 0; b < batches; ++b) ts.push_back(pairwise_T(bundle, m).value);
        MeanVar mv = mean_var(ts);
        double lg = std::log(1.0 / p);
        double bound = lg * lg / static_cast<double>(m) +
                       static_cast<double>(n) / (static_cast<double>(m) * m);
        worst_ratio = std::max(worst_ratio, mv.var / bound);
      }
    }
  }
  out << " worst Var/bound=" << worst_ratio << " (C_var=" << c_var << ")";
  return worst_ratio <= c_var;
}

bool criterion5(std::ostringstream& out) {
  const int n = 16;
  const double p = 0.05;
  double vp = halfspace_level1_ratio(Probability(p));
  bool all = true;

  // extremality of the level-1 weight across far families
  int fam_idx = 0;
  for (auto kind : {FamilySpec::Kind::Slab, FamilySpec::Kind::Ball,
                    FamilySpec::Kind::UnionOpposite}) {
    FamilySpec fam;
    fam.kind = kind;
    fam.volume = p;
    Rng dir_rng(subseed(5000, fam_idx));
    FunctionSpec spec = fam.instantiate(n, dir_rng);
    OracleBundle bundle(spec, subseed(5100, fam_idx));
    std::vector<double> ts;
    for (int b = 0; b < 30; ++b) ts.push_back(pairwise_T(bundle, 2000).value);
    MeanVar mv = mean_var(ts);
    bool ok = mv.mean <= vp + 3.0 * mv.se;
    all = all && ok;
    out << " meanT[" << FamilySpec::kind_name(kind) << "]=" << mv.mean
        << (ok ? "" : " FAIL");
    ++fam_idx;
  }

  // Borell direction: the slab is at least as noise sensitive
  const double t = 0.1, kappa = 0.005;
  FunctionSpec half = FunctionSpec::halfspace_with_volume(e1(n), Probability(p));
  FunctionSpec slab = FunctionSpec::centered_slab_with_volume(e1(n), Probability(p));
  OracleBundle hb(half, subseed(5200, 0));
  OracleBundle sb(slab, subseed(5200, 1));
  NoiseSensEstimate he = est_sense(hb, t, kappa);
  NoiseSensEstimate se = est_sense(sb, t, kappa);
  auto binom_sigma = [](const NoiseSensEstimate& est) {
    double q = est.value / 2.0;
    return 2.0 * std::sqrt(std::max(q * (1.0 - q), 1e-12) /
                           static_cast<double>(est.samples_used));
  };
  double sigma = std::sqrt(std::pow(binom_sigma(he), 2) + std::pow(binom_sigma(se), 2));
  bool borell = se.value >= he.value - 3.0 * sigma;
  out << " slabNS=" << se.value << " halfNS=" << he.value;
  return all && borell;
}

bool criterion6(std::ostringstream& out) {
  bool all = true;
  // tensor-grid quadrature against est_sense in n = 2 at volume 0.2
  const double p = 0.2, kappa = 0.005;
  for (double t : {0.1, 0.3}) {
    FunctionSpec spec = FunctionSpec::halfspace_with_volume(e1(2), Probability(p));
    OracleBundle bundle(spec, subseed(6000, static_cast<std::uint64_t>(t * 10)));
    NoiseSensEstimate est = est_sense(bundle, t, kappa);
    double oracle = ns_halfspace_tensor2d(p, t) / p;
    double q = est.value / 2.0;
    double sigma =
        2.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(est.samples_used));
    bool ok = std::fabs(est.value - oracle) <= 3.0 * sigma;
    all = all && ok;
    out << " t=" << t << ":|d|=" << std::fabs(est.value - oracle)
        << " 3sig=" << 3.0 * sigma << (ok ? "" : " FAIL");
  }
  // Sheppard closed form at p = 1/2
  {
    const double t = 0.2;
    FunctionSpec spec = FunctionSpec::halfspace(e1(2), 0.0);
    OracleBundle bundle(spec, subseed(6000, 99));
    NoiseSensEstimate est = est_sense(bundle, t, kappa);
    double sheppard = 2.0 / M_PI * std::acos(std::exp(-t));
    double q = est.value / 2.0;
    double sigma =
        2.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(est.samples_used));
    bool ok = std::fabs(est.value - sheppard) <= 3.0 * sigma;
    all = all && ok;
    out << " sheppard|d|=" << std::fabs(est.value - sheppard);
  }
  return all;
}

ExperimentConfig separation_config(const std::string& tester, FamilySpec::Kind kind,
                                   const std::string& profile, double eps,
                                   std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.tester = tester;
  cfg.dimension = 64;
  cfg.eps = eps;
  cfg.trials = 100;
  cfg.base_seed = seed;
  cfg.family.kind = kind;
  cfg.family.volume = 0.05;
  cfg.constants = calibrated_profile(profile).to_json();
  return cfg;
}

bool criterion7(std::ostringstream& out) {
  ExperimentConfig half = separation_config(
      "hermite", FamilySpec::Kind::Halfspace, "hermite_separation", 0.4, 424242);
  half.p_hat = 0.05;
  TrialReport hr = run_experiment(half);

  ExperimentConfig ball = half;
  ball.family.kind = FamilySpec::Kind::Ball;
  TrialReport br = run_experiment(ball);

  ExperimentConfig slab = half;
  slab.family.kind = FamilySpec::Kind::Slab;
  TrialReport sr = run_experiment(slab);

  out << " accept_half=" << hr.accept_frequency
      << " reject_ball=" << 1.0 - br.accept_frequency
      << " reject_slab=" << 1.0 - sr.accept_frequency;
  return hr.accept_frequency >= 0.9 && br.accept_frequency <= 0.1 &&
         sr.accept_frequency <= 0.1;
}

bool criterion8(std::ostringstream& out) {
  ExperimentConfig acc =
      separation_config("fixed_noise", FamilySpec::Kind::Halfspace,
                        "fixed_noise_separation", 1.0, 88001);
  acc.p_min = 0.01;
  acc.p2 = 0.05;
  TrialReport ar = run_experiment(acc);

  ExperimentConfig rej = acc;
  rej.base_seed = 88002;
  rej.p2 = 0.10;  // inflated guess: p2 = 2p
  TrialReport rr = run_experiment(rej);

  out << " accept@p2=p " << ar.accept_frequency << " reject@p2=2p "
      << 1.0 - rr.accept_frequency;
  return ar.accept_frequency >= 0.9 && rr.accept_frequency <= 0.1;
}

bool criterion9(std::ostringstream& out) {
  ExperimentConfig half = separation_config(
      "combined", FamilySpec::Kind::Halfspace, "combined_separation", 1.0, 99001);
  half.p_min = 0.01;
  TrialReport hr = run_experiment(half);
  int recovered = 0;
  for (const auto& rec : hr.trials) {
    if (!rec.completed) continue;
    auto it = rec.verdict.params.find("p2");
    if (it != rec.verdict.params.end() && std::fabs(it->second - 0.05) <= 0.005)
      ++recovered;
  }

  ExperimentConfig slab = half;
  slab.family.kind = FamilySpec::Kind::Slab;
  slab.base_seed = 99002;
  TrialReport sr = run_experiment(slab);

  out << " p2_within_10pct=" << recovered
      << "/100 reject_slab=" << 1.0 - sr.accept_frequency;
  return recovered >= 90 && sr.accept_frequency <= 0.1;
}

bool criterion10(std::ostringstream& out) {
  bool all = true;

  // hermite: samples = 2m, zero queries, sqrt(n) scaling of the n-term
  {
    SweepConfig sc;
    sc.base.tester = "hermite";
    sc.base.trials = 2;
    sc.base.base_seed = 101;
    sc.base.family.volume = 0.05;
    sc.base.p_hat = 0.05;
    sc.dimensions = {64, 256, 1024};
    sc.volumes = {0.05};
    sc.eps_grid = {0.4};
    auto cells = sweep(sc);
    double lg = std::log(1.0 / 0.05);
    for (const auto& c : cells) {
      double m = std::ceil(std::sqrt(static_cast<double>(c.dimension)) / (0.4 * 0.4) +
                           lg * lg / std::pow(0.4, 4));
      all = all && c.samples == static_cast<std::uint64_t>(2 * m) && c.queries == 0;
      // the n-dependent part of the schedule is sqrt(n)/eps^2
      double n_term = m - std::ceil(lg * lg / std::pow(0.4, 4));
      double expected = std::sqrt(static_cast<double>(c.dimension)) / (0.4 * 0.4);
      all = all && std::fabs(n_term - expected) / expected <= 0.2;
    }
  }

  // gsa: samples = queries = ceil(K m_scale / kappa^2), increasing in log(1/p)
  {
    ConstantSchedule consts;
    consts.m_scale = 1e-16;
    std::uint64_t prev = 0;
    for (double p : {0.1, 0.05, 0.01}) {
      ExperimentConfig cfg;
      cfg.tester = "gsa";
      cfg.dimension = 8;
      cfg.eps = 0.3;
      cfg.trials = 1;
      cfg.base_seed = 102;
      cfg.family.volume = p;
      cfg.p_hat = p;
      cfg.constants = consts.to_json();
      TrialReport r = run_experiment(cfg);
      const Verdict& v = r.trials[0].verdict;
      double zeta = consts.c1_gsa * 0.09 / std::pow(std::log(1.0 / p), 2);
      double p_lb = p / (1.0 + zeta);
      double t =
          consts.c2_noise * std::pow(0.3, 10) / std::pow(std::log(1.0 / p_lb), 10);
      double kappa = zeta * std::sqrt(t) * isoperimetric_I(Probability(p_lb)) /
                     (2.0 * kSqrtPi * p_lb);
      auto n_pairs = static_cast<std::uint64_t>(
          std::ceil(consts.k_hoeffding * consts.m_scale / (kappa * kappa)));
      all = all && v.samp_used == n_pairs && v.mq_used == n_pairs;
      all = all && n_pairs > prev;  // queries grow with log(1/p)
      prev = n_pairs;
    }
  }

  // fixed-noise: N = ceil(4 K m_scale / kappa^2) pairs
  {
    ConstantSchedule prof = calibrated_profile("fixed_noise_separation");
    ExperimentConfig cfg;
    cfg.tester = "fixed_noise";
    cfg.dimension = 8;
    cfg.eps = 1.0;
    cfg.trials = 1;
    cfg.base_seed = 103;
    cfg.family.volume = 0.05;
    cfg.p2 = 0.05;
    cfg.p_min = 0.01;
    cfg.constants = prof.to_json();
    TrialReport r = run_experiment(cfg);
    double kappa = prof.c2_fnt / std::pow(std::log(100.0), 3);
    auto n_pairs = static_cast<std::uint64_t>(
        std::ceil(prof.k_hoeffding * prof.m_scale / (0.25 * kappa * kappa)));
    all = all && r.trials[0].verdict.samp_used == n_pairs &&
          r.trials[0].verdict.mq_used == n_pairs;
  }

  // combined: SAMP = 2m + N_inner with m growing as sqrt(n log(1/p_min));
  // MQ = N_inner independent of n
  {
    ConstantSchedule prof = calibrated_profile("combined_separation");
    double kappa = prof.c2_fnt / std::pow(std::log(100.0), 3);
    auto n_inner = static_cast<std::uint64_t>(
        std::ceil(prof.k_hoeffding * prof.m_scale / (0.25 * kappa * kappa)));
    double lg = std::log(100.0);
    std::uint64_t mq_prev = 0;
    for (int n : {16, 64}) {
      ExperimentConfig cfg;
      cfg.tester = "combined";
      cfg.dimension = n;
      cfg.eps = 1.0;
      cfg.trials = 1;
      cfg.base_seed = 104;
      cfg.family.volume = 0.05;
      cfg.p_min = 0.01;
      cfg.constants = prof.to_json();
      TrialReport r = run_experiment(cfg);
      const Verdict& v = r.trials[0].verdict;
      auto m = static_cast<std::uint64_t>(
          std::ceil(prof.m_scale * (std::sqrt(static_cast<double>(n) * lg) + lg * lg)));
      all = all && v.samp_used == 2 * m + n_inner;
      all = all && v.mq_used == n_inner;
      if (mq_prev != 0) all = all && v.mq_used == mq_prev;  // n-independent
      mq_prev = v.mq_used;
    }
  }

  out << (all ? " all schedules exact" : " schedule mismatch");
  return all;
}

}  // namespace

int main() {
  run_criterion(1, "numeric kernel round trip, tail sandwich, derivative", 1.0,
                criterion1);
  run_criterion(2, "U/V identities, symmetry, monotonicity, inversion", 1.0,
                criterion2);
  run_criterion(3, "Hermite mean law across p in {0.5, 0.1, 0.02}", 120.0, criterion3);
  run_criterion(4, "pairwise statistic variance law across the grid", 300.0,
                criterion4);
  run_criterion(5, "level-1 extremality and Borell direction", 180.0, criterion5);
  run_criterion(6, "est-sense vs quadrature and Sheppard closed form", 60.0,
                criterion6);
  run_criterion(7, "two-point separation of the sample-based tester", 600.0,
                criterion7);
  run_criterion(8, "one-sided behavior of the fixed-noise tester", 600.0, criterion8);
  run_criterion(9, "combined tester end to end", 900.0, criterion9);
  run_criterion(10, "realized counts match the printed schedules", 60.0, criterion10);
  std::printf("%d/10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
