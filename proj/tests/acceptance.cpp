// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Run all criteria (default) or a single one with --criterion N.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kmcl/continuum.hpp"
#include "kmcl/dynamics.hpp"
#include "kmcl/experiments.hpp"
#include "kmcl/frequencies.hpp"
#include "kmcl/metrics.hpp"
#include "kmcl/numerics.hpp"
#include "kmcl/rng.hpp"

using namespace kmcl;
using namespace kmcl::experiments;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// --- criterion 1: threshold and C-curve ------------------------------------

Check criterion1() {
  Check c;
  const double threshold = 2.0 / kPi;
  c.require(!solve_C_linear(threshold - 1e-9).has_value(),
            "C must not exist at 2/pi - 1e-9");
  const auto at = solve_C_linear(threshold);
  c.require(at.has_value() && std::abs(*at - kPi / 4) < 1e-9,
            "C(2/pi) must equal pi/4 within 1e-9");
  const auto c1 = solve_C_linear(1.0);
  c.require(c1.has_value() && std::abs(*c1 - 0.952) < 1e-3,
            "C(1) must equal 0.952 within 1e-3");
  double prev = 0.0;
  bool increasing = true;
  double last = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double kappa =
        threshold + (20.0 - threshold) * static_cast<double>(k) / 199.0;
    const auto v = solve_C_linear(kappa);
    if (!v || *v <= prev) {
      increasing = false;
      break;
    }
    prev = *v;
    last = *v;
  }
  c.require(increasing, "C must be strictly increasing on the 200-point grid");
  c.require(last > 0.999, "C(20) must exceed 0.999");
  return c;
}

// --- criterion 2: general solver cross-validation ---------------------------

Check criterion2() {
  Check c;
  const double threshold = 2.0 / kPi;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double kappa =
        threshold + (20.0 - threshold) * static_cast<double>(k) / 199.0;
    const SelfConsistencyProblem prob(FrequencyFunction::linear(1.0), 1.0,
                                      kappa);
    const auto general = solve_C_general(prob);
    const auto linear = solve_C_linear(kappa);
    if (!general.C || !linear) {
      c.require(false, "solver returned none at kappa=" + fmt(kappa));
      return c;
    }
    worst = std::max(worst, std::abs(*general.C - *linear));
  }
  c.require(worst < 1e-10,
            "max |C_general - C_linear| = " + fmt(worst) + " (need < 1e-10)");
  c.detail << "max deviation " << worst;
  return c;
}

// --- criterion 3: bifurcation diagram ---------------------------------------

Check criterion3() {
  Check c;
  BifurcateParams bp;
  for (int k = 0; k <= 13; ++k) bp.coupling_grid.push_back(0.7 + 0.1 * k);
  bp.base.graph_case = GraphCase::kComplete;
  bp.base.n = 1000;
  bp.base.a = 1.0;
  bp.base.p = 1.0;
  bp.base.freq_mode = FreqMode::kEquallyPlaced;
  bp.base.seed = 1;
  bp.base.t_end = 200.0;
  const auto out = run_bifurcate(bp);
  double worst = 0.0;
  for (const auto& row : out.rows) {
    c.require(row.locked, "K=" + fmt(row.coupling) + " must lock");
    if (row.locked && row.delta_u_sim && row.delta_u_pred) {
      worst = std::max(worst, std::abs(*row.delta_u_sim - *row.delta_u_pred));
    }
  }
  c.require(worst < 0.05,
            "max |du_sim - du_pred| = " + fmt(worst) + " (need < 0.05)");

  SimulateParams drift = bp.base;
  drift.coupling = 0.64;
  drift.t_end = 200.0;
  const auto low = run_simulate(drift);
  c.require(!low.locked, "K=0.64 must classify as drifting");
  c.detail << "max |du_sim - du_pred| " << fmt(worst);
  return c;
}

// --- criterion 4: steady-state profiles -------------------------------------

Check criterion4() {
  Check c;
  // Case (i): complete graph, i.i.d. uniform frequencies.
  SimulateParams ci;
  ci.graph_case = GraphCase::kComplete;
  ci.n = 1000;
  ci.coupling = 1.0;
  ci.a = 1.0;
  ci.p = 1.0;
  ci.freq_mode = FreqMode::kIidUniform;
  ci.seed = 1;
  ci.t_end = 100.0;
  const auto sim_i = run_simulate(ci);
  c.require(sim_i.aligned_distance && *sim_i.aligned_distance < 0.05,
            "case (i) aligned distance " +
                fmt(sim_i.aligned_distance.value_or(-1.0)) + " (need < 0.05)");
  c.require(sim_i.C && std::abs(sim_i.order_parameter_r - *sim_i.C) < 0.01,
            "case (i) |r - C| " +
                fmt(std::abs(sim_i.order_parameter_r -
                             sim_i.C.value_or(0.0))) +
                " (need < 0.01)");

  // Case (ii): random dense, p = 0.5, K = 2; 9 of 10 seeds under 0.1.
  int pass_count = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimulateParams cii;
    cii.graph_case = GraphCase::kRandomDense;
    cii.n = 1000;
    cii.coupling = 2.0;
    cii.a = 1.0;
    cii.p = 0.5;
    cii.freq_mode = FreqMode::kIidUniform;
    cii.seed = seed;
    cii.t_end = 100.0;
    const auto sim = run_simulate(cii);
    if (sim.aligned_distance && *sim.aligned_distance < 0.1) ++pass_count;
  }
  c.require(pass_count >= 9, "case (ii): only " + std::to_string(pass_count) +
                                 "/10 seeds under 0.1");

  // Case (iii): sparse, gamma = 0.3; medians must improve from n=1000 to
  // n=4000 over 5 seeds.
  auto sparse_median = [&](std::size_t n) {
    std::vector<double> ds;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SimulateParams ciii;
      ciii.graph_case = GraphCase::kRandomSparse;
      ciii.n = n;
      ciii.coupling = 1.0;
      ciii.a = 1.0;
      ciii.p = 1.0;
      ciii.gamma = 0.3;
      ciii.freq_mode = FreqMode::kIidUniform;
      ciii.seed = seed;
      ciii.t_end = 100.0;
      const auto sim = run_simulate(ciii);
      ds.push_back(sim.aligned_distance.value_or(1e9));
    }
    return median(ds);
  };
  const double med_small = sparse_median(1000);
  const double med_large = sparse_median(4000);
  c.require(med_large < med_small,
            "case (iii) medians " + fmt(med_small) + " -> " + fmt(med_large) +
                " must decrease");
  c.detail << "case(i) dist " << fmt(*sim_i.aligned_distance) << ", case(ii) "
           << pass_count << "/10, case(iii) " << fmt(med_small) << " -> "
           << fmt(med_large);
  return c;
}

// --- criterion 5: convergence to the continuum limit ------------------------

Check criterion5() {
  Check c;
  ConvergenceParams det;
  det.n_grid = {100, 400, 1600};
  det.graph_case = GraphCase::kComplete;
  det.freq_mode = FreqMode::kEquallyPlaced;
  det.seeds = {1};
  det.t_end = 10.0;
  det.m_ref = 8192;
  const auto out_det = run_convergence(det);
  bool det_dec = out_det.medians[0].second > out_det.medians[1].second &&
                 out_det.medians[1].second > out_det.medians[2].second;
  c.require(det_dec, "deterministic distances must decrease strictly");

  ConvergenceParams rnd = det;
  rnd.graph_case = GraphCase::kRandomDense;
  rnd.p = 0.5;
  rnd.coupling = 2.0;
  rnd.freq_mode = FreqMode::kIidUniform;
  rnd.seeds.clear();
  for (std::uint64_t s = 1; s <= 10; ++s) rnd.seeds.push_back(s);
  const auto out_rnd = run_convergence(rnd);
  bool rnd_dec = out_rnd.medians[0].second > out_rnd.medians[1].second &&
                 out_rnd.medians[1].second > out_rnd.medians[2].second;
  c.require(rnd_dec, "random dense medians must decrease strictly");

  ConvergenceParams sp = rnd;
  sp.graph_case = GraphCase::kRandomSparse;
  sp.p = 1.0;
  sp.coupling = 1.0;
  sp.gamma = 0.3;
  const auto out_sp = run_convergence(sp);
  bool sp_dec = out_sp.medians[0].second > out_sp.medians[1].second &&
                out_sp.medians[1].second > out_sp.medians[2].second;
  c.require(sp_dec, "random sparse medians must decrease strictly");

  c.detail << "det " << fmt(out_det.medians[0].second) << "/"
           << fmt(out_det.medians[1].second) << "/"
           << fmt(out_det.medians[2].second) << ", dense "
           << fmt(out_rnd.medians[0].second) << "/"
           << fmt(out_rnd.medians[1].second) << "/"
           << fmt(out_rnd.medians[2].second) << ", sparse "
           << fmt(out_sp.medians[0].second) << "/"
           << fmt(out_sp.medians[1].second) << "/"
           << fmt(out_sp.medians[2].second);
  return c;
}

// --- criterion 6: permutation deviation --------------------------------------

Check criterion6() {
  Check c;
  PermutationParams pp;
  pp.n_grid = {100, 1000, 10000};
  pp.a = 1.0;
  pp.seed_count = 20;
  pp.seed = 1;
  const auto out = run_permutation(pp);
  c.require(out.rows[0].median > out.rows[1].median &&
                out.rows[1].median > out.rows[2].median,
            "medians must decrease strictly");
  c.require(out.rows[2].median < 0.05,
            "median at n=10^4 is " + fmt(out.rows[2].median) +
                " (need < 0.05)");
  c.detail << "medians " << fmt(out.rows[0].median) << " -> "
           << fmt(out.rows[1].median) << " -> " << fmt(out.rows[2].median);
  return c;
}

// --- criterion 7: stability and instability of the families ------------------

Check criterion7() {
  Check c;
  InstabilityParams flipped;
  flipped.family = StationaryFamily::kContinuousFlipped;
  flipped.delta = 1e-3;
  flipped.epsilon = 0.5;
  flipped.m = 2048;
  flipped.t_max = 200.0;
  const auto out_f = run_instability(flipped);
  c.require(out_f.verdict == "escaped-and-converged",
            "flipped family verdict " + out_f.verdict);
  c.require(out_f.terminal_stable_distance < 0.05,
            "flipped terminal distance " + fmt(out_f.terminal_stable_distance));

  InstabilityParams disc = flipped;
  disc.family = StationaryFamily::kDiscontinuous;
  disc.flips = {{0.6, 0.7}};
  const auto out_d = run_instability(disc);
  c.require(out_d.verdict == "escaped-and-converged",
            "discontinuous family verdict " + out_d.verdict);
  c.require(out_d.terminal_stable_distance < 0.05,
            "discontinuous terminal distance " +
                fmt(out_d.terminal_stable_distance));

  InstabilityParams stable = flipped;
  stable.family = StationaryFamily::kContinuousStable;
  const auto out_s = run_instability(stable);
  c.require(out_s.verdict == "no-escape",
            "stable family verdict " + out_s.verdict);
  c.detail << "escape times: flipped "
           << fmt(out_f.escape_time.value_or(-1.0)) << ", discontinuous "
           << fmt(out_d.escape_time.value_or(-1.0));
  return c;
}

// --- criterion 8: numerical kernel identities --------------------------------

Check criterion8() {
  Check c;
  // Mean-field fast path against the brute-force per-edge evaluation.
  {
    auto w = std::make_shared<WeightMatrix>(
        build_deterministic_dense(Graphon::uniform(0.7), 500));
    std::vector<double> om(500);
    for (std::size_t i = 0; i < om.size(); ++i) {
      om[i] = stream(3, i).next_unit() - 0.5;
    }
    const KMSystem sys(w, om, 1.9);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      std::vector<double> u(500);
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = (2.0 * stream(900 + s, i).next_unit() - 1.0) * kPi;
      }
      const auto fast = rhs_meanfield(sys, u);
      const double gain = sys.edge_gain();
      for (std::size_t i = 0; i < u.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
          acc += 0.7 * std::sin(u[j] - u[i]);
        }
        worst = std::max(worst, std::abs(fast[i] - (om[i] + gain * acc)));
      }
    }
    c.require(worst < 1e-12,
              "mean-field max deviation " + fmt(worst) + " (need < 1e-12)");
  }
  // rk4 order check (drifting two-oscillator problem).
  {
    auto w = std::make_shared<WeightMatrix>(
        build_deterministic_dense(Graphon::uniform(1.0), 2));
    const KMSystem sys(w, {-0.25, 0.25}, 0.3);
    IntegratorConfig ref_cfg;
    ref_cfg.rtol = 1e-12;
    ref_cfg.atol = 1e-12;
    ref_cfg.sample_stride = 0.0;
    const auto ref = integrate(sys, {0.0, {0.4, -0.2}}, 10.0, ref_cfg);
    auto rk4_err = [&](double h) {
      IntegratorConfig cfg;
      cfg.method = IntegrationMethod::kRk4Fixed;
      cfg.rk4_step = h;
      cfg.sample_stride = 0.0;
      const auto t = integrate(sys, {0.0, {0.4, -0.2}}, 10.0, cfg);
      double m = 0.0;
      for (std::size_t i = 0; i < 2; ++i) {
        m = std::max(m, std::abs(t.final.u[i] - ref.final.u[i]));
      }
      return m;
    };
    const double ratio = rk4_err(0.1) / rk4_err(0.05);
    c.require(ratio > 12.0 && ratio < 20.0,
              "rk4 Richardson ratio " + fmt(ratio) + " (need ~16)");
  }
  // Two-oscillator lock at arcsin(2 omega0 / K).
  {
    auto w = std::make_shared<WeightMatrix>(
        build_deterministic_dense(Graphon::uniform(1.0), 2));
    const KMSystem sys(w, {-0.25, 0.25}, 1.0);
    IntegratorConfig cfg;
    cfg.sample_stride = 0.0;
    const auto traj = integrate(sys, {0.0, {0.3, -0.8}}, 100.0, cfg);
    const double phi = wrap_pi(traj.final.u[1] - traj.final.u[0]);
    c.require(std::abs(phi - std::asin(0.5)) < 1e-6,
              "two-oscillator lock error " + fmt(std::abs(phi - kPi / 6)));
  }
  // Translation invariance and symmetric mean drift.
  {
    auto w = std::make_shared<WeightMatrix>(
        sample_random_dense(Graphon::uniform(0.5), 200, 17));
    std::vector<double> om(200);
    for (std::size_t i = 0; i < om.size(); ++i) {
      om[i] = stream(5, i).next_unit() - 0.5;
    }
    const KMSystem sys(w, om, 2.0);
    double worst_shift = 0.0, worst_drift = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      std::vector<double> u(200), v(200);
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = (2.0 * stream(700 + s, i).next_unit() - 1.0) * kPi;
        v[i] = u[i] + 1.37;
      }
      const auto du = rhs(sys, u);
      const auto dv = rhs(sys, v);
      double mean_du = 0.0, mean_om = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        worst_shift = std::max(worst_shift, std::abs(du[i] - dv[i]));
        mean_du += du[i];
        mean_om += om[i];
      }
      worst_drift = std::max(worst_drift,
                             std::abs(mean_du - mean_om) / 200.0);
    }
    c.require(worst_shift < 1e-12,
              "translation invariance " + fmt(worst_shift));
    c.require(worst_drift < 1e-12, "symmetric mean drift " + fmt(worst_drift));
  }
  return c;
}

struct Criterion {
  int id;
  const char* label;
  Check (*fn)();
};

const Criterion kCriteria[] = {
    {1, "threshold and C-curve", criterion1},
    {2, "self-consistency cross-validation", criterion2},
    {3, "bifurcation diagram (case i)", criterion3},
    {4, "steady-state profiles (cases i-iii)", criterion4},
    {5, "convergence to the continuum limit", criterion5},
    {6, "permutation deviation", criterion6},
    {7, "stability and instability of families", criterion7},
    {8, "numerical kernel identities", criterion8},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
    }
  }
  int failures = 0;
  for (const auto& crit : kCriteria) {
    if (only != 0 && crit.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = crit.fn();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::cout << (result.ok ? "[PASS]" : "[FAIL]") << " criterion " << crit.id
              << ": " << crit.label;
    const std::string detail = result.detail.str();
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << " [" << fmt(secs) << " s]" << std::endl;
    if (!result.ok) ++failures;
  }
  return failures;
}
