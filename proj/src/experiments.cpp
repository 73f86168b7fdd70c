#include "kmcl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "kmcl/io.hpp"
#include "kmcl/numerics.hpp"
#include "kmcl/rng.hpp"
#include "kmcl/weight_matrix.hpp"

namespace kmcl::experiments {

using nlohmann::json;

std::string to_string(FreqMode m) {
  return m == FreqMode::kEquallyPlaced ? "equally_placed" : "iid_uniform";
}

FreqMode freq_mode_from_string(const std::string& s) {
  if (s == "equally_placed") return FreqMode::kEquallyPlaced;
  if (s == "iid_uniform") return FreqMode::kIidUniform;
  throw std::invalid_argument("unknown frequency mode: " + s);
}

bool all_passed(const std::vector<Predicate>& ps) {
  for (const auto& p : ps) {
    if (!p.passed) return false;
  }
  return true;
}

int thread_count_from_env() {
  if (const char* env = std::getenv("KMCL_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

namespace {

class StageClock {
 public:
  explicit StageClock(Timings& timings) : timings_(timings) { reset(); }
  void reset() { start_ = std::chrono::steady_clock::now(); }
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    timings_[stage] +=
        std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
  }

 private:
  Timings& timings_;
  std::chrono::steady_clock::time_point start_;
};

// Runs fn(0..count-1) on up to `threads` workers; every job writes only its
// own output slot, so scheduling cannot affect results.
void parallel_jobs(std::size_t count, int threads,
                   const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::shared_ptr<const WeightMatrix> graph_for(const SimulateParams& sp) {
  GraphRecipe recipe;
  recipe.kind = sp.graph_case;
  recipe.n = sp.n;
  recipe.p = sp.p;
  recipe.gamma = sp.gamma;
  recipe.seed = sub_seed(sp.seed, SeedDomain::kGraph);
  return std::make_shared<WeightMatrix>(build_graph(recipe));
}

struct Frequencies {
  std::vector<double> omegas;
  std::vector<std::uint32_t> xi;
  std::vector<double> nu;
};

Frequencies build_frequencies(const SimulateParams& sp) {
  Frequencies f;
  if (sp.freq_mode == FreqMode::kEquallyPlaced) {
    f.omegas = discretize(FrequencyFunction::linear(sp.a), sp.n);
    f.nu = f.omegas;
    f.xi.resize(sp.n);
    for (std::size_t i = 0; i < sp.n; ++i) {
      f.xi[i] = static_cast<std::uint32_t>(i);
    }
  } else {
    auto sample = sample_iid(FrequencyDistribution::uniform(sp.a), sp.n,
                             sub_seed(sp.seed, SeedDomain::kFrequency));
    f.omegas = std::move(sample.omegas);
    f.xi = std::move(sample.xi);
    f.nu = std::move(sample.nu);
  }
  return f;
}

std::optional<StationaryProfile> stable_profile(double coupling, double a,
                                                double p) {
  const auto c = solve_C_linear(p * coupling / a);
  if (!c) return std::nullopt;
  return StationaryProfile(
      SelfConsistencyProblem(FrequencyFunction::linear(a), p, coupling), *c,
      StationaryFamily::kContinuousStable, 0.0);
}

double arithmetic_mean_wrapped(const std::vector<double>& u) {
  double acc = 0.0;
  for (double x : u) acc += wrap_pi(x);
  return acc / static_cast<double>(u.size());
}

void write_manifest(const std::filesystem::path& out_dir,
                    const std::string& scenario, const json& params,
                    const Timings& timings,
                    const std::vector<std::string>& outputs) {
  json m;
  m["tool_version"] = kToolVersion;
  m["csv_schema_version"] = kCsvSchemaVersion;
  m["scenario"] = scenario;
  m["params"] = params;
  json t;
  for (const auto& [k, v] : timings) t[k] = v;
  m["timings_ms"] = t;
  m["outputs"] = outputs;
  std::ofstream os(out_dir / "manifest.json");
  os << m.dump(2) << '\n';
}

bool write_summary(const std::filesystem::path& out_dir, json summary,
                   const std::vector<Predicate>& predicates) {
  json preds = json::array();
  json failed = json::array();
  for (const auto& p : predicates) {
    json jp;
    jp["name"] = p.name;
    jp["passed"] = p.passed;
    jp["value"] = p.value;
    jp["threshold"] = p.threshold;
    if (!p.detail.empty()) jp["detail"] = p.detail;
    preds.push_back(jp);
    if (!p.passed) failed.push_back(p.name);
  }
  summary["predicates"] = preds;
  summary["failed_predicates"] = failed;
  const bool ok = all_passed(predicates);
  summary["pass"] = ok;
  std::ofstream os(out_dir / "summary.json");
  os << summary.dump(2) << '\n';
  return ok;
}

}  // namespace

// ---------------------------------------------------------------------------

SelfConsistencyOutcome run_selfconsistency(const std::vector<double>& grid) {
  SelfConsistencyOutcome out;
  StageClock clock(out.timings);
  for (double k : grid) {
    if (!(k > 0.0) || k > 20.0) {
      throw std::invalid_argument("selfconsistency: grid must lie in (0, 20]");
    }
    out.rows.push_back({k, solve_C_linear(k)});
  }
  clock.lap("solve");

  bool monotone = true;
  bool sorted_grid = std::is_sorted(grid.begin(), grid.end());
  std::optional<double> prev;
  for (const auto& row : out.rows) {
    if (row.C && prev && sorted_grid && *row.C <= *prev) monotone = false;
    if (row.C) prev = *row.C;
  }
  if (sorted_grid && out.rows.size() > 1) {
    out.predicates.push_back({"C_strictly_increasing", monotone,
                              monotone ? 1.0 : 0.0, 1.0,
                              "C(pK/a) strictly increasing where defined"});
  }
  const double threshold = 2.0 / kPi;
  bool existence_ok = true;
  for (const auto& row : out.rows) {
    if (row.C.has_value() != (row.pk_over_a >= threshold)) {
      existence_ok = false;
    }
  }
  out.predicates.push_back({"existence_iff_threshold", existence_ok,
                            existence_ok ? 1.0 : 0.0, 1.0,
                            "C exists iff pK/a >= 2/pi"});
  clock.lap("predicates");
  return out;
}

// ---------------------------------------------------------------------------

SimulateOutcome run_simulate(const SimulateParams& sp) {
  SimulateOutcome out;
  StageClock clock(out.timings);

  auto weights = graph_for(sp);
  out.graph_summary_json = weights->density_summary_json();
  clock.lap("graph");

  auto freqs = build_frequencies(sp);
  out.omegas = freqs.omegas;
  out.xi = freqs.xi;
  out.nu = freqs.nu;
  clock.lap("frequencies");

  KMSystem sys(weights, freqs.omegas, sp.coupling);
  PhaseState u0{0.0, random_initial_phases(
                         sp.n, sub_seed(sp.seed, SeedDomain::kInitialPhase))};
  IntegratorConfig cfg = sp.integrator;
  cfg.sample_stride = sp.sample_stride;
  out.trajectory = integrate(sys, u0, sp.t_end, cfg);
  clock.lap("integrate");

  const auto lock = lock_detect(sys, out.trajectory,
                                std::min(sp.lock_window, sp.t_end),
                                sp.lock_tol);
  out.locked = lock.locked;
  out.frequency_spread = lock.frequency_spread;

  const auto& uf = out.trajectory.final.u;
  out.theta_mean_arithmetic = arithmetic_mean_wrapped(uf);
  out.theta_mean_circular = circular_mean(uf);
  out.order_parameter_r = order_parameter(uf).r;
  out.delta_u = delta_u_observable(uf, freqs.omegas);
  out.delta_u_predicted = delta_u_prediction(sp.coupling, sp.a, sp.p);

  const auto profile = stable_profile(sp.coupling, sp.a, sp.p);
  if (profile) {
    out.C = profile->C();
    const auto state = sp.freq_mode == FreqMode::kIidUniform
                           ? apply_permutation(freqs.xi, uf)
                           : uf;
    out.aligned_distance =
        align_theta(embed(state), profile->evaluator()).distance;
  }
  clock.lap("observables");

  // Steady-state agreement predicates at the tolerances the graph case
  // supports (sparse runs are trend-only and carry no threshold here).
  if (out.aligned_distance && out.locked && sp.t_end >= 100.0) {
    if (sp.graph_case == GraphCase::kComplete) {
      out.predicates.push_back({"aligned_distance_complete",
                                *out.aligned_distance < 0.05,
                                *out.aligned_distance, 0.05,
                                "permuted aligned L2 distance to the stable "
                                "profile"});
      out.predicates.push_back(
          {"order_parameter_matches_C",
           std::abs(out.order_parameter_r - *out.C) < 0.01,
           std::abs(out.order_parameter_r - *out.C), 0.01,
           "|r - C| at the stable profile"});
    } else if (sp.graph_case == GraphCase::kRandomDense) {
      out.predicates.push_back({"aligned_distance_random_dense",
                                *out.aligned_distance < 0.1,
                                *out.aligned_distance, 0.1,
                                "permuted aligned L2 distance to the stable "
                                "profile"});
    }
  }
  clock.lap("predicates");
  return out;
}

// ---------------------------------------------------------------------------

BifurcateOutcome run_bifurcate(const BifurcateParams& bp) {
  if (!std::is_sorted(bp.coupling_grid.begin(), bp.coupling_grid.end())) {
    throw std::invalid_argument("bifurcate: K grid must be sorted");
  }
  BifurcateOutcome out;
  StageClock clock(out.timings);
  out.rows.resize(bp.coupling_grid.size());

  parallel_jobs(bp.coupling_grid.size(), bp.threads, [&](std::size_t idx) {
    SimulateParams sp = bp.base;
    sp.coupling = bp.coupling_grid[idx];
    const auto sim = run_simulate(sp);
    BifurcateRow row;
    row.coupling = sp.coupling;
    row.locked = sim.locked;
    row.delta_u_pred = sim.delta_u_predicted;
    if (sim.locked) row.delta_u_sim = sim.delta_u;
    out.rows[idx] = row;
  });
  clock.lap("sweep");

  double worst = 0.0;
  bool any_locked = false;
  for (const auto& row : out.rows) {
    if (row.locked && row.delta_u_sim && row.delta_u_pred) {
      any_locked = true;
      worst = std::max(worst, std::abs(*row.delta_u_sim - *row.delta_u_pred));
    }
  }
  if (any_locked) {
    out.predicates.push_back({"delta_u_matches_prediction", worst < 0.05,
                              worst, 0.05,
                              "max |du_sim - du_pred| over locked rows"});
  }
  clock.lap("predicates");
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Exact L2 distance between two step embeddings on the common refinement,
// with circle wrapping.
double step_distance(const std::vector<double>& a,
                     const std::vector<double>& b) {
  return circle_l2(StepFunction(a), StepFunction(b));
}

}  // namespace

ConvergenceOutcome run_convergence(const ConvergenceParams& cp) {
  if (!std::is_sorted(cp.n_grid.begin(), cp.n_grid.end())) {
    throw std::invalid_argument("convergence: n grid must be sorted");
  }
  for (std::size_t n : cp.n_grid) {
    if (n > cp.m_ref) {
      throw std::invalid_argument("convergence: m_ref must be >= max n");
    }
  }
  ConvergenceOutcome out;
  StageClock clock(out.timings);

  IntegratorConfig cfg = cp.integrator;
  cfg.sample_stride = cp.sample_stride;
  auto u0_fn = [](double) { return 0.0; };
  const Trajectory reference = cl_reference_trajectory(
      FrequencyFunction::linear(cp.a), cp.p, cp.coupling, cp.m_ref, u0_fn,
      cp.t_end, cfg);
  clock.lap("reference");

  struct Job {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t n : cp.n_grid) {
    for (auto seed : cp.seeds) jobs.push_back({n, seed});
  }
  out.rows.resize(jobs.size());

  parallel_jobs(jobs.size(), cp.threads, [&](std::size_t idx) {
    const auto& job = jobs[idx];
    SimulateParams sp;
    sp.graph_case = cp.graph_case;
    sp.n = job.n;
    sp.coupling = cp.coupling;
    sp.a = cp.a;
    sp.p = cp.p;
    sp.gamma = cp.gamma;
    sp.freq_mode = cp.freq_mode;
    sp.seed = job.seed;
    auto weights = graph_for(sp);
    auto freqs = build_frequencies(sp);
    KMSystem sys(weights, freqs.omegas, cp.coupling);

    // Matched initial data: cell averages of the CL initial function,
    // assigned through the sorting permutation for i.i.d. frequencies so
    // that T_xi u_n(0) equals the embedded initial function exactly.
    const auto u0_cells =
        discretize(FrequencyFunction::callable(u0_fn, "u0"), job.n);
    std::vector<double> u0(job.n);
    for (std::size_t i = 0; i < job.n; ++i) u0[freqs.xi[i]] = u0_cells[i];

    const auto traj = integrate(sys, PhaseState{0.0, u0}, cp.t_end, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const auto state =
          cp.freq_mode == FreqMode::kIidUniform
              ? apply_permutation(freqs.xi, traj.states[k])
              : traj.states[k];
      worst = std::max(worst, step_distance(state, reference.states[k]));
    }
    out.rows[idx] = {job.n, job.seed, worst};
  });
  clock.lap("sweep");

  for (std::size_t n : cp.n_grid) {
    std::vector<double> ds;
    for (const auto& row : out.rows) {
      if (row.n == n) ds.push_back(row.max_distance);
    }
    out.medians.emplace_back(n, median(ds));
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < out.medians.size(); ++k) {
    if (out.medians[k].second >= out.medians[k - 1].second) decreasing = false;
  }
  if (out.medians.size() > 1) {
    out.predicates.push_back({"distance_decreasing_in_n", decreasing,
                              decreasing ? 1.0 : 0.0, 1.0,
                              "median max-distance strictly decreasing"});
  }
  clock.lap("predicates");
  return out;
}

// ---------------------------------------------------------------------------

PermutationOutcome run_permutation(const PermutationParams& pp) {
  if (!std::is_sorted(pp.n_grid.begin(), pp.n_grid.end())) {
    throw std::invalid_argument("permutation: n grid must be sorted");
  }
  PermutationOutcome out;
  StageClock clock(out.timings);
  const auto dist = FrequencyDistribution::uniform(pp.a);

  std::vector<std::vector<double>> devs(pp.n_grid.size());
  for (auto& d : devs) d.resize(pp.seed_count);
  struct Job {
    std::size_t n_idx;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < pp.n_grid.size(); ++i) {
    for (std::size_t r = 0; r < pp.seed_count; ++r) jobs.push_back({i, r});
  }
  parallel_jobs(jobs.size(), pp.threads, [&](std::size_t idx) {
    const auto& job = jobs[idx];
    const auto sample = sample_iid(dist, pp.n_grid[job.n_idx],
                                   stream_key(pp.seed, job.rep));
    devs[job.n_idx][job.rep] = permutation_deviation(sample);
  });
  clock.lap("sweep");

  for (std::size_t i = 0; i < pp.n_grid.size(); ++i) {
    out.rows.push_back({pp.n_grid[i], median(devs[i]), quantile(devs[i], 0.1),
                        quantile(devs[i], 0.9)});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].median >= out.rows[i - 1].median) decreasing = false;
  }
  if (out.rows.size() > 1) {
    out.predicates.push_back({"median_deviation_decreasing", decreasing,
                              decreasing ? 1.0 : 0.0, 1.0,
                              "median deviation strictly decreasing in n"});
  }
  clock.lap("predicates");
  return out;
}

// ---------------------------------------------------------------------------

InstabilityOutcome run_instability(const InstabilityParams& ip) {
  const double kappa = ip.p * ip.coupling / ip.a;
  if (kappa < 2.0 / kPi) {
    throw std::invalid_argument("instability: pK/a below existence threshold");
  }
  InstabilityOutcome out;
  StageClock clock(out.timings);

  const auto omega = FrequencyFunction::linear(ip.a);
  SelfConsistencyProblem problem(omega, ip.p, ip.coupling, ip.flips);
  std::optional<double> c;
  if (ip.family == StationaryFamily::kDiscontinuous) {
    c = solve_C_general(problem).C;
  } else {
    c = solve_C_linear(kappa);
  }
  if (!c) {
    throw std::runtime_error(
        "instability: no self-consistency constant for this family");
  }
  const StationaryProfile family_prof(problem, *c, ip.family, 0.0);
  const auto stable = stable_profile(ip.coupling, ip.a, ip.p);
  clock.lap("profiles");

  const auto xs = cell_midpoints(ip.m);
  auto u0 = family_prof.collocate(ip.m);
  for (std::size_t i = 0; i < ip.m; ++i) {
    u0[i] += ip.delta * std::sin(kTwoPi * xs[i]);
  }
  const KMSystem sys = cl_collocation_system(omega, ip.p, ip.coupling, ip.m);
  IntegratorConfig cfg = ip.integrator;
  cfg.sample_stride = ip.sample_stride;
  const auto traj = integrate(sys, PhaseState{0.0, u0}, ip.t_max, cfg);
  clock.lap("integrate");

  const StepFunction family_step(family_prof.collocate(ip.m));
  const StepFunction stable_step(stable->collocate(ip.m));
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double d =
        align_theta(StepFunction(traj.states[k]), family_step).distance;
    out.times.push_back(traj.times[k]);
    out.family_distances.push_back(d);
    if (!out.escape_time && d > ip.epsilon) {
      out.escape_time = traj.times[k];
    }
  }
  out.initial_distance = out.family_distances.front();
  out.terminal_family_distance = out.family_distances.back();
  out.terminal_stable_distance =
      align_theta(StepFunction(traj.final.u), stable_step).distance;
  clock.lap("distances");

  if (!out.escape_time) {
    out.verdict = "no-escape";
  } else if (out.terminal_stable_distance < 0.05) {
    out.verdict = "escaped-and-converged";
  } else {
    out.verdict = "escaped-not-converged";
  }
  const bool expect_escape =
      ip.family != StationaryFamily::kContinuousStable;
  if (expect_escape) {
    out.predicates.push_back({"escaped_and_converged",
                              out.verdict == "escaped-and-converged",
                              out.escape_time.value_or(-1.0), ip.epsilon,
                              "unstable family leaves the epsilon "
                              "neighborhood and lands on the stable family"});
  } else {
    const bool stayed = !out.escape_time.has_value() &&
                        out.terminal_stable_distance < 10.0 * ip.delta;
    out.predicates.push_back({"stable_family_holds", stayed,
                              out.terminal_stable_distance, 10.0 * ip.delta,
                              "stable family keeps the perturbation bounded"});
  }
  clock.lap("predicates");
  return out;
}

// ---------------------------------------------------------------------------
// Writers.

namespace {

json simulate_params_json(const SimulateParams& p) {
  json j;
  j["case"] = to_string(p.graph_case);
  j["n"] = p.n;
  j["K"] = p.coupling;
  j["a"] = p.a;
  j["p"] = p.p;
  if (p.graph_case == GraphCase::kRandomSparse) j["gamma"] = p.gamma;
  j["freq_mode"] = to_string(p.freq_mode);
  j["seed"] = p.seed;
  j["t_end"] = p.t_end;
  j["sample_stride"] = p.sample_stride;
  j["lock_window"] = p.lock_window;
  j["lock_tol"] = p.lock_tol;
  j["rtol"] = p.integrator.rtol;
  j["atol"] = p.integrator.atol;
  return j;
}

}  // namespace

void write_profile_csv(const std::filesystem::path& path,
                       const StationaryProfile& profile, std::size_t mesh) {
  CsvWriter csv(path, {"x", "u"});
  for (double x : cell_midpoints(mesh)) {
    csv.field(x).field(profile(x));
    csv.end_row();
  }
}

bool write_selfconsistency(const std::filesystem::path& out_dir,
                           const std::vector<double>& grid,
                           const SelfConsistencyOutcome& o) {
  std::filesystem::create_directories(out_dir);
  CsvWriter csv(out_dir / "c_curve.csv", {"pk_over_a", "C"});
  for (const auto& row : o.rows) {
    csv.field(row.pk_over_a).field(row.C);
    csv.end_row();
  }
  json params;
  params["grid"] = grid;
  write_manifest(out_dir, "selfconsistency", params, o.timings,
                 {"c_curve.csv"});
  json summary;
  summary["rows"] = o.rows.size();
  return write_summary(out_dir, summary, o.predicates);
}

bool write_simulate(const std::filesystem::path& out_dir,
                    const SimulateParams& p, const SimulateOutcome& o) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(out_dir / "trajectory.csv");
    const std::size_t stride = p.trajectory_node_stride != 0
                                   ? p.trajectory_node_stride
                                   : (p.n > 64 ? 100 : 1);
    write_trajectory_csv(os, o.trajectory, stride);
  }
  {
    CsvWriter csv(out_dir / "final_state.csv",
                  {"index", "x", "omega", "u_wrapped"});
    const auto& uf = o.trajectory.final.u;
    for (std::size_t i = 0; i < uf.size(); ++i) {
      csv.field(static_cast<std::uint64_t>(i + 1))
          .field((static_cast<double>(i) + 0.5) / static_cast<double>(p.n))
          .field(o.omegas[i])
          .field(wrap_pi(uf[i]));
      csv.end_row();
    }
  }
  {
    std::ofstream os(out_dir / "frequencies.csv");
    FrequencySample sample;
    sample.omegas = o.omegas;
    sample.xi = o.xi;
    sample.nu = o.nu;
    write_sample_csv(os, sample);
  }
  write_manifest(out_dir, "simulate", simulate_params_json(p), o.timings,
                 {"trajectory.csv", "final_state.csv", "frequencies.csv"});
  json summary;
  summary["graph"] = json::parse(o.graph_summary_json);
  summary["locked"] = o.locked;
  summary["frequency_spread"] = o.frequency_spread;
  summary["theta_mean_arithmetic"] = o.theta_mean_arithmetic;
  summary["theta_mean_circular"] = o.theta_mean_circular;
  summary["order_parameter_r"] = o.order_parameter_r;
  summary["delta_u"] = o.delta_u;
  if (o.delta_u_predicted) summary["delta_u_predicted"] = *o.delta_u_predicted;
  if (o.C) summary["C"] = *o.C;
  if (o.aligned_distance) summary["aligned_distance"] = *o.aligned_distance;
  summary["accepted_steps"] = o.trajectory.stats.accepted;
  summary["rejected_steps"] = o.trajectory.stats.rejected;
  summary["rhs_evals"] = o.trajectory.stats.rhs_evals;
  return write_summary(out_dir, summary, o.predicates);
}

bool write_bifurcate(const std::filesystem::path& out_dir,
                     const BifurcateParams& p, const BifurcateOutcome& o) {
  std::filesystem::create_directories(out_dir);
  CsvWriter csv(out_dir / "bifurcation.csv",
                {"K", "delta_u_sim", "delta_u_pred", "locked"});
  for (const auto& row : o.rows) {
    csv.field(row.coupling)
        .field(row.delta_u_sim)
        .field(row.delta_u_pred)
        .field(row.locked);
    csv.end_row();
  }
  json params = simulate_params_json(p.base);
  params.erase("K");
  params["K_grid"] = p.coupling_grid;
  write_manifest(out_dir, "bifurcate", params, o.timings,
                 {"bifurcation.csv"});
  json summary;
  summary["rows"] = o.rows.size();
  return write_summary(out_dir, summary, o.predicates);
}

bool write_convergence(const std::filesystem::path& out_dir,
                       const ConvergenceParams& p,
                       const ConvergenceOutcome& o) {
  std::filesystem::create_directories(out_dir);
  {
    CsvWriter csv(out_dir / "convergence.csv", {"n", "seed", "max_distance"});
    for (const auto& row : o.rows) {
      csv.field(static_cast<std::uint64_t>(row.n))
          .field(row.seed)
          .field(row.max_distance);
      csv.end_row();
    }
  }
  {
    CsvWriter csv(out_dir / "convergence_medians.csv",
                  {"n", "median_max_distance"});
    for (const auto& [n, med] : o.medians) {
      csv.field(static_cast<std::uint64_t>(n)).field(med);
      csv.end_row();
    }
  }
  json params;
  params["case"] = to_string(p.graph_case);
  params["freq_mode"] = to_string(p.freq_mode);
  params["n_grid"] = p.n_grid;
  params["seeds"] = p.seeds;
  params["K"] = p.coupling;
  params["a"] = p.a;
  params["p"] = p.p;
  if (p.graph_case == GraphCase::kRandomSparse) params["gamma"] = p.gamma;
  params["t_end"] = p.t_end;
  params["m_ref"] = p.m_ref;
  params["sample_stride"] = p.sample_stride;
  write_manifest(out_dir, "convergence", params, o.timings,
                 {"convergence.csv", "convergence_medians.csv"});
  json summary;
  json meds = json::array();
  for (const auto& [n, med] : o.medians) {
    meds.push_back({{"n", n}, {"median", med}});
  }
  summary["medians"] = meds;
  return write_summary(out_dir, summary, o.predicates);
}

bool write_permutation(const std::filesystem::path& out_dir,
                       const PermutationParams& p,
                       const PermutationOutcome& o) {
  std::filesystem::create_directories(out_dir);
  CsvWriter csv(out_dir / "permutation.csv", {"n", "median", "q10", "q90"});
  for (const auto& row : o.rows) {
    csv.field(static_cast<std::uint64_t>(row.n))
        .field(row.median)
        .field(row.q10)
        .field(row.q90);
    csv.end_row();
  }
  json params;
  params["n_grid"] = p.n_grid;
  params["a"] = p.a;
  params["seed_count"] = p.seed_count;
  params["seed"] = p.seed;
  write_manifest(out_dir, "permutation", params, o.timings,
                 {"permutation.csv"});
  json summary;
  summary["rows"] = o.rows.size();
  return write_summary(out_dir, summary, o.predicates);
}

bool write_instability(const std::filesystem::path& out_dir,
                       const InstabilityParams& p,
                       const InstabilityOutcome& o) {
  std::filesystem::create_directories(out_dir);
  CsvWriter csv(out_dir / "family_distance.csv", {"t", "distance"});
  for (std::size_t k = 0; k < o.times.size(); ++k) {
    csv.field(o.times[k]).field(o.family_distances[k]);
    csv.end_row();
  }
  json params;
  params["family"] =
      p.family == StationaryFamily::kContinuousStable     ? "stable"
      : p.family == StationaryFamily::kContinuousFlipped ? "flipped"
                                                          : "discontinuous";
  json flips = json::array();
  for (const auto& f : p.flips) flips.push_back({{"lo", f.lo}, {"hi", f.hi}});
  params["flips"] = flips;
  params["delta"] = p.delta;
  params["epsilon"] = p.epsilon;
  params["m"] = p.m;
  params["t_max"] = p.t_max;
  params["K"] = p.coupling;
  params["a"] = p.a;
  params["p"] = p.p;
  write_manifest(out_dir, "instability", params, o.timings,
                 {"family_distance.csv"});
  json verdict;
  verdict["verdict"] = o.verdict;
  if (o.escape_time) verdict["escape_time"] = *o.escape_time;
  verdict["initial_distance"] = o.initial_distance;
  verdict["terminal_family_distance"] = o.terminal_family_distance;
  verdict["terminal_stable_distance"] = o.terminal_stable_distance;
  return write_summary(out_dir, verdict, o.predicates);
}

}  // namespace kmcl::experiments
