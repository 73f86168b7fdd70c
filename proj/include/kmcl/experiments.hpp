#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmcl/continuum.hpp"
#include "kmcl/dynamics.hpp"
#include "kmcl/frequencies.hpp"
#include "kmcl/metrics.hpp"
#include "kmcl/weight_matrix.hpp"

namespace kmcl::experiments {

using kmcl::GraphCase;

enum class FreqMode { kEquallyPlaced, kIidUniform };

std::string to_string(FreqMode m);
FreqMode freq_mode_from_string(const std::string& s);

// Named pass/fail check evaluated during a run; failed predicates drive the
// nonzero exit code and are enumerated in the summary JSON.
struct Predicate {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

bool all_passed(const std::vector<Predicate>& ps);

// Stage label -> elapsed milliseconds, for the run manifest.
using Timings = std::map<std::string, double>;

int thread_count_from_env();

// ---------------------------------------------------------------------------
// selfconsistency: C as a function of pK/a.

struct SelfConsistencyRow {
  double pk_over_a = 0.0;
  std::optional<double> C;
};

struct SelfConsistencyOutcome {
  std::vector<SelfConsistencyRow> rows;
  std::vector<Predicate> predicates;
  Timings timings;
};

SelfConsistencyOutcome run_selfconsistency(const std::vector<double>& grid);

// ---------------------------------------------------------------------------
// simulate: one Kuramoto run with steady-state observables.

struct SimulateParams {
  GraphCase graph_case = GraphCase::kComplete;
  std::size_t n = 1000;
  double coupling = 1.0;
  double a = 1.0;
  double p = 1.0;
  double gamma = 0.3;
  FreqMode freq_mode = FreqMode::kIidUniform;
  std::uint64_t seed = 1;
  double t_end = 100.0;
  double sample_stride = 1.0;
  double lock_window = 10.0;
  double lock_tol = 1e-3;  // frequency-spread threshold for lock detection
  // Node subset for the trajectory CSV; 0 = every node up to 64, every
  // 100th beyond that.
  std::size_t trajectory_node_stride = 0;
  IntegratorConfig integrator;
};

struct SimulateOutcome {
  Trajectory trajectory;
  std::vector<double> omegas;
  std::vector<std::uint32_t> xi;  // identity for equally placed
  std::vector<double> nu;         // quantile targets (omegas when equal)
  std::string graph_summary_json;
  bool locked = false;
  double frequency_spread = 0.0;
  double theta_mean_arithmetic = 0.0;  // mean of wrapped final phases
  double theta_mean_circular = 0.0;
  double order_parameter_r = 0.0;
  double delta_u = 0.0;
  std::optional<double> delta_u_predicted;
  std::optional<double> C;  // stable-family constant at these parameters
  // Theta-minimized L2 distance of the (permuted, for i.i.d. frequencies)
  // final state to the stable continuum profile; absent below threshold.
  std::optional<double> aligned_distance;
  std::vector<Predicate> predicates;
  Timings timings;
};

SimulateOutcome run_simulate(const SimulateParams& params);

// ---------------------------------------------------------------------------
// bifurcate: K sweep of the steady-state phase gap.

struct BifurcateParams {
  std::vector<double> coupling_grid;
  SimulateParams base;  // coupling overridden per row
  int threads = 1;
};

struct BifurcateRow {
  double coupling = 0.0;
  std::optional<double> delta_u_sim;  // absent when drifting
  std::optional<double> delta_u_pred;
  bool locked = false;
};

struct BifurcateOutcome {
  std::vector<BifurcateRow> rows;
  std::vector<Predicate> predicates;
  Timings timings;
};

BifurcateOutcome run_bifurcate(const BifurcateParams& params);

// ---------------------------------------------------------------------------
// convergence: distance to the collocation reference as n grows.

struct ConvergenceParams {
  std::vector<std::size_t> n_grid{100, 400, 1600};
  GraphCase graph_case = GraphCase::kComplete;
  FreqMode freq_mode = FreqMode::kEquallyPlaced;
  std::vector<std::uint64_t> seeds{1};
  double coupling = 1.0;
  double a = 1.0;
  double p = 1.0;
  double gamma = 0.3;
  double t_end = 10.0;
  double sample_stride = 0.5;
  std::size_t m_ref = 8192;
  IntegratorConfig integrator;
  int threads = 1;
};

struct ConvergenceRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double max_distance = 0.0;  // max over sample times in [0, t_end]
};

struct ConvergenceOutcome {
  std::vector<ConvergenceRow> rows;
  std::vector<std::pair<std::size_t, double>> medians;  // per n
  std::vector<Predicate> predicates;
  Timings timings;
};

ConvergenceOutcome run_convergence(const ConvergenceParams& params);

// ---------------------------------------------------------------------------
// permutation: sorted-sample deviation from the quantile targets.

struct PermutationParams {
  std::vector<std::size_t> n_grid{100, 1000, 10000};
  double a = 1.0;
  std::size_t seed_count = 20;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct PermutationRow {
  std::size_t n = 0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

struct PermutationOutcome {
  std::vector<PermutationRow> rows;
  std::vector<Predicate> predicates;
  Timings timings;
};

PermutationOutcome run_permutation(const PermutationParams& params);

// ---------------------------------------------------------------------------
// instability: perturb a stationary family and watch for escape.

struct InstabilityParams {
  StationaryFamily family = StationaryFamily::kContinuousFlipped;
  std::vector<FlipInterval> flips;  // discontinuous family only
  double delta = 1e-3;              // perturbation amplitude delta*sin(2 pi x)
  double epsilon = 0.5;             // escape radius
  std::size_t m = 2048;             // collocation points
  double t_max = 200.0;
  double coupling = 1.0;
  double a = 1.0;
  double p = 1.0;
  double sample_stride = 0.5;
  IntegratorConfig integrator;
};

struct InstabilityOutcome {
  std::string verdict;  // escaped-and-converged | no-escape | escaped-not-converged
  std::optional<double> escape_time;
  double initial_distance = 0.0;
  double terminal_family_distance = 0.0;
  double terminal_stable_distance = 0.0;
  std::vector<double> times;
  std::vector<double> family_distances;
  std::vector<Predicate> predicates;
  Timings timings;
};

InstabilityOutcome run_instability(const InstabilityParams& params);

// ---------------------------------------------------------------------------
// Output writers shared by the CLI and the acceptance suite. Each scenario
// writes its CSV artifacts plus manifest.json / summary.json into out_dir
// and returns whether every predicate passed.

bool write_selfconsistency(const std::filesystem::path& out_dir,
                           const std::vector<double>& grid,
                           const SelfConsistencyOutcome& o);
// x, U(x) rows on a mesh of cell midpoints.
void write_profile_csv(const std::filesystem::path& path,
                       const StationaryProfile& profile, std::size_t mesh);
bool write_simulate(const std::filesystem::path& out_dir,
                    const SimulateParams& p, const SimulateOutcome& o);
bool write_bifurcate(const std::filesystem::path& out_dir,
                     const BifurcateParams& p, const BifurcateOutcome& o);
bool write_convergence(const std::filesystem::path& out_dir,
                       const ConvergenceParams& p,
                       const ConvergenceOutcome& o);
bool write_permutation(const std::filesystem::path& out_dir,
                       const PermutationParams& p,
                       const PermutationOutcome& o);
bool write_instability(const std::filesystem::path& out_dir,
                       const InstabilityParams& p,
                       const InstabilityOutcome& o);

}  // namespace kmcl::experiments
