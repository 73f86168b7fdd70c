#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

#include "kmcl/weight_matrix.hpp"

namespace kmcl {

// Kuramoto system du_i/dt = omega_i + K/(n alpha_n) sum_j w_ij sin(u_j - u_i)
// on a fixed weight matrix. Immutable once built; safe to share.
struct KMSystem {
  std::shared_ptr<const WeightMatrix> weights;
  std::vector<double> omegas;
  double coupling = 1.0;

  KMSystem(std::shared_ptr<const WeightMatrix> w, std::vector<double> om,
           double k);

  std::size_t size() const { return omegas.size(); }
  double edge_gain() const {
    return coupling /
           (static_cast<double>(size()) * weights->alpha_n());
  }
};

// General right-hand side; per-row accumulation in fixed j order. Works for
// all storage kinds (a constant token is expanded row by row).
void rhs(const KMSystem& sys, const std::vector<double>& u,
         std::vector<double>& dudt);
std::vector<double> rhs(const KMSystem& sys, const std::vector<double>& u);

// O(n) path for constant-weight systems via the complex mean field
// S = sum_j e^{i u_j}: sum_j sin(u_j - u_i) = Im(e^{-i u_i} S). Rejects
// non-constant weights.
void rhs_meanfield(const KMSystem& sys, const std::vector<double>& u,
                   std::vector<double>& dudt);
std::vector<double> rhs_meanfield(const KMSystem& sys,
                                  const std::vector<double>& u);

struct PhaseState {
  double t = 0.0;
  std::vector<double> u;  // unwrapped phases
};

enum class IntegrationMethod { kAdaptiveRk8, kRk4Fixed };

struct IntegratorConfig {
  IntegrationMethod method = IntegrationMethod::kAdaptiveRk8;
  double rtol = 1e-8;
  double atol = 1e-8;
  double h_init = 0.0;  // 0 selects the step automatically
  double h_max = std::numeric_limits<double>::infinity();
  // Snapshot spacing for the trajectory; 0 records only the endpoints.
  double sample_stride = 1.0;
  double rk4_step = 1e-3;
  // PI step-size controller parameters (Hairer's dop853 form).
  double safety = 0.9;
  double beta = 0.04;
  // Route constant-weight systems through the mean-field sum.
  bool use_meanfield = true;

  void validate() const;
};

struct StepStats {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t rhs_evals = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // one snapshot per sample time
  PhaseState final;
  StepStats stats;
};

// Adaptive 8th-order explicit embedded Runge-Kutta (Dormand-Prince 8(5,3),
// the dop853 scheme) with PI step-size control, or classical fixed-step
// RK4. Snapshots land exactly on the stride grid by clamping the step.
// Throws IntegrationError on step-size underflow.
Trajectory integrate(const KMSystem& sys, const PhaseState& u0, double t_end,
                     const IntegratorConfig& cfg = {});

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, double h)
      : std::runtime_error(what), t_fail(t), h_fail(h) {}
  double t_fail;
  double h_fail;
};

struct LockResult {
  bool locked = false;
  // Max deviation of instantaneous frequencies from their mean over the
  // inspected window.
  double frequency_spread = 0.0;
  // Circular spread of the final phases about their circular mean (the
  // stationary phase gap when locked).
  double phase_spread = 0.0;
};

// Locked iff every sampled state in the trailing `window` of the trajectory
// has frequency spread below `tol`.
LockResult lock_detect(const KMSystem& sys, const Trajectory& traj,
                       double window, double tol);

// CSV export: header then one row per sample, phases wrapped to (-pi, pi].
// `node_stride` > 1 writes every stride-th node only.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::size_t node_stride = 1);

// i.i.d. uniform initial phases on [-pi, pi] from per-index streams.
std::vector<double> random_initial_phases(std::size_t n, std::uint64_t seed);

}  // namespace kmcl
