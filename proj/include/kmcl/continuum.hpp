#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kmcl/dynamics.hpp"
#include "kmcl/frequencies.hpp"

namespace kmcl {

// Omega = int_I omega(x) dx; exact for linear (0) and constant kinds.
double mean_frequency(const FrequencyFunction& omega);

// Positive root of the self-consistency equation for the linear frequency
// function in normalized form: with kappa = pK/a and z = 1/(2 kappa C),
//   C = kappa C (arcsin z + z sqrt(1 - z^2)).
// Exists iff kappa >= 2/pi (boundary decided by the closed-form sign of
// g(C_min) = pi/4 - 1/(2 kappa), i.e. a kappa-space comparison); the root
// is bisected on [1/(2 kappa), 1] and cross-checked by fixed-point
// iteration from C = 1.
std::optional<double> solve_C_linear(double pk_over_a);

// Flip interval for discontinuous stationary families; must lie entirely in
// [0, 1/2] (lower) or [1/2, 1] (upper). Empty interiors are allowed and act
// as no-ops.
struct FlipInterval {
  double lo;
  double hi;
  bool upper() const { return lo >= 0.5; }
};

class SelfConsistencyProblem {
 public:
  SelfConsistencyProblem(FrequencyFunction omega, double p, double coupling,
                         std::vector<FlipInterval> flip_set = {});

  const FrequencyFunction& omega() const { return omega_; }
  double p() const { return p_; }
  double coupling() const { return coupling_; }
  double pk() const { return p_ * coupling_; }
  double mean() const { return omega_mean_; }
  const std::vector<FlipInterval>& flip_set() const { return flip_set_; }

 private:
  FrequencyFunction omega_;
  double p_;
  double coupling_;
  double omega_mean_;
  std::vector<FlipInterval> flip_set_;
};

struct SelfConsistencyResult {
  std::optional<double> C;
  // Sign changes of g on the 1024-point scan; > 1 flags root multiplicity
  // instead of silently choosing one.
  int sign_changes = 0;
};

// Root of g(C) = int sgn(x) sqrt(1 - ((omega - Omega)/(pKC))^2) dx - C on
// [C_min, 1], with sgn = -1 on the flip set. C_min = sup|omega - Omega|/pK
// over the evaluation mesh; quadrature is adaptive Simpson, split at flip
// boundaries. For the linear frequency function this reproduces
// solve_C_linear and its existence region.
SelfConsistencyResult solve_C_general(const SelfConsistencyProblem& problem,
                                      std::size_t mesh = 4097);

enum class StationaryFamily {
  kContinuousStable,
  kContinuousFlipped,
  kDiscontinuous,
};

// Stationary family evaluator: with U(x) = arcsin((omega(x) - Omega)/(pKC)),
//   continuous stable      u = U(x) + theta
//   continuous flipped     u = pi - U(x) + theta
//   discontinuous          u = U + theta off the flip set,
//                          pi - U + theta on upper flips,
//                          -U - pi + theta on lower flips.
class StationaryProfile {
 public:
  StationaryProfile(SelfConsistencyProblem problem, double C,
                    StationaryFamily family, double theta);

  double operator()(double x) const;
  std::function<double(double)> evaluator() const;

  double C() const { return C_; }
  double Omega() const { return problem_.mean(); }
  double theta() const { return theta_; }
  StationaryFamily family() const { return family_; }
  const SelfConsistencyProblem& problem() const { return problem_; }

  // Max over a mesh of |du/dt - Omega| with the profile substituted into
  // the continuum-limit right-hand side (stationarity in the rotating
  // frame). The continuous stable and discontinuous families satisfy this
  // at quadrature accuracy.
  double stationarity_residual(std::size_t mesh = 2048) const;

  // Samples the profile at the m collocation midpoints.
  std::vector<double> collocate(std::size_t m) const;

 private:
  double base(double x) const;  // U(x)

  SelfConsistencyProblem problem_;
  double C_;
  StationaryFamily family_;
  double theta_;
};

// Throws on C/family mismatch (self-consistency residual check).
StationaryProfile stationary_profile(const SelfConsistencyProblem& problem,
                                     double C, StationaryFamily family,
                                     double theta);

// 2 arcsin(a / (2pKC)) with C = solve_C_linear(pK/a); empty below the
// existence threshold.
std::optional<double> delta_u_prediction(double coupling, double a, double p);

// m-point collocation reference for the continuum limit with uniform
// coupling p: the deterministic-dense Kuramoto system on m nodes with cell
// averaged initial data u0 and frequencies discretize(omega, m).
Trajectory cl_reference_trajectory(const FrequencyFunction& omega, double p,
                                   double coupling, std::size_t m,
                                   const std::function<double(double)>& u0,
                                   double t_end,
                                   const IntegratorConfig& cfg = {});

// The collocation system itself, when callers need rhs access.
KMSystem cl_collocation_system(const FrequencyFunction& omega, double p,
                               double coupling, std::size_t m);

}  // namespace kmcl
