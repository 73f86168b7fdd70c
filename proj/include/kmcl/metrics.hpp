#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace kmcl {

// Piecewise-constant embedding of a phase vector: value u[i] on the cell
// I_i^n = [i/n, (i+1)/n) (last cell closed). Boundary points belong to the
// right cell; x = 1 evaluates in the last cell.
class StepFunction {
 public:
  explicit StepFunction(std::vector<double> values);

  double operator()(double x) const;
  std::size_t cells() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

inline StepFunction embed(std::vector<double> u) {
  return StepFunction(std::move(u));
}

// L2(I) distance of circle-valued functions: sqrt(int wrap(f - g)^2 dx)
// with differences wrapped to (-pi, pi]. Step-vs-step is exact on the
// common refinement; step-vs-continuous uses per-cell Simpson with 8
// subintervals.
double circle_l2(const StepFunction& f, const StepFunction& g);
double circle_l2(const StepFunction& f,
                 const std::function<double(double)>& g);

struct AlignmentResult {
  double theta_star = 0.0;  // in (-pi, pi]
  double distance = 0.0;
};

// Minimizes circle_l2(f, g + theta) over the global phase shift theta:
// 256-point grid, golden-section refinement of the best bracket, plus the
// circular-mean seed; theta = 0 is always a candidate.
AlignmentResult align_theta(const StepFunction& f, const StepFunction& g);
AlignmentResult align_theta(const StepFunction& f,
                            const std::function<double(double)>& g);

// T_xi: output[i] = u[xi[i]].
std::vector<double> apply_permutation(const std::vector<std::uint32_t>& xi,
                                      const std::vector<double>& u);

struct OrderParameter {
  double r = 0.0;    // in [0, 1]
  double psi = 0.0;  // mean-field phase
};

// r e^{i psi} = (1/n) sum_j e^{i u_j}.
OrderParameter order_parameter(const std::vector<double>& u);

// Phase gap between the extreme-frequency nodes, wrapped to (-pi, pi];
// argmax/argmin ties break to the lowest index.
double delta_u_observable(const std::vector<double>& u,
                          const std::vector<double>& omegas);

}  // namespace kmcl
