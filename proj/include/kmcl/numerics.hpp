#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace kmcl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrap to the principal branch (-pi, pi].
inline double wrap_pi(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

// Circular mean of angles; returns a value in (-pi, pi]. Zero-length sums
// (perfectly balanced phasors) fall back to 0.
double circular_mean(const std::vector<double>& angles);

// Composite Simpson rule with `panels` subintervals (rounded up to even).
double simpson(const std::function<double(double)>& f, double a, double b,
               std::size_t panels);

// Adaptive Simpson quadrature (Lyness criterion). Handles the square-root
// edge behavior of the self-consistency integrands by local refinement;
// `max_depth` caps recursion on genuinely singular integrands.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 48);

// Golden-section minimization of a unimodal-on-bracket objective.
// Returns the abscissa of the minimum within `tol`.
double golden_section(const std::function<double(double)>& f, double lo,
                      double hi, double tol, int max_iter = 200);

// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must have
// opposite (or zero) signs. Refines until the bracket width reaches `xtol`.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter = 200);

// Midpoints (i + 1/2)/n of the n-cell partition of [0, 1].
std::vector<double> cell_midpoints(std::size_t n);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

}  // namespace kmcl
