#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace kmcl {

enum class GraphonKind { kUniform, kGrid, kCallable };

// Bounded nonnegative kernel on the unit square, carrying its row/column
// integrability constants
//   c1 >= sup_y int |W(x,y)| dx   and   c2 >= sup_x int |W(x,y)| dy.
// The constant case W(x,y) = p is kept symbolic so downstream code can take
// exact and O(n) shortcuts; grid kernels are piecewise constant on an
// s x s mesh.
class Graphon {
 public:
  static Graphon uniform(double p);
  // `values` is row-major s x s: cell (i, j) covers I_i x I_j.
  static Graphon grid(std::size_t s, std::vector<double> values);
  // Supplied bounds (when the constants are known analytically) are checked
  // against quadrature estimates; by default they are estimated.
  static Graphon callable(std::function<double(double, double)> f,
                          std::string description = "callable",
                          bool symmetric_hint = false,
                          double bound_c1 = -1.0, double bound_c2 = -1.0);

  double operator()(double x, double y) const;

  GraphonKind kind() const { return kind_; }
  bool is_uniform() const { return kind_ == GraphonKind::kUniform; }
  double uniform_value() const;
  bool symmetric_hint() const { return symmetric_hint_; }
  const std::string& description() const { return description_; }
  double bound_c1() const { return bound_c1_; }
  double bound_c2() const { return bound_c2_; }

  // Quadrature estimates of the integrability constants: sup over an
  // endpoint-inclusive mesh of Simpson inner integrals. Exact (p, p) for
  // uniform kernels; exact row/column sums for grid kernels.
  std::pair<double, double> integrability_bounds(
      std::size_t resolution = 256) const;

 private:
  Graphon() = default;

  GraphonKind kind_ = GraphonKind::kUniform;
  double p_ = 1.0;
  std::size_t grid_size_ = 0;
  std::vector<double> grid_values_;
  std::function<double(double, double)> fn_;
  std::string description_;
  bool symmetric_hint_ = false;
  double bound_c1_ = 1.0;
  double bound_c2_ = 1.0;
};

// Cell average <W>^n_ij = n^2 * int over I_i x I_j of W (0-based cells).
// Exact for uniform kernels; composite midpoint rule with `subcells` x
// `subcells` samples per cell otherwise (exact for affine/bilinear W).
double graphon_average(const Graphon& w, std::size_t n, std::size_t i,
                       std::size_t j, std::size_t subcells = 4);

}  // namespace kmcl
