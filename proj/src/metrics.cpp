#include "kmcl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kmcl/numerics.hpp"

namespace kmcl {

StepFunction::StepFunction(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw std::invalid_argument("StepFunction: empty value vector");
  }
}

double StepFunction::operator()(double x) const {
  const auto n = values_.size();
  auto i = static_cast<std::ptrdiff_t>(
      std::floor(x * static_cast<double>(n)));
  if (i < 0) i = 0;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = static_cast<std::ptrdiff_t>(n) - 1;
  return values_[static_cast<std::size_t>(i)];
}

namespace {

// Common-refinement segments of two cell partitions: calls
// visit(length, fi, gj) for every maximal interval on which both step
// functions are constant. Exact, no quadrature.
template <typename Visit>
void common_refinement(const StepFunction& f, const StepFunction& g,
                       Visit&& visit) {
  const std::size_t n = f.cells();
  const std::size_t m = g.cells();
  std::size_t i = 0, j = 0;
  double x = 0.0;
  while (i < n && j < m) {
    const double fb = static_cast<double>(i + 1) / static_cast<double>(n);
    const double gb = static_cast<double>(j + 1) / static_cast<double>(m);
    const double next = std::min(fb, gb);
    visit(next - x, f.values()[i], g.values()[j]);
    x = next;
    if (fb <= next) ++i;
    if (gb <= next) ++j;
  }
}

// Weighted pointwise differences (f - g) with quadrature weights summing
// to 1; shared by the distance and the theta alignment.
struct DiffTable {
  std::vector<double> weight;
  std::vector<double> diff;

  double distance(double theta) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k) {
      const double d = wrap_pi(diff[k] - theta);
      acc += weight[k] * d * d;
    }
    return std::sqrt(std::max(0.0, acc));
  }
};

DiffTable diff_table(const StepFunction& f, const StepFunction& g) {
  DiffTable t;
  common_refinement(f, g, [&t](double len, double fv, double gv) {
    if (len > 0.0) {
      t.weight.push_back(len);
      t.diff.push_back(fv - gv);
    }
  });
  return t;
}

DiffTable diff_table(const StepFunction& f,
                     const std::function<double(double)>& g) {
  // Per-cell composite Simpson with 8 subintervals (9 nodes a cell).
  constexpr std::size_t kSub = 8;
  const std::size_t n = f.cells();
  const double cell = 1.0 / static_cast<double>(n);
  const double h = cell / kSub;
  DiffTable t;
  t.weight.reserve(n * (kSub + 1));
  t.diff.reserve(n * (kSub + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) * cell;
    for (std::size_t k = 0; k <= kSub; ++k) {
      const double x = lo + h * static_cast<double>(k);
      double wq = (k == 0 || k == kSub) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      t.weight.push_back(wq * h / 3.0);
      t.diff.push_back(f.values()[i] - g(x));
    }
  }
  return t;
}

AlignmentResult align(const DiffTable& table) {
  constexpr int kGrid = 256;
  double best_theta = 0.0;
  double best = table.distance(0.0);
  int best_k = -1;
  for (int k = 0; k < kGrid; ++k) {
    const double theta = -kPi + kTwoPi * (static_cast<double>(k) + 0.5) / kGrid;
    const double d = table.distance(theta);
    if (d < best) {
      best = d;
      best_theta = theta;
      best_k = k;
    }
  }
  auto refine = [&table, &best, &best_theta](double lo, double hi) {
    const double theta = golden_section(
        [&table](double th) { return table.distance(th); }, lo, hi, 1e-10);
    const double d = table.distance(theta);
    if (d < best) {
      best = d;
      best_theta = theta;
    }
  };
  if (best_k >= 0) {
    const double step = kTwoPi / kGrid;
    const double center = -kPi + step * (static_cast<double>(best_k) + 0.5);
    refine(center - step, center + step);
  }
  // Circular-mean seed recovers the closed-form optimum when the wrapped
  // differences stay in one branch.
  double s = 0.0, c = 0.0;
  for (std::size_t k = 0; k < table.weight.size(); ++k) {
    s += table.weight[k] * std::sin(table.diff[k]);
    c += table.weight[k] * std::cos(table.diff[k]);
  }
  if (s != 0.0 || c != 0.0) {
    const double seed = std::atan2(s, c);
    refine(seed - kTwoPi / kGrid, seed + kTwoPi / kGrid);
  }
  return {wrap_pi(best_theta), best};
}

}  // namespace

double circle_l2(const StepFunction& f, const StepFunction& g) {
  if (f.cells() == g.cells()) {
    // Equal partitions: sum the sorted squared differences so the result
    // is independent of cell order (permutation-invariant bit for bit).
    const std::size_t n = f.cells();
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = wrap_pi(f.values()[i] - g.values()[i]);
      sq[i] = d * d;
    }
    std::sort(sq.begin(), sq.end());
    double acc = 0.0;
    for (double v : sq) acc += v;
    return std::sqrt(acc / static_cast<double>(n));
  }
  return diff_table(f, g).distance(0.0);
}

double circle_l2(const StepFunction& f,
                 const std::function<double(double)>& g) {
  return diff_table(f, g).distance(0.0);
}

AlignmentResult align_theta(const StepFunction& f, const StepFunction& g) {
  return align(diff_table(f, g));
}

AlignmentResult align_theta(const StepFunction& f,
                            const std::function<double(double)>& g) {
  return align(diff_table(f, g));
}

std::vector<double> apply_permutation(const std::vector<std::uint32_t>& xi,
                                      const std::vector<double>& u) {
  const std::size_t n = u.size();
  if (xi.size() != n) {
    throw std::invalid_argument("apply_permutation: size mismatch");
  }
  std::vector<bool> seen(n, false);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (xi[i] >= n || seen[xi[i]]) {
      throw std::invalid_argument("apply_permutation: malformed permutation");
    }
    seen[xi[i]] = true;
    out[i] = u[xi[i]];
  }
  return out;
}

OrderParameter order_parameter(const std::vector<double>& u) {
  if (u.empty()) throw std::invalid_argument("order_parameter: empty input");
  double s = 0.0, c = 0.0;
  for (double x : u) {
    s += std::sin(x);
    c += std::cos(x);
  }
  const auto n = static_cast<double>(u.size());
  return {std::hypot(c, s) / n, std::atan2(s, c)};
}

double delta_u_observable(const std::vector<double>& u,
                          const std::vector<double>& omegas) {
  if (u.size() != omegas.size() || u.empty()) {
    throw std::invalid_argument("delta_u_observable: length mismatch");
  }
  std::size_t imax = 0, imin = 0;
  for (std::size_t i = 1; i < omegas.size(); ++i) {
    if (omegas[i] > omegas[imax]) imax = i;
    if (omegas[i] < omegas[imin]) imin = i;
  }
  return wrap_pi(u[imax] - u[imin]);
}

}  // namespace kmcl
