#include "kmcl/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kmcl/numerics.hpp"

namespace kmcl {

Graphon Graphon::uniform(double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("Graphon::uniform: p must lie in (0, 1]");
  }
  Graphon w;
  w.kind_ = GraphonKind::kUniform;
  w.p_ = p;
  w.description_ = "uniform";
  w.symmetric_hint_ = true;
  w.bound_c1_ = p;
  w.bound_c2_ = p;
  return w;
}

Graphon Graphon::grid(std::size_t s, std::vector<double> values) {
  if (s == 0 || values.size() != s * s) {
    throw std::invalid_argument("Graphon::grid: need s*s values");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("Graphon::grid: values must be >= 0");
    }
  }
  Graphon w;
  w.kind_ = GraphonKind::kGrid;
  w.grid_size_ = s;
  w.grid_values_ = std::move(values);
  w.description_ = "grid";
  w.symmetric_hint_ = true;
  for (std::size_t i = 0; i < s && w.symmetric_hint_; ++i) {
    for (std::size_t j = i + 1; j < s; ++j) {
      if (w.grid_values_[i * s + j] != w.grid_values_[j * s + i]) {
        w.symmetric_hint_ = false;
        break;
      }
    }
  }
  // Exact row/column sums of the piecewise-constant kernel.
  double c1 = 0.0, c2 = 0.0;
  for (std::size_t j = 0; j < s; ++j) {
    double col = 0.0, row = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      col += w.grid_values_[i * s + j];
      row += w.grid_values_[j * s + i];
    }
    c1 = std::max(c1, col / static_cast<double>(s));
    c2 = std::max(c2, row / static_cast<double>(s));
  }
  w.bound_c1_ = c1;
  w.bound_c2_ = c2;
  return w;
}

Graphon Graphon::callable(std::function<double(double, double)> f,
                          std::string description, bool symmetric_hint,
                          double bound_c1, double bound_c2) {
  Graphon w;
  w.kind_ = GraphonKind::kCallable;
  w.fn_ = std::move(f);
  w.description_ = std::move(description);
  w.symmetric_hint_ = symmetric_hint;
  const auto [c1, c2] = w.integrability_bounds(128);
  if (bound_c1 >= 0.0 || bound_c2 >= 0.0) {
    // Supplied constants must dominate the quadrature estimates.
    constexpr double kTol = 1e-6;
    if (bound_c1 < c1 - kTol || bound_c2 < c2 - kTol) {
      throw std::invalid_argument(
          "Graphon::callable: supplied integrability bounds fall below the "
          "quadrature estimates");
    }
    w.bound_c1_ = bound_c1;
    w.bound_c2_ = bound_c2;
  } else {
    w.bound_c1_ = c1;
    w.bound_c2_ = c2;
  }
  return w;
}

double Graphon::operator()(double x, double y) const {
  double v = 0.0;
  switch (kind_) {
    case GraphonKind::kUniform:
      return p_;
    case GraphonKind::kGrid: {
      const auto s = grid_size_;
      auto cell = [s](double t) {
        auto c = static_cast<std::size_t>(t * static_cast<double>(s));
        return std::min(c, s - 1);
      };
      v = grid_values_[cell(x) * s + cell(y)];
      break;
    }
    case GraphonKind::kCallable:
      v = fn_(x, y);
      break;
  }
  if (!std::isfinite(v)) {
    throw std::domain_error("Graphon: non-finite value at (" +
                            std::to_string(x) + ", " + std::to_string(y) +
                            ")");
  }
  if (v < 0.0) {
    throw std::domain_error("Graphon: negative value");
  }
  return v;
}

double Graphon::uniform_value() const {
  if (!is_uniform()) {
    throw std::logic_error("Graphon::uniform_value: kernel is not uniform");
  }
  return p_;
}

std::pair<double, double> Graphon::integrability_bounds(
    std::size_t resolution) const {
  if (is_uniform()) return {p_, p_};
  if (kind_ == GraphonKind::kGrid) return {bound_c1_, bound_c2_};
  if (resolution < 8) resolution = 8;
  double c1 = 0.0, c2 = 0.0;
  for (std::size_t k = 0; k <= resolution; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(resolution);
    const double row = simpson([&](double x) { return (*this)(x, t); }, 0.0,
                               1.0, resolution);
    const double col = simpson([&](double y) { return (*this)(t, y); }, 0.0,
                               1.0, resolution);
    c1 = std::max(c1, row);
    c2 = std::max(c2, col);
  }
  return {c1, c2};
}

double graphon_average(const Graphon& w, std::size_t n, std::size_t i,
                       std::size_t j, std::size_t subcells) {
  if (n == 0 || i >= n || j >= n) {
    throw std::out_of_range("graphon_average: cell index out of range");
  }
  if (w.is_uniform()) return w.uniform_value();
  if (subcells == 0) subcells = 1;
  const double cell = 1.0 / static_cast<double>(n);
  const double x0 = static_cast<double>(i) * cell;
  const double y0 = static_cast<double>(j) * cell;
  const double h = cell / static_cast<double>(subcells);
  double sum = 0.0;
  for (std::size_t p = 0; p < subcells; ++p) {
    const double x = x0 + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t q = 0; q < subcells; ++q) {
      const double y = y0 + (static_cast<double>(q) + 0.5) * h;
      sum += w(x, y);
    }
  }
  return sum / static_cast<double>(subcells * subcells);
}

}  // namespace kmcl
