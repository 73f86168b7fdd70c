#include "kmcl/frequencies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "kmcl/numerics.hpp"
#include "kmcl/rng.hpp"

namespace kmcl {

FrequencyFunction FrequencyFunction::linear(double a) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("FrequencyFunction::linear: a must be > 0");
  }
  FrequencyFunction f;
  f.kind_ = FrequencyKind::kLinear;
  f.a_ = a;
  f.description_ = "linear";
  return f;
}

FrequencyFunction FrequencyFunction::constant(double c) {
  FrequencyFunction f;
  f.kind_ = FrequencyKind::kConstant;
  f.c_ = c;
  f.description_ = "constant";
  return f;
}

FrequencyFunction FrequencyFunction::callable(std::function<double(double)> fn,
                                              std::string description) {
  FrequencyFunction f;
  f.kind_ = FrequencyKind::kCallable;
  f.fn_ = std::move(fn);
  f.description_ = std::move(description);
  return f;
}

double FrequencyFunction::operator()(double x) const {
  double v = 0.0;
  switch (kind_) {
    case FrequencyKind::kLinear:
      return a_ * (x - 0.5);
    case FrequencyKind::kConstant:
      return c_;
    case FrequencyKind::kCallable:
      v = fn_(x);
      break;
  }
  if (!std::isfinite(v)) {
    throw std::domain_error("FrequencyFunction: non-finite value");
  }
  return v;
}

namespace {

// Per-cell averages n * int_{I_i} f by composite Simpson, 16 panels a cell.
std::vector<double> cell_averages(const std::function<double(double)>& f,
                                  std::size_t n) {
  std::vector<double> out(n);
  const double cell = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) * cell;
    out[i] = simpson(f, lo, lo + cell, 16) * static_cast<double>(n);
  }
  return out;
}

}  // namespace

std::vector<double> discretize(const FrequencyFunction& omega, std::size_t n) {
  if (n == 0) throw std::invalid_argument("discretize: n must be >= 1");
  std::vector<double> out(n);
  switch (omega.kind()) {
    case FrequencyKind::kLinear: {
      const double a = omega.linear_slope();
      const double dn = static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = a * (2.0 * static_cast<double>(i + 1) - dn - 1.0) / (2.0 * dn);
      }
      return out;
    }
    case FrequencyKind::kConstant:
      std::fill(out.begin(), out.end(), omega.constant_value());
      return out;
    case FrequencyKind::kCallable:
      return cell_averages([&omega](double x) { return omega(x); }, n);
  }
  return out;
}

FrequencyDistribution FrequencyDistribution::uniform(double a) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("FrequencyDistribution::uniform: a > 0");
  }
  FrequencyDistribution d;
  d.kind_ = DistributionKind::kUniform;
  d.a_ = a;
  d.lo_ = -0.5 * a;
  d.hi_ = 0.5 * a;
  d.description_ = "uniform";
  return d;
}

FrequencyDistribution FrequencyDistribution::custom(
    double support_lo, double support_hi, std::function<double(double)> cdf,
    std::function<double(double)> quantile,
    std::function<double(double)> density, std::string description) {
  if (!(support_lo < support_hi)) {
    throw std::invalid_argument("FrequencyDistribution: empty support");
  }
  FrequencyDistribution d;
  d.kind_ = DistributionKind::kCustom;
  d.lo_ = support_lo;
  d.hi_ = support_hi;
  d.cdf_ = std::move(cdf);
  d.quantile_ = std::move(quantile);
  d.density_ = std::move(density);
  d.description_ = std::move(description);
  d.validate();
  return d;
}

void FrequencyDistribution::validate() const {
  constexpr std::size_t kMesh = 257;
  const double width = hi_ - lo_;
  double prev = -1.0;
  for (std::size_t k = 0; k < kMesh; ++k) {
    const double t = static_cast<double>(k) / (kMesh - 1);
    const double w = lo_ + t * width;
    const double F = cdf(w);
    if (!std::isfinite(F)) {
      throw std::invalid_argument("FrequencyDistribution: non-finite CDF");
    }
    if (k > 0 && F <= prev) {
      throw std::invalid_argument(
          "FrequencyDistribution: CDF must be strictly increasing on the "
          "support");
    }
    prev = F;
    if (std::abs(quantile(F) - w) > 1e-8) {
      throw std::invalid_argument(
          "FrequencyDistribution: quantile does not invert the CDF");
    }
  }
  if (std::abs(cdf(lo_)) > 1e-10 || std::abs(cdf(hi_) - 1.0) > 1e-10) {
    throw std::invalid_argument(
        "FrequencyDistribution: CDF must run from 0 to 1 over the support");
  }
}

double FrequencyDistribution::cdf(double w) const {
  if (kind_ == DistributionKind::kUniform) {
    return (2.0 * w + a_) / (2.0 * a_);
  }
  return cdf_(w);
}

double FrequencyDistribution::quantile(double x) const {
  if (kind_ == DistributionKind::kUniform) {
    return a_ * (x - 0.5);
  }
  return quantile_(x);
}

double FrequencyDistribution::density(double w) const {
  if (kind_ == DistributionKind::kUniform) return 1.0 / a_;
  if (!density_) {
    throw std::logic_error("FrequencyDistribution: no density supplied");
  }
  return density_(w);
}

std::vector<double> quantile_targets(const FrequencyDistribution& dist,
                                     std::size_t n) {
  if (n == 0) throw std::invalid_argument("quantile_targets: n >= 1");
  if (dist.kind() == DistributionKind::kUniform) {
    const double a = 2.0 * dist.support_half_width();
    const double dn = static_cast<double>(n);
    std::vector<double> nu(n);
    for (std::size_t i = 0; i < n; ++i) {
      nu[i] = a * (2.0 * static_cast<double>(i + 1) - dn - 1.0) / (2.0 * dn);
    }
    return nu;
  }
  std::vector<double> nu(n);
  const double cell = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) * cell;
    const double v =
        simpson([&dist](double x) { return dist.quantile(x); }, lo, lo + cell,
                16);
    if (!std::isfinite(v)) {
      throw std::domain_error("quantile_targets: quadrature failure");
    }
    nu[i] = v * static_cast<double>(n);
  }
  return nu;
}

SortPermutation sort_permutation(const std::vector<double>& omegas) {
  if (omegas.empty()) {
    throw std::invalid_argument("sort_permutation: empty input");
  }
  SortPermutation out;
  out.xi.resize(omegas.size());
  std::iota(out.xi.begin(), out.xi.end(), 0);
  std::stable_sort(out.xi.begin(), out.xi.end(),
                   [&omegas](std::uint32_t a, std::uint32_t b) {
                     return omegas[a] < omegas[b];
                   });
  for (std::size_t k = 1; k < out.xi.size(); ++k) {
    if (omegas[out.xi[k]] == omegas[out.xi[k - 1]]) {
      out.ties = true;
      break;
    }
  }
  return out;
}

FrequencySample sample_iid(const FrequencyDistribution& dist, std::size_t n,
                           std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_iid: n >= 1");
  FrequencySample s;
  s.seed = seed;
  s.omegas.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.omegas[i] = dist.quantile(stream(seed, i).next_unit());
  }
  auto perm = sort_permutation(s.omegas);
  s.xi = std::move(perm.xi);
  s.ties = perm.ties;
  s.nu = quantile_targets(dist, n);
  return s;
}

double permutation_deviation(const FrequencySample& sample) {
  double dev = 0.0;
  for (std::size_t i = 0; i < sample.nu.size(); ++i) {
    dev = std::max(dev, std::abs(sample.omegas[sample.xi[i]] - sample.nu[i]));
  }
  return dev;
}

RotatingFrame to_rotating_frame(const std::vector<double>& omegas) {
  if (omegas.empty()) {
    throw std::invalid_argument("to_rotating_frame: empty input");
  }
  RotatingFrame out;
  double mean = 0.0;
  for (double w : omegas) mean += w;
  mean /= static_cast<double>(omegas.size());
  out.rotation_rate = mean;
  out.omegas.reserve(omegas.size());
  for (double w : omegas) out.omegas.push_back(w - mean);
  return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values)
    : sorted_(std::move(values)) {
  if (sorted_.empty()) {
    throw std::invalid_argument("EmpiricalCdf: empty sample");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double w) const {
  const auto below =
      std::lower_bound(sorted_.begin(), sorted_.end(), w) - sorted_.begin();
  return static_cast<double>(below) / static_cast<double>(sorted_.size());
}

void write_sample_csv(std::ostream& os, const FrequencySample& sample) {
  const std::size_t n = sample.omegas.size();
  std::vector<std::uint32_t> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[sample.xi[k]] = k;
  os << "index,omega,rank,nu\n";
  os.precision(17);
  for (std::size_t i = 0; i < n; ++i) {
    os << i << ',' << sample.omegas[i] << ',' << rank[i] << ','
       << sample.nu[rank[i]] << '\n';
  }
}

}  // namespace kmcl
