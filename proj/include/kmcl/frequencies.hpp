#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace kmcl {

enum class FrequencyKind { kLinear, kConstant, kCallable };

// Frequency function omega(x) on the unit interval whose cell averages give
// the deterministic natural frequencies. The linear kind a(x - 1/2) has
// closed-form cell averages a(2i - n - 1)/(2n) (equally placed).
class FrequencyFunction {
 public:
  static FrequencyFunction linear(double a);
  static FrequencyFunction constant(double c);
  static FrequencyFunction callable(std::function<double(double)> f,
                                    std::string description = "callable");

  double operator()(double x) const;
  FrequencyKind kind() const { return kind_; }
  double linear_slope() const { return a_; }
  double constant_value() const { return c_; }
  const std::string& description() const { return description_; }

 private:
  FrequencyFunction() = default;
  FrequencyKind kind_ = FrequencyKind::kConstant;
  double a_ = 0.0;
  double c_ = 0.0;
  std::function<double(double)> fn_;
  std::string description_;
};

// omega_i = n * int_{I_i} omega(x) dx, i = 0..n-1. Closed form for linear
// and constant kinds; composite Simpson (16 panels per cell) otherwise.
std::vector<double> discretize(const FrequencyFunction& omega, std::size_t n);

enum class DistributionKind { kUniform, kCustom };

// Probability distribution of the i.i.d. natural frequencies on a bounded
// closed support with strictly increasing CDF. The uniform kind on
// [-a/2, a/2] has F(w) = (2w + a)/(2a) and quantile F^-1(x) = a(x - 1/2)
// exactly. Custom distributions are validated at construction and rejected
// when F fails strict monotonicity or F^-1 does not invert F.
class FrequencyDistribution {
 public:
  static FrequencyDistribution uniform(double a);
  static FrequencyDistribution custom(
      double support_lo, double support_hi, std::function<double(double)> cdf,
      std::function<double(double)> quantile,
      std::function<double(double)> density = nullptr,
      std::string description = "custom");

  double cdf(double w) const;
  double quantile(double x) const;
  bool has_density() const { return static_cast<bool>(density_); }
  double density(double w) const;

  DistributionKind kind() const { return kind_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  double support_half_width() const { return 0.5 * (hi_ - lo_); }
  const std::string& description() const { return description_; }

 private:
  FrequencyDistribution() = default;
  void validate() const;

  DistributionKind kind_ = DistributionKind::kUniform;
  double lo_ = -0.5;
  double hi_ = 0.5;
  double a_ = 1.0;  // uniform kind support width
  std::function<double(double)> cdf_;
  std::function<double(double)> quantile_;
  std::function<double(double)> density_;
  std::string description_;
};

// nu_n(i) = n * int_{I_i} F^-1(x) dx; exact closed form a(2i - n - 1)/(2n)
// for the uniform kind, composite Simpson (16 panels per cell) otherwise.
std::vector<double> quantile_targets(const FrequencyDistribution& dist,
                                     std::size_t n);

// Stable ascending argsort: xi[k] is the index of the k-th smallest entry.
// Exact ties are broken by original index; `ties` reports whether any
// occurred (a measure-zero event for continuous distributions).
struct SortPermutation {
  std::vector<std::uint32_t> xi;
  bool ties = false;
};
SortPermutation sort_permutation(const std::vector<double>& omegas);

struct FrequencySample {
  std::vector<double> omegas;    // as drawn, index order
  std::vector<std::uint32_t> xi;  // ascending sort permutation
  std::vector<double> nu;        // quantile targets nu_n(i)
  std::uint64_t seed = 0;
  bool ties = false;
};

// omegas[i] = F^-1(U_i) with U_i from the per-index stream (seed, i);
// xi and nu filled as above. Reproducible under any evaluation order.
FrequencySample sample_iid(const FrequencyDistribution& dist, std::size_t n,
                           std::uint64_t seed);

// max_i |omegas[xi[i]] - nu[i]|, the sorted-sample deviation from the
// quantile targets.
double permutation_deviation(const FrequencySample& sample);

// Optional rotating-frame transform: shifts the frequencies to zero mean
// and reports the removed rotation rate. The library never re-centers
// implicitly.
struct RotatingFrame {
  std::vector<double> omegas;  // centered
  double rotation_rate = 0.0;  // the subtracted mean
};
RotatingFrame to_rotating_frame(const std::vector<double>& omegas);

// Left-continuous empirical CDF F_n(w) = #{i: omega_i < w} / n.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values);
  double operator()(double w) const;
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

// CSV export: index, omega, rank, nu (rank = ascending position of omega_i,
// nu = the quantile target paired with that rank).
void write_sample_csv(std::ostream& os, const FrequencySample& sample);

}  // namespace kmcl
