#include "kmcl/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kmcl/numerics.hpp"

namespace kmcl {

double mean_frequency(const FrequencyFunction& omega) {
  switch (omega.kind()) {
    case FrequencyKind::kLinear:
      return 0.0;
    case FrequencyKind::kConstant:
      return omega.constant_value();
    case FrequencyKind::kCallable:
      return simpson([&omega](double x) { return omega(x); }, 0.0, 1.0, 4096);
  }
  return 0.0;
}

namespace {

// arcsin z + z sqrt(1 - z^2), the normalized feasible-region integral.
double arc_area(double z) {
  z = std::clamp(z, 0.0, 1.0);
  return std::asin(z) + z * std::sqrt(std::max(0.0, 1.0 - z * z));
}

double g_linear(double kappa, double c) {
  const double z = std::min(1.0, 1.0 / (2.0 * kappa * c));
  return kappa * c * arc_area(z) - c;
}

}  // namespace

std::optional<double> solve_C_linear(double pk_over_a) {
  if (!(pk_over_a > 0.0)) {
    throw std::invalid_argument("solve_C_linear: pK/a must be > 0");
  }
  // Existence boundary kappa >= 2/pi, decided in kappa space; equivalent to
  // the sign of g(C_min) = pi/4 - 1/(2 kappa) without quadrature fuzz.
  const double kappa = pk_over_a;
  if (kappa < 2.0 / kPi) return std::nullopt;

  const double c_min = 1.0 / (2.0 * kappa);
  const double g_min = g_linear(kappa, c_min);
  double c;
  if (g_min <= 0.0) {
    // Root at the feasibility edge (threshold up to rounding).
    c = c_min;
  } else {
    c = bisect([kappa](double x) { return g_linear(kappa, x); }, c_min, 1.0,
               1e-16);
  }

  // Fixed-point cross-check from C = 1; the iteration contracts on the
  // existence region (slowly near the threshold, where it is skipped).
  double fp = 1.0;
  bool converged = false;
  for (int it = 0; it < 2000; ++it) {
    const double next =
        kappa * fp * arc_area(std::min(1.0, 1.0 / (2.0 * kappa * fp)));
    if (std::abs(next - fp) < 1e-13) {
      fp = next;
      converged = true;
      break;
    }
    fp = next;
  }
  if (converged && std::abs(fp - c) > 1e-8) {
    throw std::logic_error("solve_C_linear: bisection and fixed-point "
                           "solutions disagree");
  }
  return c;
}

SelfConsistencyProblem::SelfConsistencyProblem(
    FrequencyFunction omega, double p, double coupling,
    std::vector<FlipInterval> flip_set)
    : omega_(std::move(omega)),
      p_(p),
      coupling_(coupling),
      omega_mean_(mean_frequency(omega_)),
      flip_set_(std::move(flip_set)) {
  if (!(p_ > 0.0) || p_ > 1.0) {
    throw std::invalid_argument("SelfConsistencyProblem: p in (0, 1]");
  }
  if (!(coupling_ > 0.0)) {
    throw std::invalid_argument("SelfConsistencyProblem: K > 0");
  }
  std::sort(flip_set_.begin(), flip_set_.end(),
            [](const FlipInterval& a, const FlipInterval& b) {
              return a.lo < b.lo;
            });
  double prev_hi_lower = -1.0, prev_hi_upper = -1.0;
  for (const auto& f : flip_set_) {
    if (!(f.lo <= f.hi) || f.lo < 0.0 || f.hi > 1.0) {
      throw std::invalid_argument("FlipInterval: need 0 <= lo <= hi <= 1");
    }
    const bool upper = f.hi > 0.5;
    if (upper && f.lo < 0.5) {
      throw std::invalid_argument(
          "FlipInterval: interval must lie in [0,1/2] or [1/2,1]");
    }
    double& prev = upper ? prev_hi_upper : prev_hi_lower;
    if (f.lo < prev) {
      throw std::invalid_argument("FlipInterval: overlapping flip intervals");
    }
    prev = f.hi;
  }
}

namespace {

// Signed self-consistency integral minus C, split at flip boundaries.
class GeneralG {
 public:
  GeneralG(const SelfConsistencyProblem& prob, std::size_t mesh)
      : prob_(prob) {
    // Segment boundaries: 0, flip endpoints, 1; each segment carries sign
    // -1 inside a flip interval.
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& f : prob.flip_set()) {
      cuts.push_back(f.lo);
      cuts.push_back(f.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
      double sign = 1.0;
      for (const auto& f : prob.flip_set()) {
        if (mid >= f.lo && mid <= f.hi) {
          sign = -1.0;
          break;
        }
      }
      segments_.push_back({cuts[k], cuts[k + 1], sign});
    }
    // sup |omega - Omega| over an endpoint-inclusive mesh.
    if (mesh < 9) mesh = 9;
    double sup = 0.0;
    for (std::size_t k = 0; k < mesh; ++k) {
      const double x =
          static_cast<double>(k) / static_cast<double>(mesh - 1);
      sup = std::max(sup, std::abs(prob.omega()(x) - prob.mean()));
    }
    c_min_ = sup / prob.pk();
  }

  double c_min() const { return c_min_; }

  double operator()(double c) const { return eval(c, 1e-13); }
  double coarse(double c) const { return eval(c, 1e-8); }

 private:
  struct Segment {
    double lo, hi, sign;
  };

  double eval(double c, double tol) const {
    const double denom = prob_.pk() * c;
    auto integrand = [this, denom](double x) {
      const double q = (prob_.omega()(x) - prob_.mean()) / denom;
      return std::sqrt(std::max(0.0, 1.0 - q * q));
    };
    double acc = 0.0;
    for (const auto& seg : segments_) {
      if (seg.hi > seg.lo) {
        acc += seg.sign * adaptive_simpson(integrand, seg.lo, seg.hi, tol);
      }
    }
    return acc - c;
  }

  const SelfConsistencyProblem& prob_;
  std::vector<Segment> segments_;
  double c_min_ = 0.0;
};

// Quadrature sign slack for the existence decision at the feasibility edge.
constexpr double kExistTol = 1e-11;

}  // namespace

SelfConsistencyResult solve_C_general(const SelfConsistencyProblem& problem,
                                      std::size_t mesh) {
  GeneralG g(problem, mesh);
  SelfConsistencyResult out;

  const double c_min = g.c_min();
  if (c_min == 0.0) {
    // Constant frequency function: integrand is identically 1.
    double total = 1.0;
    for (const auto& f : problem.flip_set()) total -= 2.0 * (f.hi - f.lo);
    if (total > 0.0) {
      out.C = total;
      out.sign_changes = 1;
    }
    return out;
  }

  // Multiplicity scan (coarse quadrature; sign structure only).
  constexpr int kScan = 1024;
  double prev = g.coarse(c_min);
  double bracket_lo = c_min, bracket_hi = c_min;
  bool have_bracket = false;
  for (int k = 1; k <= kScan; ++k) {
    const double c =
        c_min + (1.0 - c_min) * static_cast<double>(k) / kScan;
    const double val = g.coarse(c);
    if ((val > 0.0) != (prev > 0.0)) {
      ++out.sign_changes;
      if (!have_bracket) {
        bracket_lo = c_min + (1.0 - c_min) * static_cast<double>(k - 1) / kScan;
        bracket_hi = c;
        have_bracket = true;
      }
    }
    prev = val;
  }

  if (have_bracket) {
    // Re-verify the coarse bracket with accurate quadrature before
    // refining; a failed check falls through to the standard bracket.
    const double ga = g(bracket_lo);
    const double gb = g(bracket_hi);
    if (ga == 0.0 || gb == 0.0 || (ga > 0.0) != (gb > 0.0)) {
      out.C = bisect([&g](double c) { return g(c); }, bracket_lo, bracket_hi,
                     1e-14);
      return out;
    }
  }
  const double g_min = g(c_min);
  const double g_one = g(1.0);
  if (g_min >= 0.0 && g_one <= 0.0) {
    out.C = bisect([&g](double c) { return g(c); }, c_min, 1.0, 1e-14);
    if (out.sign_changes == 0) out.sign_changes = 1;
  } else if (std::abs(g_min) <= kExistTol) {
    // Root at the feasibility edge (threshold up to quadrature tolerance).
    out.C = c_min;
    if (out.sign_changes == 0) out.sign_changes = 1;
  }
  return out;
}

StationaryProfile::StationaryProfile(SelfConsistencyProblem problem, double C,
                                     StationaryFamily family, double theta)
    : problem_(std::move(problem)), C_(C), family_(family), theta_(theta) {
  if (!(C_ > 0.0)) {
    throw std::invalid_argument("StationaryProfile: C must be > 0");
  }
  if (family_ != StationaryFamily::kDiscontinuous &&
      !problem_.flip_set().empty()) {
    throw std::invalid_argument(
        "StationaryProfile: flip set requires the discontinuous family");
  }
  // Feasibility |omega - Omega| <= pKC on a mesh (small slack for the
  // threshold case where the edge of the arcsin domain is attained).
  const double bound = problem_.pk() * C_ * (1.0 + 1e-9);
  for (double x : cell_midpoints(512)) {
    if (std::abs(problem_.omega()(x) - problem_.mean()) > bound) {
      throw std::domain_error(
          "StationaryProfile: |omega - Omega| exceeds pKC");
    }
  }
}

double StationaryProfile::base(double x) const {
  const double q =
      (problem_.omega()(x) - problem_.mean()) / (problem_.pk() * C_);
  return std::asin(std::clamp(q, -1.0, 1.0));
}

double StationaryProfile::operator()(double x) const {
  switch (family_) {
    case StationaryFamily::kContinuousStable:
      return base(x) + theta_;
    case StationaryFamily::kContinuousFlipped:
      return kPi - base(x) + theta_;
    case StationaryFamily::kDiscontinuous:
      for (const auto& f : problem_.flip_set()) {
        if (x >= f.lo && x <= f.hi) {
          return f.upper() ? kPi - base(x) + theta_ : -base(x) - kPi + theta_;
        }
      }
      return base(x) + theta_;
  }
  return base(x) + theta_;
}

std::function<double(double)> StationaryProfile::evaluator() const {
  return [*this](double x) { return (*this)(x); };
}

double StationaryProfile::stationarity_residual(std::size_t mesh) const {
  // du/dt(x) = omega(x) + pK [cos u(x) * int sin u - sin u(x) * int cos u];
  // stationary families satisfy du/dt = Omega everywhere.
  std::vector<double> cuts{0.0, 1.0};
  for (const auto& f : problem_.flip_set()) {
    cuts.push_back(f.lo);
    cuts.push_back(f.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double int_sin = 0.0, int_cos = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    int_sin += adaptive_simpson(
        [this](double y) { return std::sin((*this)(y)); }, cuts[k],
        cuts[k + 1], 1e-12);
    int_cos += adaptive_simpson(
        [this](double y) { return std::cos((*this)(y)); }, cuts[k],
        cuts[k + 1], 1e-12);
  }
  double worst = 0.0;
  for (double x : cell_midpoints(mesh)) {
    const double u = (*this)(x);
    const double dudt =
        problem_.omega()(x) +
        problem_.pk() * (std::cos(u) * int_sin - std::sin(u) * int_cos);
    worst = std::max(worst, std::abs(dudt - problem_.mean()));
  }
  return worst;
}

std::vector<double> StationaryProfile::collocate(std::size_t m) const {
  std::vector<double> u(m);
  const auto xs = cell_midpoints(m);
  for (std::size_t i = 0; i < m; ++i) u[i] = (*this)(xs[i]);
  return u;
}

StationaryProfile stationary_profile(const SelfConsistencyProblem& problem,
                                     double C, StationaryFamily family,
                                     double theta) {
  // C must solve the family's self-consistency equation: the signed one for
  // discontinuous families, the plain one for both continuous families.
  const SelfConsistencyProblem check_problem =
      family == StationaryFamily::kDiscontinuous
          ? problem
          : SelfConsistencyProblem(problem.omega(), problem.p(),
                                   problem.coupling());
  GeneralG g(check_problem, 4097);
  if (std::abs(g(C)) > 1e-8) {
    throw std::invalid_argument(
        "stationary_profile: C does not solve the self-consistency equation "
        "for this family");
  }
  return StationaryProfile(problem, C, family, theta);
}

std::optional<double> delta_u_prediction(double coupling, double a, double p) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("delta_u_prediction: a must be > 0");
  }
  const auto c = solve_C_linear(p * coupling / a);
  if (!c) return std::nullopt;
  const double z = std::min(1.0, a / (2.0 * p * coupling * *c));
  return 2.0 * std::asin(z);
}

KMSystem cl_collocation_system(const FrequencyFunction& omega, double p,
                               double coupling, std::size_t m) {
  if (m < 2) {
    throw std::invalid_argument("cl_collocation_system: m must be >= 2");
  }
  auto weights =
      std::make_shared<WeightMatrix>(build_deterministic_dense(
          Graphon::uniform(p), m));
  return KMSystem(std::move(weights), discretize(omega, m), coupling);
}

Trajectory cl_reference_trajectory(const FrequencyFunction& omega, double p,
                                   double coupling, std::size_t m,
                                   const std::function<double(double)>& u0,
                                   double t_end, const IntegratorConfig& cfg) {
  const KMSystem sys = cl_collocation_system(omega, p, coupling, m);
  PhaseState initial;
  initial.t = 0.0;
  initial.u = discretize(FrequencyFunction::callable(u0, "initial data"), m);
  return integrate(sys, initial, t_end, cfg);
}

}  // namespace kmcl
