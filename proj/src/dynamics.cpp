#include "kmcl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dop853_tableau.hpp"
#include "kmcl/numerics.hpp"
#include "kmcl/rng.hpp"

namespace kmcl {

KMSystem::KMSystem(std::shared_ptr<const WeightMatrix> w,
                   std::vector<double> om, double k)
    : weights(std::move(w)), omegas(std::move(om)), coupling(k) {
  if (!weights) throw std::invalid_argument("KMSystem: null weight matrix");
  if (omegas.size() != weights->n()) {
    throw std::invalid_argument("KMSystem: omegas length != weights.n");
  }
  if (!std::isfinite(coupling)) {
    throw std::invalid_argument("KMSystem: coupling must be finite");
  }
}

namespace {

struct TrigCache {
  std::vector<double> s, c;
  void fill(const std::vector<double>& u) {
    s.resize(u.size());
    c.resize(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      s[j] = std::sin(u[j]);
      c[j] = std::cos(u[j]);
    }
  }
};

thread_local TrigCache g_trig;

}  // namespace

void rhs(const KMSystem& sys, const std::vector<double>& u,
         std::vector<double>& dudt) {
  const std::size_t n = sys.size();
  if (u.size() != n) throw std::invalid_argument("rhs: dimension mismatch");
  dudt.resize(n);
  const double gain = sys.edge_gain();
  g_trig.fill(u);
  const auto& s = g_trig.s;
  const auto& c = g_trig.c;

  const auto& storage = sys.weights->storage();
  if (const auto* uni = std::get_if<WeightMatrix::UniformStorage>(&storage)) {
    const double w = uni->value;
    for (std::size_t i = 0; i < n; ++i) {
      double ss = 0.0, sc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        ss += w * s[j];
        sc += w * c[j];
      }
      dudt[i] = sys.omegas[i] + gain * (c[i] * ss - s[i] * sc);
    }
    return;
  }
  if (const auto* d = std::get_if<WeightMatrix::DenseStorage>(&storage)) {
    const double* w = d->w.data();
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = w + i * n;
      double ss = 0.0, sc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        ss += row[j] * s[j];
        sc += row[j] * c[j];
      }
      dudt[i] = sys.omegas[i] + gain * (c[i] * ss - s[i] * sc);
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double ss = 0.0, sc = 0.0;
    for (auto j : sys.weights->row(i)) {
      ss += s[j];
      sc += c[j];
    }
    dudt[i] = sys.omegas[i] + gain * (c[i] * ss - s[i] * sc);
  }
}

std::vector<double> rhs(const KMSystem& sys, const std::vector<double>& u) {
  std::vector<double> out;
  rhs(sys, u, out);
  return out;
}

void rhs_meanfield(const KMSystem& sys, const std::vector<double>& u,
                   std::vector<double>& dudt) {
  if (!sys.weights->is_uniform()) {
    throw std::invalid_argument(
        "rhs_meanfield: weights are not a constant matrix");
  }
  const std::size_t n = sys.size();
  if (u.size() != n) {
    throw std::invalid_argument("rhs_meanfield: dimension mismatch");
  }
  dudt.resize(n);
  const double gain = sys.edge_gain() * sys.weights->uniform_value();
  g_trig.fill(u);
  const auto& s = g_trig.s;
  const auto& c = g_trig.c;
  double ss = 0.0, sc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    ss += s[j];
    sc += c[j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    dudt[i] = sys.omegas[i] + gain * (c[i] * ss - s[i] * sc);
  }
}

std::vector<double> rhs_meanfield(const KMSystem& sys,
                                  const std::vector<double>& u) {
  std::vector<double> out;
  rhs_meanfield(sys, u, out);
  return out;
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw std::invalid_argument("IntegratorConfig: rtol, atol must be > 0");
  }
  if (h_init < 0.0 || (h_init > 0.0 && h_init > h_max)) {
    throw std::invalid_argument("IntegratorConfig: need 0 <= h_init <= h_max");
  }
  if (!(h_max > 0.0)) {
    throw std::invalid_argument("IntegratorConfig: h_max must be > 0");
  }
  if (sample_stride < 0.0) {
    throw std::invalid_argument("IntegratorConfig: sample_stride >= 0");
  }
  if (method == IntegrationMethod::kRk4Fixed && !(rk4_step > 0.0)) {
    throw std::invalid_argument("IntegratorConfig: rk4_step must be > 0");
  }
}

namespace {

using RhsFn = void (*)(const KMSystem&, const std::vector<double>&,
                       std::vector<double>&);

double rms(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

std::vector<double> sample_times(double t0, double t_end, double stride) {
  std::vector<double> ts;
  if (stride > 0.0) {
    for (std::size_t k = 1;; ++k) {
      const double t = t0 + stride * static_cast<double>(k);
      if (t >= t_end - 1e-12 * std::max(1.0, std::abs(t_end))) break;
      ts.push_back(t);
    }
  }
  ts.push_back(t_end);
  return ts;
}

class Dop853Stepper {
 public:
  Dop853Stepper(const KMSystem& sys, RhsFn f, const IntegratorConfig& cfg,
                StepStats& stats)
      : sys_(sys), f_(f), cfg_(cfg), stats_(stats) {}

  void start(const PhaseState& u0) {
    y_ = u0.u;
    t_ = u0.t;
    const std::size_t n = y_.size();
    for (auto& k : k_) k.resize(n);
    ytmp_.resize(n);
    ynew_.resize(n);
    eval(y_, k_[0]);
    h_ = cfg_.h_init > 0.0 ? cfg_.h_init : initial_step();
    facold_ = 1e-4;
  }

  // Advances to exactly t_target, clamping the step to land on it.
  void advance_to(double t_target) {
    while (t_ < t_target) {
      const double span = t_target - t_;
      const bool hit = span <= h_ && span <= cfg_.h_max;
      const double h = hit ? span : std::min(h_, cfg_.h_max);
      const double hmin = 16.0 * std::numeric_limits<double>::epsilon() *
                          std::max(1.0, std::abs(t_));
      if (h < hmin) {
        throw IntegrationError(
            "integrate: step size underflow (stiffness or blow-up)", t_, h);
      }
      if (try_step(h)) {
        t_ = hit ? t_target : t_ + h;
        y_.swap(ynew_);
        k_[0].swap(k_[kStagesP1 - 1]);
        ++stats_.accepted;
      } else {
        ++stats_.rejected;
      }
    }
  }

  double t() const { return t_; }
  const std::vector<double>& y() const { return y_; }

 private:
  static constexpr int kStagesP1 = dop853::kStages + 1;

  void eval(const std::vector<double>& y, std::vector<double>& dydt) {
    f_(sys_, y, dydt);
    ++stats_.rhs_evals;
  }

  double initial_step() {
    const std::size_t n = y_.size();
    std::vector<double> scale(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      scale[i] = cfg_.atol + cfg_.rtol * std::abs(y_[i]);
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = y_[i] / scale[i];
    const double d0 = rms(v);
    for (std::size_t i = 0; i < n; ++i) v[i] = k_[0][i] / scale[i];
    const double d1 = rms(v);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    for (std::size_t i = 0; i < n; ++i) ytmp_[i] = y_[i] + h0 * k_[0][i];
    eval(ytmp_, k_[1]);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = (k_[1][i] - k_[0][i]) / scale[i];
    }
    const double d2 = rms(v) / h0;
    double h1;
    if (std::max(d1, d2) <= 1e-15) {
      h1 = std::max(1e-6, h0 * 1e-3);
    } else {
      h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 9.0);
    }
    return std::min({100.0 * h0, h1, cfg_.h_max});
  }

  bool try_step(double h) {
    const std::size_t n = y_.size();
    for (int s = 1; s < dop853::kStages; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) {
          acc += dop853::kA[s][j] * k_[j][i];
        }
        ytmp_[i] = y_[i] + h * acc;
      }
      eval(ytmp_, k_[s]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < dop853::kStages; ++j) {
        acc += dop853::kB[j] * k_[j][i];
      }
      ynew_[i] = y_[i] + h * acc;
    }
    eval(ynew_, k_[kStagesP1 - 1]);

    double e5 = 0.0, e3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc =
          cfg_.atol + cfg_.rtol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
      double a5 = 0.0, a3 = 0.0;
      for (int j = 0; j < kStagesP1; ++j) {
        a5 += dop853::kE5[j] * k_[j][i];
        a3 += dop853::kE3[j] * k_[j][i];
      }
      a5 /= sc;
      a3 /= sc;
      e5 += a5 * a5;
      e3 += a3 * a3;
    }
    double err = 0.0;
    if (e5 > 0.0 || e3 > 0.0) {
      const double denom = e5 + 0.01 * e3;
      err = std::abs(h) * e5 / std::sqrt(denom * static_cast<double>(n));
    }

    const double expo1 = 1.0 / 8.0 - cfg_.beta * 0.2;
    constexpr double kShrinkCap = 3.0;   // 1/0.333
    constexpr double kGrowthCap = 1.0 / 6.0;
    const double fac11 = err > 0.0 ? std::pow(err, expo1) : 0.0;
    if (err <= 1.0) {
      double fac = fac11 / std::pow(facold_, cfg_.beta);
      fac = std::max(kGrowthCap, std::min(kShrinkCap, fac / cfg_.safety));
      h_ = h / fac;
      facold_ = std::max(err, 1e-4);
      return true;
    }
    h_ = h / std::min(kShrinkCap, fac11 / cfg_.safety);
    return false;
  }

  const KMSystem& sys_;
  RhsFn f_;
  const IntegratorConfig& cfg_;
  StepStats& stats_;
  std::vector<double> y_, ynew_, ytmp_;
  std::vector<double> k_[kStagesP1];
  double t_ = 0.0;
  double h_ = 0.0;
  double facold_ = 1e-4;
};

void rk4_advance(const KMSystem& sys, RhsFn f, std::vector<double>& y,
                 double t0, double t_target, double step, StepStats& stats) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = t0;
  while (t < t_target) {
    const double h = std::min(step, t_target - t);
    f(sys, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(sys, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(sys, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    f(sys, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    stats.rhs_evals += 4;
    ++stats.accepted;
    t = (t_target - t <= step) ? t_target : t + h;
  }
}

}  // namespace

Trajectory integrate(const KMSystem& sys, const PhaseState& u0, double t_end,
                     const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(t_end > u0.t)) {
    throw std::invalid_argument("integrate: t_end must exceed u0.t");
  }
  if (u0.u.size() != sys.size()) {
    throw std::invalid_argument("integrate: state size mismatch");
  }
  const bool meanfield = cfg.use_meanfield && sys.weights->is_uniform();
  RhsFn f = meanfield ? static_cast<RhsFn>(&rhs_meanfield)
                      : static_cast<RhsFn>(&rhs);

  Trajectory traj;
  traj.times.push_back(u0.t);
  traj.states.push_back(u0.u);

  const auto targets = sample_times(u0.t, t_end, cfg.sample_stride);
  if (cfg.method == IntegrationMethod::kAdaptiveRk8) {
    Dop853Stepper stepper(sys, f, cfg, traj.stats);
    stepper.start(u0);
    for (double target : targets) {
      stepper.advance_to(target);
      traj.times.push_back(stepper.t());
      traj.states.push_back(stepper.y());
    }
  } else {
    std::vector<double> y = u0.u;
    double t = u0.t;
    for (double target : targets) {
      rk4_advance(sys, f, y, t, target, cfg.rk4_step, traj.stats);
      t = target;
      traj.times.push_back(t);
      traj.states.push_back(y);
    }
  }
  traj.final.t = traj.times.back();
  traj.final.u = traj.states.back();
  return traj;
}

LockResult lock_detect(const KMSystem& sys, const Trajectory& traj,
                       double window, double tol) {
  if (traj.times.empty()) {
    throw std::invalid_argument("lock_detect: empty trajectory");
  }
  const double t_last = traj.times.back();
  if (t_last - traj.times.front() < window) {
    throw std::invalid_argument("lock_detect: trajectory shorter than window");
  }
  LockResult out;
  std::vector<double> dudt;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] < t_last - window) continue;
    rhs(sys, traj.states[k], dudt);
    double mean = 0.0;
    for (double v : dudt) mean += v;
    mean /= static_cast<double>(dudt.size());
    double spread = 0.0;
    for (double v : dudt) spread = std::max(spread, std::abs(v - mean));
    out.frequency_spread = std::max(out.frequency_spread, spread);
  }
  out.locked = out.frequency_spread < tol;
  const auto& uf = traj.final.u;
  const double psi = circular_mean(uf);
  double lo = kPi, hi = -kPi;
  for (double u : uf) {
    const double d = wrap_pi(u - psi);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  out.phase_spread = hi - lo;
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::size_t node_stride) {
  if (node_stride == 0) node_stride = 1;
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  const std::size_t start = (node_stride - 1) / 2;
  os << "t";
  for (std::size_t i = start; i < n; i += node_stride) {
    os << ",u" << i + 1;
  }
  os << '\n';
  os.precision(17);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << traj.times[k];
    for (std::size_t i = start; i < n; i += node_stride) {
      os << ',' << wrap_pi(traj.states[k][i]);
    }
    os << '\n';
  }
}

std::vector<double> random_initial_phases(std::size_t n, std::uint64_t seed) {
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (2.0 * stream(seed, i).next_unit() - 1.0) * kPi;
  }
  return u;
}

}  // namespace kmcl
