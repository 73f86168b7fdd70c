// Command-line runner for the Kuramoto/continuum-limit scenarios. Every
// subcommand writes its CSV artifacts plus manifest.json and summary.json
// into --out-dir and exits nonzero when an in-run predicate fails.
// Parameters come from an optional JSON config (--config) with CLI flags
// taking precedence; unknown config keys are rejected.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kmcl/experiments.hpp"
#include "kmcl/numerics.hpp"

using nlohmann::json;
using namespace kmcl;
using namespace kmcl::experiments;

namespace {

json load_config(const std::string& path,
                 const std::set<std::string>& allowed) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  json cfg = json::parse(is);
  if (!cfg.is_object()) {
    throw std::runtime_error("config root must be a JSON object");
  }
  for (const auto& [key, value] : cfg.items()) {
    (void)value;
    if (!allowed.contains(key)) {
      throw std::runtime_error("unknown config key '" + key +
                               "' for this scenario");
    }
  }
  return cfg;
}

// Config value applies only when the flag was not passed on the command
// line (flags override the file).
template <typename T>
void fallback(const CLI::App* cmd, const std::string& flag, const json& cfg,
              const char* key, T& target) {
  if (!cmd->count(flag) && cfg.contains(key)) {
    target = cfg.at(key).get<T>();
  }
}

struct CommonFlags {
  std::string config;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 0;
  CLI::App* cmd = nullptr;

  void attach(CLI::App* c) {
    cmd = c;
    c->add_option("--config", config, "JSON config file (flags override)");
    c->add_option("--out-dir", out_dir, "output directory");
    c->add_option("--seed", seed, "master seed");
    c->add_option("--threads", threads,
                  "worker threads for sweeps (never affects results); "
                  "defaults to KMCL_THREADS or 1");
  }

  int resolve_threads() const {
    return threads > 0 ? threads : thread_count_from_env();
  }
  bool seed_given(const json& cfg) const {
    return cmd->count("--seed") > 0 || cfg.contains("seed");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kuramoto model and continuum-limit experiment runner"};
  app.require_subcommand(1);

  auto* sc = app.add_subcommand("selfconsistency",
                                "C versus pK/a curve of the stable family");
  CommonFlags scf;
  scf.attach(sc);
  double sc_min = 0.5, sc_max = 20.0;
  std::size_t sc_points = 200;
  std::vector<double> sc_grid;
  double sc_profile_kappa = 0.0;
  std::size_t sc_profile_mesh = 512;
  std::string sc_profile_family = "stable";
  sc->add_option("--grid-min", sc_min, "first pK/a value");
  sc->add_option("--grid-max", sc_max, "last pK/a value");
  sc->add_option("--grid-points", sc_points, "grid size");
  sc->add_option("--grid", sc_grid, "explicit pK/a values");
  sc->add_option("--profile-kappa", sc_profile_kappa,
                 "also export the stationary profile at this pK/a");
  sc->add_option("--profile-mesh", sc_profile_mesh, "profile mesh size");
  sc->add_option("--profile-family", sc_profile_family, "stable | flipped");

  auto* sim = app.add_subcommand("simulate",
                                 "one Kuramoto run with steady-state summary");
  CommonFlags simf;
  simf.attach(sim);
  std::string sim_case = "complete", sim_freq = "iid_uniform";
  SimulateParams sp;
  sim->add_option("--case", sim_case, "complete | random_dense | random_sparse");
  sim->add_option("--n", sp.n, "node count");
  sim->add_option("--K", sp.coupling, "coupling constant");
  sim->add_option("--a", sp.a, "frequency support width");
  sim->add_option("--p", sp.p, "edge probability / kernel constant");
  sim->add_option("--gamma", sp.gamma, "sparse exponent in (0, 1/2)");
  sim->add_option("--freq-mode", sim_freq, "equally_placed | iid_uniform");
  sim->add_option("--t-end", sp.t_end, "integration horizon");
  sim->add_option("--sample-stride", sp.sample_stride, "snapshot spacing");
  sim->add_option("--node-stride", sp.trajectory_node_stride,
                  "trajectory CSV node subset (0 = automatic)");

  auto* bif = app.add_subcommand("bifurcate",
                                 "steady-state phase gap over a K sweep");
  CommonFlags biff;
  biff.attach(bif);
  std::string bif_case = "complete", bif_freq = "equally_placed";
  SimulateParams bb;
  double k_min = 0.7, k_max = 2.0, k_step = 0.1;
  std::vector<double> k_extra;
  bif->add_option("--case", bif_case, "graph case");
  bif->add_option("--n", bb.n, "node count");
  bif->add_option("--K-min", k_min, "sweep start");
  bif->add_option("--K-max", k_max, "sweep end");
  bif->add_option("--K-step", k_step, "sweep step");
  bif->add_option("--K-extra", k_extra, "additional K values");
  bif->add_option("--a", bb.a, "frequency support width");
  bif->add_option("--p", bb.p, "edge probability");
  bif->add_option("--freq-mode", bif_freq, "frequency mode");
  bif->add_option("--t-end", bb.t_end, "integration horizon");

  auto* conv = app.add_subcommand(
      "convergence", "distance to the collocation reference as n grows");
  CommonFlags convf;
  convf.attach(conv);
  std::string conv_case = "complete", conv_freq = "equally_placed";
  ConvergenceParams cp;
  std::size_t conv_seeds = 1;
  conv->add_option("--case", conv_case, "graph case");
  conv->add_option("--freq-mode", conv_freq, "frequency mode");
  conv->add_option("--n-grid", cp.n_grid, "node counts (sorted)");
  conv->add_option("--seeds", conv_seeds, "number of seeds");
  conv->add_option("--K", cp.coupling, "coupling constant");
  conv->add_option("--a", cp.a, "frequency support width");
  conv->add_option("--p", cp.p, "edge probability");
  conv->add_option("--gamma", cp.gamma, "sparse exponent");
  conv->add_option("--t-end", cp.t_end, "horizon");
  conv->add_option("--m-ref", cp.m_ref, "reference collocation size");

  auto* perm = app.add_subcommand(
      "permutation", "sorted-sample deviation from quantile targets");
  CommonFlags permf;
  permf.attach(perm);
  PermutationParams pp;
  perm->add_option("--n-grid", pp.n_grid, "sample sizes (sorted)");
  perm->add_option("--a", pp.a, "support width");
  perm->add_option("--seeds", pp.seed_count, "number of seeds");

  auto* inst = app.add_subcommand(
      "instability", "perturb a stationary family and watch for escape");
  CommonFlags instf;
  instf.attach(inst);
  std::string inst_family = "flipped";
  std::vector<double> inst_flips;
  InstabilityParams ip;
  inst->add_option("--family", inst_family,
                   "stable | flipped | discontinuous");
  inst->add_option("--flip", inst_flips,
                   "flip interval bounds, lo hi pairs (discontinuous)");
  inst->add_option("--delta", ip.delta, "perturbation amplitude");
  inst->add_option("--epsilon", ip.epsilon, "escape radius");
  inst->add_option("--m", ip.m, "collocation points");
  inst->add_option("--t-max", ip.t_max, "time budget");
  inst->add_option("--K", ip.coupling, "coupling constant");
  inst->add_option("--a", ip.a, "frequency support width");
  inst->add_option("--p", ip.p, "kernel constant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc->parsed()) {
      const json cfg = load_config(
          scf.config, {"grid", "grid_min", "grid_max", "grid_points"});
      fallback(sc, "--grid-min", cfg, "grid_min", sc_min);
      fallback(sc, "--grid-max", cfg, "grid_max", sc_max);
      fallback(sc, "--grid-points", cfg, "grid_points", sc_points);
      fallback(sc, "--grid", cfg, "grid", sc_grid);
      if (sc_grid.empty()) {
        for (std::size_t k = 0; k < sc_points; ++k) {
          sc_grid.push_back(
              sc_points == 1
                  ? sc_min
                  : sc_min + (sc_max - sc_min) * static_cast<double>(k) /
                                 static_cast<double>(sc_points - 1));
        }
      }
      const bool ok =
          write_selfconsistency(scf.out_dir, sc_grid,
                                run_selfconsistency(sc_grid));
      if (sc_profile_kappa > 0.0) {
        const auto c = solve_C_linear(sc_profile_kappa);
        if (!c) throw std::runtime_error("no profile below the threshold");
        const SelfConsistencyProblem prob(FrequencyFunction::linear(1.0), 1.0,
                                          sc_profile_kappa);
        const auto family = sc_profile_family == "flipped"
                                ? StationaryFamily::kContinuousFlipped
                                : StationaryFamily::kContinuousStable;
        write_profile_csv(std::filesystem::path(scf.out_dir) / "profile.csv",
                          StationaryProfile(prob, *c, family, 0.0),
                          sc_profile_mesh);
      }
      return ok ? 0 : 1;
    }

    if (sim->parsed()) {
      const json cfg = load_config(
          simf.config,
          {"case", "n", "K", "a", "p", "gamma", "freq_mode", "seed", "t_end",
           "sample_stride", "node_stride", "lock_window", "lock_tol", "rtol",
           "atol"});
      fallback(sim, "--case", cfg, "case", sim_case);
      fallback(sim, "--freq-mode", cfg, "freq_mode", sim_freq);
      fallback(sim, "--n", cfg, "n", sp.n);
      fallback(sim, "--K", cfg, "K", sp.coupling);
      fallback(sim, "--a", cfg, "a", sp.a);
      fallback(sim, "--p", cfg, "p", sp.p);
      fallback(sim, "--gamma", cfg, "gamma", sp.gamma);
      fallback(sim, "--t-end", cfg, "t_end", sp.t_end);
      fallback(sim, "--sample-stride", cfg, "sample_stride", sp.sample_stride);
      fallback(sim, "--node-stride", cfg, "node_stride",
               sp.trajectory_node_stride);
      if (cfg.contains("lock_window")) sp.lock_window = cfg.at("lock_window");
      if (cfg.contains("lock_tol")) sp.lock_tol = cfg.at("lock_tol");
      if (cfg.contains("rtol")) sp.integrator.rtol = cfg.at("rtol");
      if (cfg.contains("atol")) sp.integrator.atol = cfg.at("atol");
      sp.seed = simf.seed;
      if (!sim->count("--seed") && cfg.contains("seed")) {
        sp.seed = cfg.at("seed").get<std::uint64_t>();
      }
      sp.graph_case = graph_case_from_string(sim_case);
      sp.freq_mode = freq_mode_from_string(sim_freq);
      const auto out = run_simulate(sp);
      const bool ok = write_simulate(simf.out_dir, sp, out);
      std::cout << (out.locked ? "locked" : "drifting")
                << ", r = " << out.order_parameter_r;
      if (out.aligned_distance) {
        std::cout << ", aligned distance = " << *out.aligned_distance;
      }
      std::cout << '\n';
      return ok ? 0 : 1;
    }

    if (bif->parsed()) {
      const json cfg = load_config(
          biff.config, {"case", "n", "K_min", "K_max", "K_step", "K_extra",
                        "a", "p", "freq_mode", "seed", "t_end"});
      fallback(bif, "--case", cfg, "case", bif_case);
      fallback(bif, "--freq-mode", cfg, "freq_mode", bif_freq);
      fallback(bif, "--n", cfg, "n", bb.n);
      fallback(bif, "--K-min", cfg, "K_min", k_min);
      fallback(bif, "--K-max", cfg, "K_max", k_max);
      fallback(bif, "--K-step", cfg, "K_step", k_step);
      fallback(bif, "--K-extra", cfg, "K_extra", k_extra);
      fallback(bif, "--a", cfg, "a", bb.a);
      fallback(bif, "--p", cfg, "p", bb.p);
      fallback(bif, "--t-end", cfg, "t_end", bb.t_end);
      BifurcateParams bp;
      bp.base = bb;
      bp.base.graph_case = graph_case_from_string(bif_case);
      bp.base.freq_mode = freq_mode_from_string(bif_freq);
      bp.base.seed = biff.seed;
      bp.threads = biff.resolve_threads();
      for (double k = k_min; k <= k_max + 1e-12; k += k_step) {
        bp.coupling_grid.push_back(k);
      }
      bp.coupling_grid.insert(bp.coupling_grid.end(), k_extra.begin(),
                              k_extra.end());
      std::sort(bp.coupling_grid.begin(), bp.coupling_grid.end());
      return write_bifurcate(biff.out_dir, bp, run_bifurcate(bp)) ? 0 : 1;
    }

    if (conv->parsed()) {
      const json cfg = load_config(
          convf.config, {"case", "freq_mode", "n_grid", "seeds", "K", "a",
                         "p", "gamma", "t_end", "m_ref", "sample_stride"});
      fallback(conv, "--case", cfg, "case", conv_case);
      fallback(conv, "--freq-mode", cfg, "freq_mode", conv_freq);
      fallback(conv, "--n-grid", cfg, "n_grid", cp.n_grid);
      fallback(conv, "--seeds", cfg, "seeds", conv_seeds);
      fallback(conv, "--K", cfg, "K", cp.coupling);
      fallback(conv, "--a", cfg, "a", cp.a);
      fallback(conv, "--p", cfg, "p", cp.p);
      fallback(conv, "--gamma", cfg, "gamma", cp.gamma);
      fallback(conv, "--t-end", cfg, "t_end", cp.t_end);
      fallback(conv, "--m-ref", cfg, "m_ref", cp.m_ref);
      if (cfg.contains("sample_stride")) {
        cp.sample_stride = cfg.at("sample_stride");
      }
      cp.graph_case = graph_case_from_string(conv_case);
      cp.freq_mode = freq_mode_from_string(conv_freq);
      cp.threads = convf.resolve_threads();
      cp.seeds.clear();
      for (std::size_t k = 0; k < conv_seeds; ++k) {
        cp.seeds.push_back(convf.seed + k);
      }
      return write_convergence(convf.out_dir, cp, run_convergence(cp)) ? 0 : 1;
    }

    if (perm->parsed()) {
      const json cfg =
          load_config(permf.config, {"n_grid", "a", "seed_count", "seed"});
      fallback(perm, "--n-grid", cfg, "n_grid", pp.n_grid);
      fallback(perm, "--a", cfg, "a", pp.a);
      fallback(perm, "--seeds", cfg, "seed_count", pp.seed_count);
      pp.seed = permf.seed;
      if (!perm->count("--seed") && cfg.contains("seed")) {
        pp.seed = cfg.at("seed").get<std::uint64_t>();
      }
      pp.threads = permf.resolve_threads();
      return write_permutation(permf.out_dir, pp, run_permutation(pp)) ? 0 : 1;
    }

    if (inst->parsed()) {
      const json cfg = load_config(
          instf.config, {"family", "flips", "delta", "epsilon", "m", "t_max",
                         "K", "a", "p"});
      fallback(inst, "--family", cfg, "family", inst_family);
      fallback(inst, "--delta", cfg, "delta", ip.delta);
      fallback(inst, "--epsilon", cfg, "epsilon", ip.epsilon);
      fallback(inst, "--m", cfg, "m", ip.m);
      fallback(inst, "--t-max", cfg, "t_max", ip.t_max);
      fallback(inst, "--K", cfg, "K", ip.coupling);
      fallback(inst, "--a", cfg, "a", ip.a);
      fallback(inst, "--p", cfg, "p", ip.p);
      if (inst->count("--flip")) {
        if (inst_flips.size() % 2 != 0) {
          throw std::runtime_error("--flip expects lo hi pairs");
        }
        for (std::size_t k = 0; k + 1 < inst_flips.size(); k += 2) {
          ip.flips.push_back({inst_flips[k], inst_flips[k + 1]});
        }
      } else if (cfg.contains("flips")) {
        for (const auto& f : cfg.at("flips")) {
          ip.flips.push_back(
              {f.at("lo").get<double>(), f.at("hi").get<double>()});
        }
      }
      if (inst_family == "stable") {
        ip.family = StationaryFamily::kContinuousStable;
      } else if (inst_family == "flipped") {
        ip.family = StationaryFamily::kContinuousFlipped;
      } else if (inst_family == "discontinuous") {
        ip.family = StationaryFamily::kDiscontinuous;
      } else {
        throw std::runtime_error("unknown family " + inst_family);
      }
      const auto out = run_instability(ip);
      const bool ok = write_instability(instf.out_dir, ip, out);
      std::cout << out.verdict << '\n';
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
