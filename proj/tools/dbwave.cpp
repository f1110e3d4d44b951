// Command line driver: run, thresholds, sweep, picard, oracle-compare.

#include "dbwave/experiments.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <optional>

using namespace dbwave;

namespace {

struct Common {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config_path, "run configuration file");
  if (config_required) opt->required();
  opt->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output directory (default: experiment.out_dir)");
  sub->add_option("--seed", c.seed, "seed for the embedding restarts");
}

RunConfig resolve(const Common& c, RunConfig base = {}) {
  RunConfig cfg = c.config_path.empty() ? base : load_config(c.config_path);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

void print_thresholds(const ThresholdConstants& th) {
  fmt::print("p       = {}\nB       = {:.12g}\nalpha1  = {:.12g}\nd       = {:.12g}\n", th.p, th.B, th.alpha1,
             th.d);
  if (th.provenance.injected)
    fmt::print("source  = injected\n");
  else
    fmt::print("source  = {} on {} elements, restart {} of {}\n", to_string(th.provenance.space),
               th.provenance.mesh_elements, th.provenance.best_restart, th.provenance.restarts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped wave equation with dynamic boundary: simulations and well diagnostics"};
  app.require_subcommand(1);

  Common run_opts, th_opts, sweep_opts, picard_opts, oracle_opts;

  auto* run_cmd = app.add_subcommand("run", "integrate one configuration");
  add_common(run_cmd, run_opts, true);

  auto* th_cmd = app.add_subcommand("thresholds", "embedding constant and well constants");
  add_common(th_cmd, th_opts, false);
  std::optional<double> th_p, th_inject;
  std::optional<int> th_mesh;
  std::optional<std::string> th_space;
  th_cmd->add_option("--p", th_p, "source exponent");
  th_cmd->add_option("--mesh-n", th_mesh, "elements of the discrete space");
  th_cmd->add_option("--space", th_space, "H01 or H1_Gamma0")->check(CLI::IsMember({"H01", "H1_Gamma0"}));
  th_cmd->add_option("--inject-b", th_inject, "use this B instead of computing it");

  auto* sweep_cmd = app.add_subcommand("sweep", "grid of runs over amplitude, alpha and r");
  add_common(sweep_cmd, sweep_opts, true);
  int jobs = 1;
  sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* picard_cmd = app.add_subcommand("picard", "contraction study of the frozen-source map");
  add_common(picard_cmd, picard_opts, true);

  auto* oracle_cmd = app.add_subcommand("oracle-compare", "FEM against the spectral Galerkin oracle");
  add_common(oracle_cmd, oracle_opts, true);
  std::vector<int> n_modes;
  oracle_cmd->add_option("--n-modes", n_modes, "mode counts to compare");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const RunConfig cfg = resolve(run_opts);
      const RunOutcome out = cmd_run(cfg, cfg.out_dir);
      const Trajectory& tr = out.trajectory;
      fmt::print("termination {} at t = {}\n", to_string(tr.cause), tr.final_time());
      if (!tr.message.empty()) fmt::print("  {}\n", tr.message);
      fmt::print("E(0) = {:.10g}, ||u0_x|| = {:.10g}\n", out.E0, out.grad_u0);
      if (out.fit)
        fmt::print("mu_hat = {:.6g}, R^2 = {:.6f}\n", out.fit->mu_hat, out.fit->r_squared);
      else
        fmt::print("growth fit: {}\n", out.fit_error);
      fmt::print("max identity residual = {:.3e}\n", out.identity_residual_max);
      fmt::print("wrote {}/trajectory.csv and manifest.json\n", cfg.out_dir);
    } else if (*th_cmd) {
      RunConfig cfg = resolve(th_opts);
      if (th_p) cfg.model.p = *th_p;
      if (th_mesh) cfg.thresholds.mesh_n = *th_mesh;
      if (th_space) cfg.thresholds.space = embedding_space_from_string(*th_space);
      if (th_inject) cfg.thresholds.inject_B = *th_inject;
      const ThresholdConstants th = cmd_thresholds(cfg, cfg.out_dir);
      print_thresholds(th);
      fmt::print("wrote {}/thresholds.json\n", cfg.out_dir);
    } else if (*sweep_cmd) {
      const RunConfig cfg = resolve(sweep_opts);
      const auto rows = cmd_sweep(cfg, cfg.out_dir, jobs);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.termination == "error";
      fmt::print("{} cells ({} failed) -> {}/sweep_summary.csv\n", rows.size(), failed, cfg.out_dir);
    } else if (*picard_cmd) {
      const RunConfig cfg = resolve(picard_opts);
      for (const auto& st : cmd_picard(cfg, cfg.out_dir))
        fmt::print("T = {:<6} iterations {:>3} converged {} median ratio {:.3e} direct gap {:.3e}\n", st.horizon,
                   st.run.distances.size(), st.run.converged, st.run.median_ratio(), st.direct_gap);
      fmt::print("wrote {}/picard.csv and picard.json\n", cfg.out_dir);
    } else if (*oracle_cmd) {
      RunConfig cfg = resolve(oracle_opts);
      if (!n_modes.empty()) cfg.oracle.n_modes = n_modes;
      for (const auto& r : cmd_oracle_compare(cfg, cfg.out_dir)) {
        if (r.error.empty())
          fmt::print("n_modes {:>3}  gap {:.3e}\n", r.n_modes, r.gap);
        else
          fmt::print("n_modes {:>3}  {}\n", r.n_modes, r.error);
      }
      fmt::print("wrote {}/oracle_compare.csv\n", cfg.out_dir);
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
