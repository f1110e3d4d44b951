#include "dbwave/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

namespace dbwave {

namespace {

using nlohmann::json;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

bool wants_thresholds(const RunConfig& c) { return c.model.source_on && c.model.p > 2.0; }

struct Setup {
  Mesh1D mesh;
  AssembledOperators ops;
  InitialData init;
};

Setup setup(const RunConfig& c) {
  const ValidationReport report = validate(c.model, 1);
  if (!report.ok()) throw std::invalid_argument(report.first_failure());
  Mesh1D mesh = Mesh1D::uniform(c.mesh_n);
  AssembledOperators ops = assemble(mesh, c.quadrature_order);
  InitialData init = make_initial_data(c.displacement, c.velocity, mesh);
  return {std::move(mesh), std::move(ops), std::move(init)};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// CSV field: quoted only when it would break the row.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch == '\n' || ch == '\r' ? ' ' : ch;
  }
  return q + "\"";
}

std::string optional_field(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : ""; }

}  // namespace

ThresholdConstants compute_thresholds(const RunConfig& c) {
  const double p = c.model.p;
  if (!(p > 2.0)) throw std::invalid_argument(fmt::format("p > 2 required (got p = {})", p));
  if (c.thresholds.inject_B) {
    if (!(*c.thresholds.inject_B > 0.0)) throw std::invalid_argument("injected B must be positive");
    return make_thresholds(*c.thresholds.inject_B, p);
  }
  EmbeddingOptions opt;
  opt.restarts = c.thresholds.restarts;
  opt.seed = c.seed;
  const EmbeddingResult e =
      embedding_constant(p, Mesh1D::uniform(c.thresholds.mesh_n), c.thresholds.space, opt);
  return make_thresholds(e, p);
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"alpha", c.model.alpha},
                {"r", c.model.r},
                {"p", c.model.p},
                {"m", c.model.m},
                {"strict_theorem_mode", c.model.strict_theorem_mode},
                {"source_on", c.model.source_on}};
  j["mesh"] = {{"n_elem", c.mesh_n}, {"quadrature_order", c.quadrature_order}};
  j["initial"] = {{"profile", to_string(c.displacement.kind)},
                  {"amplitude", c.displacement.amplitude},
                  {"velocity_profile", to_string(c.velocity.kind)},
                  {"velocity_amplitude", c.velocity.amplitude}};
  j["time"] = {{"dt", c.time.dt},
               {"t_end", c.time.t_end},
               {"newton_tol", c.time.newton_tol},
               {"newton_max_iter", c.time.newton_max_iter},
               {"output_every", c.time.output_every},
               {"blowup_guard", c.time.blowup_guard},
               {"jacobian_eta", c.time.jacobian_eta}};
  j["diagnostics"] = {{"epsilon", c.diagnostics.aux.epsilon},
                      {"auto_epsilon", c.diagnostics.aux.auto_epsilon},
                      {"fit_lo", c.diagnostics.fit_lo},
                      {"fit_hi", c.diagnostics.fit_hi},
                      {"floor_tol", c.diagnostics.floor_tol},
                      {"fit_channel", to_string(c.diagnostics.fit_channel)}};
  j["thresholds"] = {{"space", to_string(c.thresholds.space)},
                     {"mesh_n", c.thresholds.mesh_n},
                     {"restarts", c.thresholds.restarts},
                     {"inject_B", optional_number(c.thresholds.inject_B)}};
  j["experiment"] = {{"kind", c.kind}, {"out_dir", c.out_dir}, {"seed", c.seed}};
  j["sweep"] = {{"amplitudes", c.sweep.amplitudes}, {"alphas", c.sweep.alphas}, {"rs", c.sweep.rs}};
  j["picard"] = {{"k_max", c.picard.k_max}, {"tol", c.picard.tol}, {"horizons", c.picard.horizons}};
  j["oracle"] = {{"n_modes", c.oracle.n_modes},
                 {"generator", to_string(c.oracle.generator)},
                 {"ode_tol", c.oracle.ode_tol}};
  return j;
}

json to_json(const ThresholdConstants& th) {
  const auto& pv = th.provenance;
  json prov = {{"injected", pv.injected}};
  if (!pv.injected) {
    prov["space"] = to_string(pv.space);
    prov["mesh_elements"] = pv.mesh_elements;
    prov["restarts"] = pv.restarts;
    prov["seed"] = pv.seed;
    prov["best_restart"] = pv.best_restart;
    prov["iterations"] = pv.iterations;
    prov["final_step"] = pv.final_step;
    prov["method"] = "projected gradient ascent on ||u_x|| = 1";
  }
  prov["alpha2_rule"] = "root above alpha1 of lambda^2/2 - B^p lambda^p / p = E(0)";
  return {{"p", th.p},
          {"B", th.B},
          {"alpha1", th.alpha1},
          {"d", th.d},
          {"alpha2", optional_number(th.alpha2)},
          {"provenance", prov}};
}

std::string trajectory_csv(const std::vector<EnergyReport>& reports) {
  std::string out = trajectory_header;
  out += '\n';
  for (const auto& r : reports)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.t, r.l2_u, r.h1semi_u, r.lp_u_p, r.l2_ut,
                       r.l2g1_ut, r.E, r.H, r.L, r.identity_residual);
  return out;
}

RunOutcome simulate(const RunConfig& c, const std::optional<ThresholdConstants>& thresholds) {
  const Setup s = setup(c);
  RunOutcome out;
  if (wants_thresholds(c)) out.thresholds = thresholds ? *thresholds : compute_thresholds(c);

  RunDiagnostics diag;
  diag.aux = c.diagnostics.aux;
  if (out.thresholds) diag.depth = out.thresholds->d;
  out.trajectory = run(s.init, s.ops, c.model, c.time, diag);

  const auto& reports = out.trajectory.reports;
  out.E0 = reports.front().E;
  out.grad_u0 = reports.front().h1semi_u;
  for (const auto& r : reports) out.identity_residual_max = std::max(out.identity_residual_max, r.identity_residual);

  if (out.thresholds) {
    auto& th = *out.thresholds;
    if (out.E0 <= th.d) th.alpha2 = alpha2(out.E0, th.B, th.p).value;
    try {
      out.floor_violations = vitillaro_floor_check(reports, th, c.diagnostics.floor_tol).size();
    } catch (const HypothesisNotMet& e) {
      out.floor_note = e.what();
    }
  } else {
    out.floor_note = "no well constants for this configuration";
  }

  if (c.diagnostics.fit_channel == GrowthChannel::L && !out.thresholds) {
    out.fit_error = "L requires well constants";
  } else if (c.diagnostics.fit_channel == GrowthChannel::L && std::isnan(out.trajectory.epsilon)) {
    out.fit_error = fmt::format("L undefined since H(0) = {} <= 0", out.thresholds->d - out.E0);
  } else {
    const double T = out.trajectory.final_time();
    try {
      out.fit = growth_fit(reports, c.diagnostics.fit_channel, c.diagnostics.fit_lo * T,
                           c.diagnostics.fit_hi * T);
    } catch (const std::exception& e) {
      out.fit_error = e.what();
    }
  }
  return out;
}

RunOutcome cmd_run(const RunConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto start = std::chrono::steady_clock::now();
  json manifest;
  manifest["version"] = version;
  manifest["kind"] = "run";
  manifest["config"] = to_json(c);
  auto finish = [&](const char* status) {
    manifest["status"] = status;
    manifest["wall_clock_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  };

  try {
    RunOutcome out = simulate(c);
    const Trajectory& tr = out.trajectory;
    write_file(dir / "trajectory.csv", trajectory_csv(tr.reports));

    manifest["thresholds"] = out.thresholds ? to_json(*out.thresholds) : json(nullptr);
    manifest["termination"] = {{"cause", to_string(tr.cause)},
                               {"message", tr.message},
                               {"t_final", tr.final_time()},
                               {"samples", tr.reports.size()}};
    manifest["epsilon"] = std::isnan(tr.epsilon) ? json(nullptr) : json(tr.epsilon);
    json hyp = {{"E0", out.E0}, {"grad_u0", out.grad_u0}};
    if (out.thresholds) {
      hyp["E0_below_d"] = out.E0 < out.thresholds->d;
      hyp["grad_above_alpha1"] = out.grad_u0 > out.thresholds->alpha1;
    }
    manifest["hypotheses"] = hyp;
    json fit = {{"channel", to_string(c.diagnostics.fit_channel)},
                {"window", {c.diagnostics.fit_lo * tr.final_time(), c.diagnostics.fit_hi * tr.final_time()}}};
    if (out.fit) {
      fit["mu_hat"] = out.fit->mu_hat;
      fit["r_squared"] = out.fit->r_squared;
      fit["n_samples"] = out.fit->n_samples;
    } else {
      fit["mu_hat"] = nullptr;
      fit["r_squared"] = nullptr;
      fit["error"] = out.fit_error;
    }
    manifest["growth_fit"] = fit;
    manifest["mu_hat"] = fit["mu_hat"];
    manifest["r_squared"] = fit["r_squared"];
    json inv = {{"identity_residual_max", out.identity_residual_max}};
    if (out.floor_violations)
      inv["vitillaro_violations"] = *out.floor_violations;
    else {
      inv["vitillaro_violations"] = nullptr;
      inv["vitillaro_note"] = out.floor_note;
    }
    manifest["invariants"] = inv;
    finish("ok");
    return out;
  } catch (const std::exception& e) {
    manifest["error"] = e.what();
    finish("failed");
    throw;
  }
}

ThresholdConstants cmd_thresholds(const RunConfig& c, const std::filesystem::path& dir) {
  ThresholdConstants th = compute_thresholds(c);
  std::filesystem::create_directories(dir);
  json j = to_json(th);
  j["version"] = version;
  write_file(dir / "thresholds.json", j.dump(2) + "\n");
  return th;
}

std::vector<SweepRow> run_sweep(const RunConfig& c, int jobs) {
  const std::vector<double> amps =
      c.sweep.amplitudes.empty() ? std::vector<double>{c.displacement.amplitude} : c.sweep.amplitudes;
  const std::vector<double> alphas = c.sweep.alphas.empty() ? std::vector<double>{c.model.alpha} : c.sweep.alphas;
  const std::vector<double> rs = c.sweep.rs.empty() ? std::vector<double>{c.model.r} : c.sweep.rs;

  std::optional<ThresholdConstants> th;
  if (wants_thresholds(c)) th = compute_thresholds(c);

  std::vector<SweepRow> rows;
  for (double a : amps)
    for (double al : alphas)
      for (double r : rs) {
        SweepRow row;
        row.cell = rows.size();
        row.amplitude = a;
        row.alpha = al;
        row.r = r;
        row.p = c.model.p;
        row.m = c.model.m;
        rows.push_back(row);
      }

  auto work = [&](SweepRow& row) {
    RunConfig cell = c;
    cell.displacement.amplitude = row.amplitude;
    cell.model.alpha = row.alpha;
    cell.model.r = row.r;
    try {
      const RunOutcome out = simulate(cell, th);
      row.E0 = out.E0;
      row.grad_u0 = out.grad_u0;
      row.termination = to_string(out.trajectory.cause);
      row.t_final = out.trajectory.final_time();
      if (out.fit) {
        row.mu_hat = out.fit->mu_hat;
        row.r_squared = out.fit->r_squared;
      } else {
        row.error = out.fit_error;
      }
    } catch (const std::exception& e) {
      row.termination = "error";
      row.error = e.what();
    }
    if (th) {
      row.E0_below_d = row.E0 < th->d;
      row.grad_above_alpha1 = row.grad_u0 > th->alpha1;
    }
  };

  const int n_threads = std::clamp(jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency()), 1,
                                   std::max<int>(1, static_cast<int>(rows.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) work(rows[i]);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = sweep_header;
  out += '\n';
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.cell, r.amplitude, r.alpha, r.r, r.p,
                       r.m, r.E0, r.grad_u0, r.E0_below_d, r.grad_above_alpha1, r.termination, r.t_final,
                       optional_field(r.mu_hat), optional_field(r.r_squared), csv_field(r.error));
  return out;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& c, const std::filesystem::path& dir, int jobs) {
  std::filesystem::create_directories(dir);
  if (wants_thresholds(c)) {
    json j = to_json(compute_thresholds(c));
    j["version"] = version;
    write_file(dir / "thresholds.json", j.dump(2) + "\n");
  }
  std::vector<SweepRow> rows = run_sweep(c, jobs);
  write_file(dir / "sweep_summary.csv", sweep_csv(rows));
  return rows;
}

std::vector<PicardStudy> run_picard(const RunConfig& c) {
  const Setup s = setup(c);
  std::vector<PicardStudy> studies;
  for (double T : c.picard.horizons) {
    StepControl ctl = c.time;
    ctl.t_end = T;
    ctl.output_every = 1;
    PicardStudy st;
    st.horizon = T;
    st.run = picard_iterate(s.init, s.ops, c.model, ctl, c.picard.k_max, c.picard.tol);
    const Trajectory direct = run(s.init, s.ops, c.model, ctl);
    if (direct.cause == TerminationCause::t_end && direct.samples.size() == st.run.iterates.back().size())
      st.direct_gap = yt_distance(st.run.iterates.back(), direct.samples, s.ops, c.model.m).value;
    else
      st.direct_gap = std::numeric_limits<double>::quiet_NaN();
    studies.push_back(std::move(st));
  }
  return studies;
}

std::vector<PicardStudy> cmd_picard(const RunConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<PicardStudy> studies = run_picard(c);

  std::string csv = "horizon,k,distance,ratio\n";
  json list = json::array();
  std::vector<double> log_t, medians;
  for (const auto& st : studies) {
    const auto& d = st.run.distances;
    for (std::size_t k = 0; k < d.size(); ++k)
      csv += fmt::format("{},{},{},{}\n", st.horizon, k + 1, d[k],
                         k == 0 ? std::string() : fmt::format("{}", st.run.ratios[k - 1]));
    const double med = st.run.median_ratio();
    if (med > 0.0 && st.horizon > 0.0) {
      log_t.push_back(std::log(st.horizon));
      medians.push_back(med);
    }
    list.push_back({{"horizon", st.horizon},
                    {"converged", st.run.converged},
                    {"iterations", d.size()},
                    {"d1", d.empty() ? json(nullptr) : json(d.front())},
                    {"median_ratio", med},
                    {"ratios", st.run.ratios},
                    {"radius", st.run.radius},
                    {"direct_gap", std::isnan(st.direct_gap) ? json(nullptr) : json(st.direct_gap)}});
  }
  json j = {{"version", version}, {"config", to_json(c)}, {"studies", list}};
  // Slope of log(median ratio) against log T.
  try {
    j["log_median_ratio_slope"] = growth_fit(log_t, medians).mu_hat;
  } catch (const std::exception&) {
    j["log_median_ratio_slope"] = nullptr;
  }
  write_file(dir / "picard.csv", csv);
  write_file(dir / "picard.json", j.dump(2) + "\n");
  return studies;
}

std::vector<OracleRow> run_oracle_compare(const RunConfig& c) {
  const Setup s = setup(c);
  const Trajectory fem = run(s.init, s.ops, c.model, c.time);
  std::vector<double> times;
  for (const auto& st : fem.samples) times.push_back(st.t);

  std::vector<OracleRow> rows;
  for (int n : c.oracle.n_modes) {
    OracleRow row;
    row.n_modes = n;
    try {
      const SpectralBasis basis = build_basis(n, c.oracle.generator);
      SpectralOptions opt;
      opt.abs_tol = opt.rel_tol = c.oracle.ode_tol;
      const SpectralTrajectory sp =
          spectral_solve(basis, c.model, c.displacement, c.velocity, SpectralMode::direct, times, opt);
      row.gap = fem_spectral_gap(fem, s.ops, sp, basis);
      if (times.size() >= 2) row.identity_residual = spectral_identity_residual(sp, basis, c.model);
    } catch (const std::exception& e) {
      row.gap = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<OracleRow> cmd_oracle_compare(const RunConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<OracleRow> rows = run_oracle_compare(c);
  std::string csv = "n_modes,generator,gap,identity_residual,error\n";
  for (const auto& r : rows)
    csv += fmt::format("{},{},{},{},{}\n", r.n_modes, to_string(c.oracle.generator), r.gap, r.identity_residual,
                       csv_field(r.error));
  write_file(dir / "oracle_compare.csv", csv);
  return rows;
}

}  // namespace dbwave
