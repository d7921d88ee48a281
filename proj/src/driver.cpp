#include "driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "errors.hpp"
#include "lsrk.hpp"
#include "snapshot.hpp"

namespace sdg {

namespace {

struct StepPlan {
  double dt = 0.0;
  long n_steps = 0;
};

StepPlan plan_steps(const RunConfig& cfg, const Mesh& mesh, const NodeSet& ns,
                    const GlobalField& initial, double dt_cap = 0.0) {
  StepPlan plan;
  double dt = cfg.fixed_dt > 0.0 ? cfg.fixed_dt
                                 : global_dt(mesh, ns, initial, cfg.gas, cfg.cfl);
  if (dt_cap > 0.0) dt = std::min(dt, dt_cap);
  if (cfg.n_steps > 0) {
    plan.n_steps = cfg.n_steps;
    plan.dt = dt;
    return plan;
  }
  plan.n_steps = std::max(1L, static_cast<long>(std::ceil(cfg.end_time / dt - 1e-12)));
  plan.dt = cfg.end_time / static_cast<double>(plan.n_steps);
  return plan;
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

}  // namespace

CaseReport run_case(const RunConfig& cfg, bool write_outputs) {
  const Mesh mesh(cfg.mesh);
  const NodeSet ns(cfg.degree, cfg.node_kind);
  const BasisOperators basis = build_basis_operators(ns);
  const SolverConfig scfg{cfg.gas, cfg.flow_case};

  const GlobalField initial = sample_case(mesh, ns, cfg.flow_case, cfg.gas, 0.0);
  const StepPlan plan = plan_steps(cfg, mesh, ns, initial);

  RunnerOptions opts;
  opts.n_ranks = capped_ranks(cfg.ranks);
  opts.backend = cfg.backend;
  opts.dt = plan.dt;
  opts.n_steps = plan.n_steps;

  CaseReport report;
  report.run = run_simulation(mesh, ns, basis, scfg, opts);
  report.dt = plan.dt;
  report.n_steps = plan.n_steps;
  report.n_ranks = opts.n_ranks;
  report.t_end = report.run.t_end;
  report.wall = report.run.wall_max;
  report.norms = error_norms(mesh, ns, report.run.field, cfg.flow_case, cfg.gas,
                             report.run.t_end);

  const auto before = integrate_mass_energy(mesh, ns, initial);
  const auto after = integrate_mass_energy(mesh, ns, report.run.field);
  report.mass_drift = std::abs(after[0] - before[0]) / std::abs(before[0]);
  report.energy_drift = std::abs(after[1] - before[1]) / std::abs(before[1]);

  report.pid = measure_pid(std::max(report.wall, 1e-12), opts.n_ranks,
                           report.run.n_dof(kNumVars), plan.n_steps, LowStorageRK::n_stages);
  for (const auto& st : report.run.stats) report.rebuilds += st.rebuilds;

  if (write_outputs) {
    ensure_dir(cfg.out_dir);
    std::ofstream os(cfg.out_dir + "/report.csv");
    os.precision(16);
    os << "t_end,n_steps,dt,ranks,l2_rho,l2_rhov1,l2_rhov2,l2_rhoe,linf_rho,"
          "mass_drift,energy_drift,wall_seconds,pid\n";
    os << report.t_end << ',' << report.n_steps << ',' << report.dt << ','
       << report.n_ranks << ',' << report.norms.l2[0] << ',' << report.norms.l2[1] << ','
       << report.norms.l2[2] << ',' << report.norms.l2[3] << ',' << report.norms.linf[0]
       << ',' << report.mass_drift << ',' << report.energy_drift << ',' << report.wall
       << ',' << report.pid << '\n';
    if (cfg.write_snapshot)
      write_snapshot(cfg.out_dir + "/field.sdg", mesh, report.run.field, report.t_end);
  }
  return report;
}

std::vector<ConvergenceRow> convergence_study(const RunConfig& cfg, bool write_outputs) {
  if (cfg.conv_levels < 2) throw ConfigError("convergence study needs at least 2 levels");
  std::vector<ConvergenceRow> rows;

  for (const long degree : cfg.conv_degrees) {
    const NodeSet ns(static_cast<int>(degree), cfg.node_kind);
    const BasisOperators basis = build_basis_operators(ns);
    double dt_level0 = 0.0;
    double prev_err = 0.0;

    for (int level = 0; level < cfg.conv_levels; ++level) {
      RunConfig sub = cfg;
      sub.degree = static_cast<int>(degree);
      sub.mesh = cfg.refined_mesh(level);
      const Mesh mesh(sub.mesh);
      const GlobalField initial = sample_case(mesh, ns, cfg.flow_case, cfg.gas, 0.0);

      // Keep the time error below the spatial one: shrink dt faster than h
      // for high degrees (global RK error is fourth order).
      double dt_cap = 0.0;
      if (level == 0) {
        dt_level0 = global_dt(mesh, ns, initial, cfg.gas, cfg.cfl);
      } else {
        dt_cap = dt_level0 * std::pow(0.5, level * (degree + 2.0) / 4.0);
      }
      const StepPlan plan = plan_steps(sub, mesh, ns, initial, dt_cap);

      RunnerOptions opts;
      opts.n_ranks = capped_ranks(sub.ranks);
      opts.backend = sub.backend;
      opts.dt = plan.dt;
      opts.n_steps = plan.n_steps;
      const RunOutput out = run_simulation(mesh, ns, basis, {cfg.gas, cfg.flow_case}, opts);
      const ErrorNorms norms =
          error_norms(mesh, ns, out.field, cfg.flow_case, cfg.gas, out.t_end);

      ConvergenceRow row;
      row.degree = static_cast<int>(degree);
      row.level = level;
      row.n_elements = mesh.n_elements();
      row.h = sub.mesh.height / sub.mesh.ny;
      row.l2_rho = norms.l2[0];
      row.order = level == 0 ? 0.0 : std::log2(prev_err / row.l2_rho);
      prev_err = row.l2_rho;
      rows.push_back(row);
      std::cout << "converge: N=" << degree << " level=" << level << " elems=" << row.n_elements
                << " L2(rho)=" << row.l2_rho << " order=" << row.order << "\n";
    }
  }

  if (write_outputs) {
    ensure_dir(cfg.out_dir);
    std::ofstream os(cfg.out_dir + "/convergence.csv");
    os.precision(16);
    os << "degree,level,n_elements,h,l2_rho,order\n";
    for (const auto& r : rows)
      os << r.degree << ',' << r.level << ',' << r.n_elements << ',' << r.h << ','
         << r.l2_rho << ',' << r.order << '\n';
  }
  return rows;
}

namespace {

double timed_pid(const RunConfig& cfg, const Mesh& mesh, const NodeSet& ns,
                 const BasisOperators& basis, int ranks, long n_steps, double dt,
                 int repetitions, double& wall_min, double& wall_mean, double& wall_max) {
  RunnerOptions opts;
  opts.n_ranks = ranks;
  opts.backend = cfg.backend;
  opts.dt = dt;
  opts.n_steps = n_steps;
  wall_min = 1e300;
  wall_max = 0.0;
  wall_mean = 0.0;
  long dof = 0;
  for (int rep = 0; rep < repetitions; ++rep) {
    const RunOutput out = run_simulation(mesh, ns, basis, {cfg.gas, cfg.flow_case}, opts);
    wall_min = std::min(wall_min, out.wall_max);
    wall_max = std::max(wall_max, out.wall_max);
    wall_mean += out.wall_max / repetitions;
    dof = out.n_dof(kNumVars);
  }
  return measure_pid(wall_min, ranks, dof, n_steps, LowStorageRK::n_stages);
}

}  // namespace

ScalingReport scaling_study(const RunConfig& cfg, bool write_outputs) {
  const NodeSet ns(cfg.degree, cfg.node_kind);
  const BasisOperators basis = build_basis_operators(ns);
  const Mesh mesh(cfg.mesh);
  const GlobalField initial = sample_case(mesh, ns, cfg.flow_case, cfg.gas, 0.0);
  const double dt = cfg.fixed_dt > 0.0 ? cfg.fixed_dt
                                       : global_dt(mesh, ns, initial, cfg.gas, cfg.cfl);
  const long n_steps = cfg.n_steps > 0 ? cfg.n_steps : 100;

  ScalingReport report;
  double base_pid_mean = 0.0;
  for (const long r : cfg.scale_ranks) {
    const int ranks = capped_ranks(static_cast<int>(r));
    ScalingRow row;
    row.ranks = ranks;
    timed_pid(cfg, mesh, ns, basis, ranks, n_steps, dt, cfg.scale_repetitions,
              row.wall_min, row.wall_mean, row.wall_max);
    const long dof = static_cast<long>(mesh.n_elements()) * ns.count() * ns.count() * kNumVars;
    row.pid_min = measure_pid(row.wall_min, ranks, dof, n_steps, LowStorageRK::n_stages);
    row.pid_mean = measure_pid(row.wall_mean, ranks, dof, n_steps, LowStorageRK::n_stages);
    row.pid_max = measure_pid(row.wall_max, ranks, dof, n_steps, LowStorageRK::n_stages);
    if (report.rows.empty()) base_pid_mean = row.pid_mean;
    row.efficiency = base_pid_mean / row.pid_mean;
    report.rows.push_back(row);
    std::cout << "scale: ranks=" << ranks << " wall(mean)=" << row.wall_mean
              << "s pid(mean)=" << row.pid_mean << " efficiency=" << row.efficiency << "\n";
  }

  // Sliding overhead against the conforming twin (all bands static).
  {
    double wmin, wmean, wmax;
    report.sliding_pid = timed_pid(cfg, mesh, ns, basis, 1, n_steps, dt,
                                   cfg.scale_repetitions, wmin, wmean, wmax);
    RunConfig conf = cfg;
    for (auto& b : conf.mesh.bands) b.vg_y = 0.0;
    const Mesh conf_mesh(conf.mesh);
    report.conforming_pid = timed_pid(conf, conf_mesh, ns, basis, 1, n_steps, dt,
                                      cfg.scale_repetitions, wmin, wmean, wmax);
    report.overhead_ratio = report.sliding_pid / report.conforming_pid;
    std::cout << "scale: sliding/conforming PID ratio = " << report.overhead_ratio << "\n";
  }

  if (write_outputs) {
    ensure_dir(cfg.out_dir);
    std::ofstream os(cfg.out_dir + "/scaling.csv");
    os.precision(16);
    os << "ranks,wall_min,wall_mean,wall_max,pid_min,pid_mean,pid_max,efficiency\n";
    for (const auto& r : report.rows)
      os << r.ranks << ',' << r.wall_min << ',' << r.wall_mean << ',' << r.wall_max << ','
         << r.pid_min << ',' << r.pid_mean << ',' << r.pid_max << ',' << r.efficiency
         << '\n';
    std::ofstream ov(cfg.out_dir + "/overhead.csv");
    ov.precision(16);
    ov << "sliding_pid,conforming_pid,ratio\n";
    ov << report.sliding_pid << ',' << report.conforming_pid << ','
       << report.overhead_ratio << '\n';
  }
  return report;
}

AuditOutcome audit_case(const RunConfig& cfg, bool inject, bool write_outputs) {
  const Mesh mesh(cfg.mesh);
  const NodeSet ns(cfg.degree, cfg.node_kind);
  const BasisOperators basis = build_basis_operators(ns);
  const GlobalField initial = sample_case(mesh, ns, cfg.flow_case, cfg.gas, 0.0);
  const StepPlan plan = plan_steps(cfg, mesh, ns, initial);

  RunnerOptions opts;
  opts.n_ranks = capped_ranks(cfg.ranks);
  opts.backend = cfg.backend;
  opts.dt = plan.dt;
  opts.n_steps = plan.n_steps;
  opts.inject_collective = inject;

  const RunOutput out = run_simulation(mesh, ns, basis, {cfg.gas, cfg.flow_case}, opts);
  const Ownership own = assign_ranks(mesh, opts.n_ranks);

  AuditOutcome outcome;
  outcome.report = audit_communication(out.trace, mesh, own, ns.count());
  if (write_outputs) {
    ensure_dir(cfg.out_dir);
    outcome.trace_path = cfg.out_dir + "/trace.csv";
    write_trace_csv(outcome.trace_path, out.trace);
    std::ofstream os(cfg.out_dir + "/audit.txt");
    os << (outcome.report.passed ? "PASS" : "FAIL") << "\n";
    os << "init_collective_sends " << outcome.report.init_collective_sends << "\n";
    os << "post_init_collectives " << outcome.report.post_init_collectives << "\n";
    os << "data_messages " << outcome.report.data_messages << "\n";
    os << "data_bytes " << outcome.report.data_bytes << "\n";
    for (const auto& v : outcome.report.violations) os << "violation: " << v << "\n";
  }
  return outcome;
}

}  // namespace sdg
