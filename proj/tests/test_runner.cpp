#include <doctest.h>

#include "audit.hpp"
#include "driver.hpp"
#include "runner.hpp"

using namespace sdg;

namespace {

MeshSpec sliding_spec(int nx = 2, int ny = 6) {
  MeshSpec spec;
  spec.width = 2.0;
  spec.height = 2.0;
  spec.ny = ny;
  spec.bands = {{nx, 1.0, 0.0}, {nx, 1.0, 1.0}, {nx, 1.0, 0.0}};
  return spec;
}

SolverConfig wave_cfg() {
  SolverConfig cfg;
  cfg.gas.R = 1.0;
  cfg.flow_case.kind = CaseDef::Kind::DensityWave;
  cfg.flow_case.dw = {0.1, {1.0, 1.0}, 1.0};
  return cfg;
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("rank counts do not change the solution bits") {
  const Mesh mesh(sliding_spec());
  const NodeSet ns(3, NodeKind::LegendreGaussLobatto);
  const BasisOperators basis = build_basis_operators(ns);
  const SolverConfig cfg = wave_cfg();

  RunnerOptions opts;
  opts.dt = 0.004;
  opts.n_steps = 10;

  opts.n_ranks = 1;
  const RunOutput ref = run_simulation(mesh, ns, basis, cfg, opts);

  for (const int ranks : {2, 3, 6}) {
    opts.n_ranks = ranks;
    const RunOutput out = run_simulation(mesh, ns, basis, cfg, opts);
    CHECK(out.field == ref.field);
  }
}

TEST_CASE("socket workers reproduce the in-process bits") {
  const Mesh mesh(sliding_spec());
  const NodeSet ns(2, NodeKind::LegendreGaussLobatto);
  const BasisOperators basis = build_basis_operators(ns);
  const SolverConfig cfg = wave_cfg();

  RunnerOptions opts;
  opts.dt = 0.004;
  opts.n_steps = 5;
  opts.n_ranks = 1;
  const RunOutput ref = run_simulation(mesh, ns, basis, cfg, opts);

  opts.n_ranks = 3;
  opts.backend = Backend::Proc;
  const RunOutput out = run_simulation(mesh, ns, basis, cfg, opts);
  CHECK(out.field == ref.field);
}

TEST_CASE("clean runs pass the communication audit") {
  const Mesh mesh(sliding_spec());
  const NodeSet ns(2, NodeKind::LegendreGaussLobatto);
  const BasisOperators basis = build_basis_operators(ns);

  RunnerOptions opts;
  opts.n_ranks = 3;
  opts.dt = 0.02;
  opts.n_steps = 40;  // two face lengths at vg = 1, l = 1/3
  const RunOutput out = run_simulation(mesh, ns, basis, wave_cfg(), opts);

  const Ownership own = assign_ranks(mesh, 3);
  const AuditReport report = audit_communication(out.trace, mesh, own, ns.count());
  for (const auto& v : report.violations) MESSAGE(v);
  CHECK(report.passed);
  CHECK(report.data_messages > 0);
  CHECK(report.post_init_collectives == 0);
}

TEST_CASE("single-rank runs communicate nothing") {
  const Mesh mesh(sliding_spec());
  const NodeSet ns(2, NodeKind::LegendreGaussLobatto);
  const BasisOperators basis = build_basis_operators(ns);
  RunnerOptions opts;
  opts.n_ranks = 1;
  opts.dt = 0.02;
  opts.n_steps = 5;
  const RunOutput out = run_simulation(mesh, ns, basis, wave_cfg(), opts);
  CHECK(out.trace.empty());
  const AuditReport report =
      audit_communication(out.trace, mesh, assign_ranks(mesh, 1), ns.count());
  CHECK(report.passed);
}

TEST_CASE("an injected collective fails the audit") {
  const Mesh mesh(sliding_spec());
  const NodeSet ns(2, NodeKind::LegendreGaussLobatto);
  const BasisOperators basis = build_basis_operators(ns);
  RunnerOptions opts;
  opts.n_ranks = 3;
  opts.dt = 0.02;
  opts.n_steps = 5;
  opts.inject_collective = true;
  const RunOutput out = run_simulation(mesh, ns, basis, wave_cfg(), opts);
  const AuditReport report =
      audit_communication(out.trace, mesh, assign_ranks(mesh, 3), ns.count());
  CHECK_FALSE(report.passed);
}

}  // TEST_SUITE
