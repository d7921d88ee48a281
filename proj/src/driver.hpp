#pragma once

#include <string>
#include <vector>

#include "audit.hpp"
#include "config.hpp"
#include "runner.hpp"

namespace sdg {

struct CaseReport {
  ErrorNorms norms;
  double mass_drift = 0.0;    // relative
  double energy_drift = 0.0;  // relative
  double dt = 0.0;
  double t_end = 0.0;
  long n_steps = 0;
  int n_ranks = 1;
  double wall = 0.0;
  double pid = 0.0;
  long rebuilds = 0;
  RunOutput run;
};

/// Executes one configured run and gathers error norms, conservation drift
/// and timing. Writes report.csv (and optionally a field snapshot) when
/// write_outputs is set.
CaseReport run_case(const RunConfig& cfg, bool write_outputs = true);

struct ConvergenceRow {
  int degree = 0;
  int level = 0;
  int n_elements = 0;
  double h = 0.0;
  double l2_rho = 0.0;
  double order = 0.0;  // 0 on the coarsest level
};

/// Runs the refinement ladder per polynomial degree and reports L2(rho)
/// errors and observed orders. Writes convergence.csv when requested.
std::vector<ConvergenceRow> convergence_study(const RunConfig& cfg,
                                              bool write_outputs = true);

struct ScalingRow {
  int ranks = 0;
  double wall_min = 0.0, wall_mean = 0.0, wall_max = 0.0;
  double pid_min = 0.0, pid_mean = 0.0, pid_max = 0.0;
  double efficiency = 0.0;  // mean PID of the smallest rank count over this one
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  double sliding_pid = 0.0;     // single-rank, 5-rep minimum
  double conforming_pid = 0.0;  // same mesh with all bands static
  double overhead_ratio = 0.0;
};

ScalingReport scaling_study(const RunConfig& cfg, bool write_outputs = true);

struct AuditOutcome {
  AuditReport report;
  std::string trace_path;
};

/// Instrumented run followed by the communication audit; `inject` adds an
/// unsanctioned collective to prove the audit catches violations.
AuditOutcome audit_case(const RunConfig& cfg, bool inject, bool write_outputs = true);

}  // namespace sdg
