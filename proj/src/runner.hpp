#pragma once

#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "solver.hpp"

namespace sdg {

enum class Backend { InProc, Proc };

Backend backend_from_string(const std::string& s);

struct RunnerOptions {
  int n_ranks = 1;
  Backend backend = Backend::InProc;
  double t0 = 0.0;
  double dt = 0.0;
  long n_steps = 0;
  bool inject_collective = false;  // negative test for the audit
};

struct RankStats {
  int rank = 0;
  double wall_seconds = 0.0;  // stepping loop only
  long rebuilds = 0;
};

struct RunOutput {
  GlobalField field;
  double t_end = 0.0;
  std::vector<TraceRow> trace;  // merged, ordered by rank
  std::vector<RankStats> stats;
  double wall_max = 0.0;
  long n_steps = 0;
  int n_ranks = 1;

  long n_dof(int nvars_per_node = 1) const {
    return static_cast<long>(field.n_elements) * field.n1 * field.n1 * nvars_per_node;
  }
};

/// Runs the case on n_ranks workers and gathers the final field, the
/// communication trace and per-rank timers.
RunOutput run_simulation(const Mesh& mesh, const NodeSet& ns, const BasisOperators& basis,
                         const SolverConfig& cfg, const RunnerOptions& opts);

}  // namespace sdg
