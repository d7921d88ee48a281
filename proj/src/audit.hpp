#pragma once

#include <string>
#include <vector>

#include "mesh.hpp"
#include "partition.hpp"
#include "transport.hpp"

namespace sdg {

struct AuditReport {
  bool passed = true;
  std::vector<std::string> violations;
  long init_collective_sends = 0;
  long post_init_collectives = 0;
  long data_messages = 0;
  std::uint64_t data_bytes = 0;

  void fail(std::string what) {
    passed = false;
    violations.push_back(std::move(what));
  }
};

/// Verifies the three communication claims on a recorded trace: the rank-map
/// exchange is the only collective and stays in the init phase, every
/// simulation-phase payload is pure solution/flux data of schedule-consistent
/// size, and sliding-mesh messages only connect ranks that the interface
/// rank maps pair up.
AuditReport audit_communication(const std::vector<TraceRow>& trace, const Mesh& mesh,
                                const Ownership& own, int n1);

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);

}  // namespace sdg
