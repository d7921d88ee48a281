#pragma once

#include <string>

#include "diagnostics.hpp"
#include "mesh.hpp"

namespace sdg {

/// Writes a field snapshot: a short text header (mesh layout, degree, time)
/// followed by the nodal states as little-endian doubles in global element
/// order, (i, j, variable) innermost. The format is described in README.md.
void write_snapshot(const std::string& path, const Mesh& mesh, const GlobalField& field,
                    double time);

/// Reads a snapshot back; the mesh layout lines are checked for consistency
/// with the given mesh.
GlobalField read_snapshot(const std::string& path, const Mesh& mesh, double& time);

}  // namespace sdg
