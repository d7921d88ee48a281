#pragma once

#include <array>
#include <span>
#include <vector>

#include "cases.hpp"
#include "mesh.hpp"
#include "nodal_basis.hpp"

namespace sdg {

/// Nodal field over the whole mesh in global element order.
struct GlobalField {
  int n1 = 0;
  int n_elements = 0;
  std::vector<double> data;  // ((gid * n1 + i) * n1 + j) * 4 + var

  std::span<const double> element(int gid) const {
    const std::size_t stride = static_cast<std::size_t>(n1) * n1 * kNumVars;
    return {data.data() + gid * stride, stride};
  }
  bool operator==(const GlobalField&) const = default;
};

/// Exact solution sampled at the interpolation nodes.
GlobalField sample_case(const Mesh& mesh, const NodeSet& ns, const CaseDef& cs,
                        const GasModel& gas, double t);

struct ErrorNorms {
  std::array<double, kNumVars> l2{};
  std::array<double, kNumVars> linf{};
};

/// Quadrature L2 norm (volume-averaged) and max norm of the pointwise error
/// against the exact case solution at time t.
ErrorNorms error_norms(const Mesh& mesh, const NodeSet& ns, const GlobalField& field,
                       const CaseDef& cs, const GasModel& gas, double t);

/// Discrete integrals of mass and total energy over the mesh.
std::array<double, 2> integrate_mass_energy(const Mesh& mesh, const NodeSet& ns,
                                            const GlobalField& field);

/// Max deviation from the uniform state per variable.
double max_freestream_deviation(const GlobalField& field, const State& uniform);

/// Time step from the CFL condition over all elements of the field.
double global_dt(const Mesh& mesh, const NodeSet& ns, const GlobalField& field,
                 const GasModel& gas, double cfl);

}  // namespace sdg
