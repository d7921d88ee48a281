#pragma once

#include <span>

#include "matrix.hpp"
#include "nodal_basis.hpp"
#include "state.hpp"

namespace sdg {

/// Which part of a split face a mortar covers, in face reference coordinates.
enum class MortarHalf : int {
  Lower = 0,  // [-1, sigma]
  Upper = 1,  // [sigma, +1]
};

/// Projection operators between a face and its two mortars for a hanging
/// node at sigma. Forward operators are exact for degree-N polynomials;
/// backward operators carry the interval-measure weights (1 -/+ sigma)/2.
struct MortarOperators {
  double sigma = -1.0;
  Matrix to_mortar[2];  // indexed by MortarHalf
  Matrix to_face[2];

  const Matrix& forward(MortarHalf h) const { return to_mortar[static_cast<int>(h)]; }
  const Matrix& backward(MortarHalf h) const { return to_face[static_cast<int>(h)]; }
};

/// Builds the L2-projection operator set for a hanging node at sigma in [-1,1).
/// sigma == 1 (zero-extent upper mortar) is rejected; the conforming instant
/// is handled by the identity path, not by a degenerate operator set.
MortarOperators build_mortar_operators(const NodeSet& ns, double sigma);

/// Maps the surpassed face fraction to the hanging-node position in [-1,1).
double sigma_from_displacement(double s_delta);

/// Sub-mortar index of the mortar at offset xi_offset within a static face.
int sub_index(double xi_offset, double s_delta, double l_par);

/// Moving-side parallel face index of mortar (i_par, i_sub), periodic.
long moving_index(long i_par, long n_delta, int i_sub, long n_faces);

/// Inverse of moving_index: static face index adjacent to moving-face mortar.
long static_index(long i_moving, long n_delta, int i_sub, long n_faces);

/// One nodal line of 4-vectors transferred through a projection matrix.
void apply_line(const Matrix& op, std::span<const State> in, std::span<State> out);

/// Scalar variant used by the lifting transfers.
void apply_line(const Matrix& op, std::span<const double> in, std::span<double> out);

}  // namespace sdg
