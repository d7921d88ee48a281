#pragma once

#include <string>
#include <utility>
#include <vector>

#include "matrix.hpp"

namespace sdg {

enum class NodeKind { LegendreGaussLobatto, LegendreGauss };

std::string to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& s);

/// Legendre polynomial value and derivative, (P_n(x), P_n'(x)).
std::pair<double, double> legendre(int n, double x);

/// One-dimensional interpolation node set with quadrature weights on [-1,1].
///
/// Nodes are found by Newton iteration from Chebyshev initial guesses and
/// symmetrized about the origin, so node sets are deterministic and exact
/// in floating point across rebuilds.
class NodeSet {
 public:
  NodeSet(int degree, NodeKind kind);

  int degree() const { return degree_; }
  int count() const { return degree_ + 1; }
  NodeKind kind() const { return kind_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bary_weights() const { return bary_; }

  /// Cardinal polynomial l_j evaluated at x via the barycentric formula.
  double lagrange(int j, double x) const;

  /// All cardinal polynomials at x.
  std::vector<double> lagrange_all(double x) const;
  void lagrange_all(double x, double* out) const;

 private:
  int degree_;
  NodeKind kind_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> bary_;
};

/// Collocation operators shared by the volume kernels and the mortar system.
struct BasisOperators {
  Matrix diff;                    // nodal differentiation matrix D
  Matrix mass;                    // full mass matrix of l_i l_j integrals
  std::vector<double> mass_diag;  // collocation quadrature weights
  std::vector<double> face_left;  // l_j(-1)
  std::vector<double> face_right; // l_j(+1)
};

BasisOperators build_basis_operators(const NodeSet& ns);

}  // namespace sdg
