#include "nodal_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace sdg {

namespace {
constexpr int kMaxDegree = 15;
constexpr double kNewtonTol = 1e-15;
constexpr int kNewtonMaxIter = 50;
}  // namespace

std::string to_string(NodeKind kind) {
  return kind == NodeKind::LegendreGaussLobatto ? "lgl" : "gauss";
}

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "lgl" || s == "lobatto" || s == "legendre-gauss-lobatto")
    return NodeKind::LegendreGaussLobatto;
  if (s == "gauss" || s == "legendre-gauss") return NodeKind::LegendreGauss;
  throw ConfigError("unknown node kind '" + s + "' (expected lgl or gauss)");
}

std::pair<double, double> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double pm1 = 1.0, p = x;
  double dpm1 = 0.0, dp = 1.0;
  for (int k = 1; k < n; ++k) {
    const double pp1 = ((2.0 * k + 1.0) * x * p - k * pm1) / (k + 1.0);
    const double dpp1 = dpm1 + (2.0 * k + 1.0) * p;
    pm1 = p;
    p = pp1;
    dpm1 = dp;
    dp = dpp1;
  }
  return {p, dp};
}

namespace {

// Interior LGL nodes are the roots of P_N'.
double lgl_newton(int n, double x0) {
  double x = x0;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const auto [p, dp] = legendre(n, x);
    // P'' from the Legendre ODE, valid away from the endpoints.
    const double d2p = (2.0 * x * dp - n * (n + 1.0) * p) / (1.0 - x * x);
    const double step = dp / d2p;
    x -= step;
    if (std::abs(step) < kNewtonTol) break;
  }
  return x;
}

double gauss_newton(int n, double x0) {
  double x = x0;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const auto [p, dp] = legendre(n, x);
    const double step = p / dp;
    x -= step;
    if (std::abs(step) < kNewtonTol) break;
  }
  return x;
}

}  // namespace

NodeSet::NodeSet(int degree, NodeKind kind) : degree_(degree), kind_(kind) {
  if (degree < 1 || degree > kMaxDegree)
    throw ConfigError("polynomial degree " + std::to_string(degree) +
                      " outside supported range [1," + std::to_string(kMaxDegree) + "]");
  const int n = degree + 1;
  nodes_.assign(n, 0.0);
  weights_.assign(n, 0.0);

  if (kind == NodeKind::LegendreGaussLobatto) {
    nodes_.front() = -1.0;
    nodes_.back() = 1.0;
    for (int j = 1; j <= (n - 1) / 2; ++j) {
      const double guess = -std::cos(std::numbers::pi * j / degree);
      const double x = lgl_newton(degree, guess);
      nodes_[j] = x;
      nodes_[degree - j] = -x;  // enforce exact symmetry
    }
    if (n % 2 == 1) nodes_[degree / 2] = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p = legendre(degree, nodes_[j]).first;
      weights_[j] = 2.0 / (degree * (degree + 1.0) * p * p);
    }
  } else {
    for (int j = 0; j <= (n - 1) / 2; ++j) {
      const double guess = -std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * n));
      const double x = gauss_newton(n, guess);
      nodes_[j] = x;
      nodes_[degree - j] = -x;
    }
    if (n % 2 == 1) nodes_[degree / 2] = 0.0;
    for (int j = 0; j < n; ++j) {
      const double dp = legendre(n, nodes_[j]).second;
      const double x = nodes_[j];
      weights_[j] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  bary_.assign(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) bary_[j] *= nodes_[j] - nodes_[k];
  for (double& b : bary_) b = 1.0 / b;
}

double NodeSet::lagrange(int j, double x) const {
  const int n = count();
  for (int k = 0; k < n; ++k)
    if (x == nodes_[k]) return k == j ? 1.0 : 0.0;
  double num = bary_[j] / (x - nodes_[j]);
  double den = 0.0;
  for (int k = 0; k < n; ++k) den += bary_[k] / (x - nodes_[k]);
  return num / den;
}

void NodeSet::lagrange_all(double x, double* out) const {
  const int n = count();
  for (int k = 0; k < n; ++k) {
    if (x == nodes_[k]) {
      std::fill(out, out + n, 0.0);
      out[k] = 1.0;
      return;
    }
  }
  double den = 0.0;
  for (int k = 0; k < n; ++k) {
    out[k] = bary_[k] / (x - nodes_[k]);
    den += out[k];
  }
  for (int k = 0; k < n; ++k) out[k] /= den;
}

std::vector<double> NodeSet::lagrange_all(double x) const {
  std::vector<double> out(count());
  lagrange_all(x, out.data());
  return out;
}

BasisOperators build_basis_operators(const NodeSet& ns) {
  const int n = ns.count();
  const auto& x = ns.nodes();
  const auto& b = ns.bary_weights();

  BasisOperators ops;
  ops.diff = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = (b[j] / b[i]) / (x[i] - x[j]);
      ops.diff(i, j) = d;
      diag -= d;
    }
    ops.diff(i, i) = diag;  // rows sum to zero by construction
  }

  // Full mass matrix by Gauss quadrature, exact for the degree-2N integrand.
  const NodeSet gauss(ns.degree(), NodeKind::LegendreGauss);
  ops.mass = Matrix(n, n);
  std::vector<double> lq(n);
  for (int q = 0; q < n; ++q) {
    ns.lagrange_all(gauss.nodes()[q], lq.data());
    const double w = gauss.weights()[q];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) ops.mass(i, j) += w * lq[i] * lq[j];
  }

  ops.mass_diag = ns.weights();
  ops.face_left = ns.lagrange_all(-1.0);
  ops.face_right = ns.lagrange_all(1.0);
  return ops;
}

}  // namespace sdg
