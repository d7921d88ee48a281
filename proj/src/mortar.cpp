#include "mortar.hpp"

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace sdg {

namespace {

// The operator products amplify rounding of the small mass solves right at
// the free-stream cancellation floor, so the assembly runs in extended
// precision and only the final entries are rounded to double.
using ld = long double;

struct LdBasis {
  std::vector<ld> nodes;
  std::vector<ld> bary;

  explicit LdBasis(const std::vector<double>& xs) {
    nodes.assign(xs.begin(), xs.end());
    const int n = static_cast<int>(xs.size());
    bary.assign(n, 1.0L);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k)
        if (k != j) bary[j] *= nodes[j] - nodes[k];
      bary[j] = 1.0L / bary[j];
    }
  }

  void lagrange_all(ld x, ld* out) const {
    const int n = static_cast<int>(nodes.size());
    for (int k = 0; k < n; ++k) {
      if (x == nodes[k]) {
        for (int j = 0; j < n; ++j) out[j] = (j == k) ? 1.0L : 0.0L;
        return;
      }
    }
    ld den = 0.0L;
    for (int k = 0; k < n; ++k) {
      out[k] = bary[k] / (x - nodes[k]);
      den += out[k];
    }
    for (int k = 0; k < n; ++k) out[k] /= den;
  }
};

// Solve A X = B in place for SPD A, all long double.
void cholesky_solve(std::vector<ld>& a, std::vector<ld>& b, int n, int ncols) {
  for (int j = 0; j < n; ++j) {
    ld d = a[j * n + j];
    for (int k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= 0.0L) throw ConfigError("mortar mass matrix not positive definite");
    const ld ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      ld s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
  }
  for (int c = 0; c < ncols; ++c) {
    for (int i = 0; i < n; ++i) {
      ld s = b[i * ncols + c];
      for (int k = 0; k < i; ++k) s -= a[i * n + k] * b[k * ncols + c];
      b[i * ncols + c] = s / a[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      ld s = b[i * ncols + c];
      for (int k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k * ncols + c];
      b[i * ncols + c] = s / a[i * n + i];
    }
  }
}

}  // namespace

MortarOperators build_mortar_operators(const NodeSet& ns, double sigma) {
  if (!(sigma >= -1.0 && sigma < 1.0))
    throw ConfigError("mortar position sigma must lie in [-1, 1)");

  const int n = ns.count();
  const NodeSet gauss(ns.degree(), NodeKind::LegendreGauss);
  const LdBasis basis(ns.nodes());

  MortarOperators ops;
  ops.sigma = sigma;

  // Mass matrix of the face basis, exact for the degree-2N integrand.
  std::vector<ld> mass(n * n, 0.0L);
  std::vector<ld> lq(n), lx(n);
  for (int q = 0; q < n; ++q) {
    basis.lagrange_all(gauss.nodes()[q], lq.data());
    const ld w = gauss.weights()[q];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mass[i * n + j] += w * lq[i] * lq[j];
  }

  const ld frac[2] = {0.5L * (1.0L + sigma), 0.5L * (1.0L - sigma)};  // lower, upper
  for (int h = 0; h < 2; ++h) {
    // S[h](i,j) = integral of l_i(xi(z)) l_j(z) dz over the mortar coordinate.
    std::vector<ld> s(n * n, 0.0L);
    for (int q = 0; q < n; ++q) {
      const ld z = gauss.nodes()[q];
      const ld xi = (h == static_cast<int>(MortarHalf::Lower))
                        ? -1.0L + frac[0] * (z + 1.0L)
                        : static_cast<ld>(sigma) + frac[1] * (z + 1.0L);
      basis.lagrange_all(xi, lx.data());
      basis.lagrange_all(z, lq.data());
      const ld w = gauss.weights()[q];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s[i * n + j] += w * lx[i] * lq[j];
    }

    std::vector<ld> m_fwd(mass), st(n * n), m_bwd(mass), sw(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        st[i * n + j] = s[j * n + i];
        sw[i * n + j] = frac[h] * s[i * n + j];
      }
    cholesky_solve(m_fwd, st, n, n);
    cholesky_solve(m_bwd, sw, n, n);

    ops.to_mortar[h] = Matrix(n, n);
    ops.to_face[h] = Matrix(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        ops.to_mortar[h](i, j) = static_cast<double>(st[i * n + j]);
        ops.to_face[h](i, j) = static_cast<double>(sw[i * n + j]);
      }
  }
  return ops;
}

double sigma_from_displacement(double s_delta) { return 2.0 * s_delta - 1.0; }

int sub_index(double xi_offset, double s_delta, double l_par) {
  return xi_offset < s_delta * l_par ? 0 : 1;
}

long moving_index(long i_par, long n_delta, int i_sub, long n_faces) {
  const long raw = i_par - n_delta + i_sub - 1;
  return ((raw % n_faces) + n_faces) % n_faces;
}

long static_index(long i_moving, long n_delta, int i_sub, long n_faces) {
  const long raw = i_moving + n_delta - i_sub + 1;
  return ((raw % n_faces) + n_faces) % n_faces;
}

void apply_line(const Matrix& op, std::span<const State> in, std::span<State> out) {
  const int n = op.rows();
  for (int i = 0; i < n; ++i) {
    State acc{0.0, 0.0, 0.0, 0.0};
    const double* r = op.row(i);
    for (int j = 0; j < n; ++j) {
      const double c = r[j];
      for (int v = 0; v < kNumVars; ++v) acc[v] += c * in[j][v];
    }
    out[i] = acc;
  }
}

void apply_line(const Matrix& op, std::span<const double> in, std::span<double> out) {
  const int n = op.rows();
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    const double* r = op.row(i);
    for (int j = 0; j < n; ++j) acc += r[j] * in[j];
    out[i] = acc;
  }
}

}  // namespace sdg
