#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdg {

GlobalField sample_case(const Mesh& mesh, const NodeSet& ns, const CaseDef& cs,
                        const GasModel& gas, double t) {
  const int n = ns.count();
  GlobalField f;
  f.n1 = n;
  f.n_elements = mesh.n_elements();
  f.data.assign(static_cast<std::size_t>(f.n_elements) * n * n * kNumVars, 0.0);
  for (int gid = 0; gid < f.n_elements; ++gid) {
    int b, ix, iy;
    mesh.locate(gid, b, ix, iy);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec2 x = mesh.physical(b, ix, iy, ns.nodes()[i], ns.nodes()[j], t);
        const State u = cs(x, t, gas);
        double* p =
            f.data.data() + ((static_cast<std::size_t>(gid) * n + i) * n + j) * kNumVars;
        for (int v = 0; v < kNumVars; ++v) p[v] = u[v];
      }
  }
  return f;
}

ErrorNorms error_norms(const Mesh& mesh, const NodeSet& ns, const GlobalField& field,
                       const CaseDef& cs, const GasModel& gas, double t) {
  const int n = ns.count();
  ErrorNorms norms;
  std::array<double, kNumVars> sums{};
  double volume = 0.0;
  for (int gid = 0; gid < field.n_elements; ++gid) {
    int b, ix, iy;
    mesh.locate(gid, b, ix, iy);
    const double jac = mesh.metrics(b).jac;
    const auto elem = field.element(gid);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec2 x = mesh.physical(b, ix, iy, ns.nodes()[i], ns.nodes()[j], t);
        const State exact = cs(x, t, gas);
        const double* p = elem.data() + (static_cast<std::size_t>(i) * n + j) * kNumVars;
        const double wj = ns.weights()[i] * ns.weights()[j] * jac;
        volume += wj;
        for (int v = 0; v < kNumVars; ++v) {
          const double e = p[v] - exact[v];
          sums[v] += wj * e * e;
          norms.linf[v] = std::max(norms.linf[v], std::abs(e));
        }
      }
  }
  for (int v = 0; v < kNumVars; ++v) norms.l2[v] = std::sqrt(sums[v] / volume);
  return norms;
}

std::array<double, 2> integrate_mass_energy(const Mesh& mesh, const NodeSet& ns,
                                            const GlobalField& field) {
  const int n = ns.count();
  std::array<double, 2> totals{0.0, 0.0};
  for (int gid = 0; gid < field.n_elements; ++gid) {
    int b, ix, iy;
    mesh.locate(gid, b, ix, iy);
    const double jac = mesh.metrics(b).jac;
    const auto elem = field.element(gid);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* p = elem.data() + (static_cast<std::size_t>(i) * n + j) * kNumVars;
        const double wj = ns.weights()[i] * ns.weights()[j] * jac;
        totals[0] += wj * p[0];
        totals[1] += wj * p[3];
      }
  }
  return totals;
}

double max_freestream_deviation(const GlobalField& field, const State& uniform) {
  double dev = 0.0;
  const std::size_t nodes = field.data.size() / kNumVars;
  for (std::size_t k = 0; k < nodes; ++k)
    for (int v = 0; v < kNumVars; ++v)
      dev = std::max(dev, std::abs(field.data[k * kNumVars + v] - uniform[v]));
  return dev;
}

double global_dt(const Mesh& mesh, const NodeSet& ns, const GlobalField& field,
                 const GasModel& gas, double cfl) {
  const int n = ns.count();
  double dt = std::numeric_limits<double>::max();
  for (int gid = 0; gid < field.n_elements; ++gid) {
    int b, ix, iy;
    mesh.locate(gid, b, ix, iy);
    const Band& band = mesh.band(b);
    const Vec2 vg = mesh.grid_velocity(b);
    const auto elem = field.element(gid);
    double lmax = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* p = elem.data() + (static_cast<std::size_t>(i) * n + j) * kNumVars;
        const State s{p[0], p[1], p[2], p[3]};
        const double v1 = s[1] / s[0] - vg[0];
        const double v2 = s[2] / s[0] - vg[1];
        lmax = std::max(lmax, std::sqrt(v1 * v1 + v2 * v2) + sound_speed(s, gas));
      }
    const double h = std::min(band.hx, band.hy);
    dt = std::min(dt, cfl * h / (lmax * (2.0 * ns.degree() + 1.0)));
  }
  return dt;
}

}  // namespace sdg
