#include "flux.hpp"

#include <cmath>

namespace sdg {

FluxPair ale_convective_flux(const State& u, const Vec2& vg, const GasModel& gas) {
  const double rho = u[0];
  const double v1 = u[1] / rho;
  const double v2 = u[2] / rho;
  const double p = pressure(u, gas);

  FluxPair f;
  f.fx = {u[0] * v1, u[1] * v1 + p, u[2] * v1, (u[3] + p) * v1};
  f.fy = {u[0] * v2, u[1] * v2, u[2] * v2 + p, (u[3] + p) * v2};
  for (int v = 0; v < kNumVars; ++v) {
    f.fx[v] -= vg[0] * u[v];
    f.fy[v] -= vg[1] * u[v];
  }
  return f;
}

FluxPair viscous_flux(const State& u, const PrimGrad& g, const GasModel& gas) {
  const double v1 = u[1] / u[0];
  const double v2 = u[2] / u[0];
  const double mu = gas.mu;
  const double lam = gas.lambda();
  const double div = g.dv1[0] + g.dv2[1];

  const double tau11 = 2.0 * mu * g.dv1[0] + lam * div;
  const double tau22 = 2.0 * mu * g.dv2[1] + lam * div;
  const double tau12 = mu * (g.dv1[1] + g.dv2[0]);

  const double k = gas.conductivity();
  const double q1 = -k * g.dT[0];
  const double q2 = -k * g.dT[1];

  FluxPair f;
  f.fx = {0.0, tau11, tau12, tau11 * v1 + tau12 * v2 - q1};
  f.fy = {0.0, tau12, tau22, tau12 * v1 + tau22 * v2 - q2};
  return f;
}

State normal_flux(const State& u, const Vec2& n, double vg_n, const GasModel& gas) {
  const double rho = u[0];
  const double v1 = u[1] / rho;
  const double v2 = u[2] / rho;
  const double p = pressure(u, gas);
  const double vn = v1 * n[0] + v2 * n[1];
  return {rho * vn - vg_n * u[0],
          u[1] * vn + p * n[0] - vg_n * u[1],
          u[2] * vn + p * n[1] - vg_n * u[2],
          (u[3] + p) * vn - vg_n * u[3]};
}

namespace {

// Harten/Hyman fix: widen |lambda| when it falls inside the wave-speed spread.
inline double entropy_fixed_abs(double lam, double lam_l, double lam_r) {
  const double delta = std::max(0.0, std::max(lam - lam_l, lam_r - lam));
  const double a = std::abs(lam);
  if (a < 2.0 * delta) return lam * lam / (4.0 * delta) + delta;
  return a;
}

}  // namespace

State roe_flux(const State& ul, const State& ur, const Vec2& n, double vg_n,
               const GasModel& gas) {
  const Vec2 t{-n[1], n[0]};

  const double rho_l = ul[0];
  const double v1_l = ul[1] / rho_l, v2_l = ul[2] / rho_l;
  const double p_l = pressure(ul, gas);
  const double h_l = (ul[3] + p_l) / rho_l;
  const double un_l = v1_l * n[0] + v2_l * n[1];
  const double ut_l = v1_l * t[0] + v2_l * t[1];
  const double c_l = std::sqrt(gas.gamma * p_l / rho_l);

  const double rho_r = ur[0];
  const double v1_r = ur[1] / rho_r, v2_r = ur[2] / rho_r;
  const double p_r = pressure(ur, gas);
  const double h_r = (ur[3] + p_r) / rho_r;
  const double un_r = v1_r * n[0] + v2_r * n[1];
  const double ut_r = v1_r * t[0] + v2_r * t[1];
  const double c_r = std::sqrt(gas.gamma * p_r / rho_r);

  // Roe averages.
  const double sl = std::sqrt(rho_l), sr = std::sqrt(rho_r);
  const double inv = 1.0 / (sl + sr);
  const double un = (sl * un_l + sr * un_r) * inv;
  const double ut = (sl * ut_l + sr * ut_r) * inv;
  const double h = (sl * h_l + sr * h_r) * inv;
  const double q2 = un * un + ut * ut;
  const double c2 = (gas.gamma - 1.0) * (h - 0.5 * q2);
  if (!(c2 > 0.0)) throw InvalidStateError("roe_flux: nonpositive Roe enthalpy average");
  const double c = std::sqrt(c2);
  const double rho = sl * sr;

  // Wave strengths.
  const double dp = p_r - p_l;
  const double dun = un_r - un_l;
  const double dut = ut_r - ut_l;
  const double drho = rho_r - rho_l;
  const double alpha1 = (dp - rho * c * dun) / (2.0 * c2);  // u_n - c wave
  const double alpha2 = drho - dp / c2;                     // entropy wave
  const double alpha3 = rho * dut;                          // shear wave
  const double alpha4 = (dp + rho * c * dun) / (2.0 * c2);  // u_n + c wave

  // Eigenvalues in the grid frame, with the entropy fix on acoustic waves.
  const double a1 = entropy_fixed_abs(un - c - vg_n, un_l - c_l - vg_n, un_r - c_r - vg_n);
  const double a2 = std::abs(un - vg_n);
  const double a4 = entropy_fixed_abs(un + c - vg_n, un_l + c_l - vg_n, un_r + c_r - vg_n);

  // Dissipation assembled in (rho, rho u_n, rho u_t, rho e) components.
  double d[4];
  d[0] = a1 * alpha1 + a2 * alpha2 + a4 * alpha4;
  d[1] = a1 * alpha1 * (un - c) + a2 * alpha2 * un + a4 * alpha4 * (un + c);
  d[2] = (a1 * alpha1 + a2 * alpha2 + a4 * alpha4) * ut + a2 * alpha3;
  d[3] = a1 * alpha1 * (h - un * c) + a2 * alpha2 * 0.5 * q2 + a2 * alpha3 * ut +
         a4 * alpha4 * (h + un * c);

  const State fl = normal_flux(ul, n, vg_n, gas);
  const State fr = normal_flux(ur, n, vg_n, gas);

  State f;
  f[0] = 0.5 * (fl[0] + fr[0] - d[0]);
  // Rotate momentum dissipation back to Cartesian components.
  f[1] = 0.5 * (fl[1] + fr[1] - (d[1] * n[0] + d[2] * t[0]));
  f[2] = 0.5 * (fl[2] + fr[2] - (d[1] * n[1] + d[2] * t[1]));
  f[3] = 0.5 * (fl[3] + fr[3] - d[3]);
  return f;
}

}  // namespace sdg
