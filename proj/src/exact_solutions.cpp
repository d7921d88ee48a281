#include "exact_solutions.hpp"

#include <numbers>

namespace sdg {

State isentropic_vortex(const Vec2& x, double t, const VortexParams& p, const GasModel& gas) {
  const double u_inf = p.v_inf * std::cos(p.theta);
  const double v_inf = p.v_inf * std::sin(p.theta);
  const double xb = x[0] - p.center0[0] - u_inf * t;
  const double yb = x[1] - p.center0[1] - v_inf * t;
  const double r2 = (xb * xb + yb * yb) / (p.rc * p.rc);

  const double s = p.eps * std::exp(0.5 * (1.0 - r2));
  const double v1 = u_inf - p.v_inf * s * yb / p.rc;
  const double v2 = v_inf + p.v_inf * s * xb / p.rc;

  // Isentropic temperature deficit balancing the swirl.
  const double tratio =
      1.0 - 0.5 * (gas.gamma - 1.0) * p.eps * p.eps * p.ma_inf * p.ma_inf * std::exp(1.0 - r2);
  const double rho = p.rho_inf * std::pow(tratio, 1.0 / (gas.gamma - 1.0));
  const double pres = p.p_inf(gas) * std::pow(tratio, gas.gamma / (gas.gamma - 1.0));

  return from_primitive({rho, v1, v2, pres}, gas);
}

State density_wave(const Vec2& x, double t, const DensityWaveParams& p, const GasModel& gas) {
  const double phase = std::numbers::pi * (x[0] + x[1] - (p.a[0] + p.a[1]) * t);
  const double rho = 2.0 + p.alpha * std::sin(phase);
  return from_primitive({rho, p.a[0], p.a[1], p.p0}, gas);
}

State freestream(const FreestreamParams& p, const GasModel& gas) {
  return from_primitive({p.rho, p.v[0], p.v[1], p.p}, gas);
}

}  // namespace sdg
