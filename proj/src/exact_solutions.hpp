#pragma once

#include <cmath>
#include <string>

#include "state.hpp"

namespace sdg {

/// Isentropic vortex superimposed on a uniform freestream and advected by it.
struct VortexParams {
  double eps = 1.0;    // vortex intensity
  double rc = 1.0;     // vortex size
  double rho_inf = 1.0;
  double v_inf = 1.0;
  double theta = std::atan(0.5);  // flow angle
  double ma_inf = 0.3;
  Vec2 center0{0.0, 0.0};

  double p_inf(const GasModel& gas) const {
    return rho_inf * v_inf * v_inf / (gas.gamma * ma_inf * ma_inf);
  }
};

State isentropic_vortex(const Vec2& x, double t, const VortexParams& p, const GasModel& gas);

/// Oblique density sine wave advected at constant speed; velocity and
/// pressure are uniform, so this solves the Euler equations exactly.
struct DensityWaveParams {
  double alpha = 0.1;
  Vec2 a{1.0, 1.0};  // advection velocity
  double p0 = 1.0;
};

State density_wave(const Vec2& x, double t, const DensityWaveParams& p, const GasModel& gas);

/// Uniform flow.
struct FreestreamParams {
  double rho = 1.0;
  Vec2 v{1.0, 0.5};
  double p = 1.0;
};

State freestream(const FreestreamParams& p, const GasModel& gas);

}  // namespace sdg
