#pragma once

#include <array>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace sdg {

/// Conserved variables [rho, rho v1, rho v2, rho e].
using State = std::array<double, 4>;
using Vec2 = std::array<double, 2>;

constexpr int kNumVars = 4;

inline State& operator+=(State& a, const State& b) {
  for (int v = 0; v < kNumVars; ++v) a[v] += b[v];
  return a;
}
inline State operator+(State a, const State& b) { return a += b; }
inline State operator-(const State& a, const State& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
inline State operator*(double s, const State& a) {
  return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

/// Perfect gas with Stokes' hypothesis for the bulk viscosity.
struct GasModel {
  double gamma = 1.4;
  double R = 287.058;
  double mu = 0.0;
  double Pr = 0.72;

  double lambda() const { return -2.0 / 3.0 * mu; }
  double conductivity() const { return gamma * R * mu / ((gamma - 1.0) * Pr); }
  bool viscous() const { return mu > 0.0; }

  void validate() const {
    if (!(gamma > 1.0) || !(R > 0.0) || !(mu >= 0.0) || !(Pr > 0.0))
      throw ConfigError("gas model requires gamma > 1, R > 0, mu >= 0, Pr > 0");
  }
};

struct Primitive {
  double rho, v1, v2, p;
};

inline double pressure(const State& u, const GasModel& gas) {
  return (gas.gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]);
}

/// Pressure with admissibility check; the error carries the offending values.
inline double pressure_checked(const State& u, const GasModel& gas) {
  if (!(u[0] > 0.0)) {
    std::ostringstream os;
    os << "nonpositive density rho=" << u[0];
    throw InvalidStateError(os.str());
  }
  const double p = pressure(u, gas);
  if (!(p > 0.0)) {
    std::ostringstream os;
    os << "nonpositive pressure p=" << p << " at state [" << u[0] << ", " << u[1] << ", "
       << u[2] << ", " << u[3] << "]";
    throw InvalidStateError(os.str());
  }
  return p;
}

inline Primitive to_primitive(const State& u, const GasModel& gas) {
  return {u[0], u[1] / u[0], u[2] / u[0], pressure(u, gas)};
}

inline State from_primitive(const Primitive& w, const GasModel& gas) {
  if (!(w.rho > 0.0) || !(w.p > 0.0))
    throw InvalidStateError("primitive state requires rho > 0 and p > 0");
  const double rhoe = w.p / (gas.gamma - 1.0) + 0.5 * w.rho * (w.v1 * w.v1 + w.v2 * w.v2);
  return {w.rho, w.rho * w.v1, w.rho * w.v2, rhoe};
}

inline double temperature(const State& u, const GasModel& gas) {
  return pressure(u, gas) / (u[0] * gas.R);
}

inline double sound_speed(const State& u, const GasModel& gas) {
  return std::sqrt(gas.gamma * pressure(u, gas) / u[0]);
}

inline bool admissible(const State& u, const GasModel& gas) {
  return u[0] > 0.0 && pressure(u, gas) > 0.0 && std::isfinite(u[0]) &&
         std::isfinite(u[1]) && std::isfinite(u[2]) && std::isfinite(u[3]);
}

}  // namespace sdg
