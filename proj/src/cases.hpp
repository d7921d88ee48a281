#pragma once

#include <string>

#include "exact_solutions.hpp"

namespace sdg {

/// A flow case with a known exact solution, used for initial data,
/// Dirichlet traces and error norms.
struct CaseDef {
  enum class Kind { Freestream, DensityWave, Vortex };
  Kind kind = Kind::Freestream;
  FreestreamParams fs;
  DensityWaveParams dw;
  VortexParams vx;

  State operator()(const Vec2& x, double t, const GasModel& gas) const {
    switch (kind) {
      case Kind::Freestream: return freestream(fs, gas);
      case Kind::DensityWave: return density_wave(x, t, dw, gas);
      case Kind::Vortex: return isentropic_vortex(x, t, vx, gas);
    }
    return freestream(fs, gas);
  }

  static Kind kind_from_string(const std::string& s);
};

}  // namespace sdg
