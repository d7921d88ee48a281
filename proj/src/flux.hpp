#pragma once

#include "state.hpp"

namespace sdg {

/// Flux columns per coordinate direction.
struct FluxPair {
  State fx, fy;
};

/// Convective flux in the moving frame: Euler flux minus vg_i * U per column.
FluxPair ale_convective_flux(const State& u, const Vec2& vg, const GasModel& gas);

/// Gradients of the primitive set (v1, v2, T), one entry per direction.
struct PrimGrad {
  Vec2 dv1{0.0, 0.0};
  Vec2 dv2{0.0, 0.0};
  Vec2 dT{0.0, 0.0};
};

/// Viscous flux columns. Not shifted by grid velocity.
FluxPair viscous_flux(const State& u, const PrimGrad& g, const GasModel& gas);

/// Physical normal convective flux including the ALE shift -vg_n * U.
State normal_flux(const State& u, const Vec2& n, double vg_n, const GasModel& gas);

/// Roe flux with Harten/Hyman entropy fix on the acoustic waves; eigenvalues
/// are shifted by the normal grid speed vg_n.
State roe_flux(const State& ul, const State& ur, const Vec2& n, double vg_n,
               const GasModel& gas);

}  // namespace sdg
