#include <doctest.h>

#include <cmath>
#include <functional>

#include "exact_solutions.hpp"
#include "flux.hpp"

using namespace sdg;

namespace {

// Finite-difference oracle: residual of the Euler equations at (x, t),
// fourth-order central differences in space and time.
std::array<double, 4> fd_euler_residual(const std::function<State(Vec2, double)>& sol,
                                        const GasModel& gas, Vec2 x, double t, double h) {
  auto fx = [&](double xx, double yy, double tt) {
    return ale_convective_flux(sol({xx, yy}, tt), {0.0, 0.0}, gas).fx;
  };
  auto fy = [&](double xx, double yy, double tt) {
    return ale_convective_flux(sol({xx, yy}, tt), {0.0, 0.0}, gas).fy;
  };
  auto ut = [&](double xx, double yy, double tt) { return sol({xx, yy}, tt); };

  auto d4 = [h](const std::function<State(double)>& f) {
    State out;
    const State fp2 = f(2.0 * h), fp1 = f(h), fm1 = f(-h), fm2 = f(-2.0 * h);
    for (int v = 0; v < 4; ++v)
      out[v] = (-fp2[v] + 8.0 * fp1[v] - 8.0 * fm1[v] + fm2[v]) / (12.0 * h);
    return out;
  };

  const State dudt = d4([&](double d) { return ut(x[0], x[1], t + d); });
  const State dfdx = d4([&](double d) { return fx(x[0] + d, x[1], t); });
  const State dfdy = d4([&](double d) { return fy(x[0], x[1] + d, t); });

  std::array<double, 4> res;
  for (int v = 0; v < 4; ++v) res[v] = dudt[v] + dfdx[v] + dfdy[v];
  return res;
}

}  // namespace

TEST_SUITE("exact_solutions") {

TEST_CASE("vortex far field and center") {
  GasModel gas;
  gas.R = 1.0;
  VortexParams p;
  p.center0 = {0.0, 0.0};

  const State far = isentropic_vortex({80.0, 80.0}, 0.0, p, gas);
  const State inf = freestream({1.0, {std::cos(p.theta), std::sin(p.theta)}, p.p_inf(gas)},
                               gas);
  for (int v = 0; v < 4; ++v) CHECK(far[v] == doctest::Approx(inf[v]).epsilon(1e-12));

  const State center = isentropic_vortex({0.0, 0.0}, 0.0, p, gas);
  CHECK(center[1] / center[0] == doctest::Approx(std::cos(p.theta)).epsilon(1e-13));
  CHECK(center[2] / center[0] == doctest::Approx(std::sin(p.theta)).epsilon(1e-13));

  // Density deficit is maximal at the center.
  CHECK(center[0] < isentropic_vortex({0.5, 0.0}, 0.0, p, gas)[0]);
  CHECK(center[0] < isentropic_vortex({0.0, 1.0}, 0.0, p, gas)[0]);
}

TEST_CASE("vortex advects with the freestream") {
  GasModel gas;
  gas.R = 1.0;
  VortexParams p;
  p.center0 = {1.0, 2.0};
  const double t = 1.7;
  const Vec2 shift{std::cos(p.theta) * t, std::sin(p.theta) * t};
  const State a = isentropic_vortex({1.3, 2.4}, 0.0, p, gas);
  const State b = isentropic_vortex({1.3 + shift[0], 2.4 + shift[1]}, t, p, gas);
  for (int v = 0; v < 4; ++v) CHECK(a[v] == doctest::Approx(b[v]).epsilon(1e-13));
}

TEST_CASE("vortex satisfies the Euler equations") {
  GasModel gas;
  gas.R = 1.0;
  VortexParams p;
  p.center0 = {0.0, 0.0};
  auto sol = [&](Vec2 x, double t) { return isentropic_vortex(x, t, p, gas); };

  for (const Vec2 x : {Vec2{0.3, -0.2}, Vec2{1.0, 0.7}, Vec2{-1.4, 0.4}, Vec2{0.0, 2.0}}) {
    const auto res = fd_euler_residual(sol, gas, x, 0.31, 1e-3);
    for (int v = 0; v < 4; ++v) CHECK(std::abs(res[v]) < 1e-6);
  }
}

TEST_CASE("density wave values and exactness") {
  GasModel gas;
  gas.R = 1.0;
  DensityWaveParams p;
  p.alpha = 0.1;

  DensityWaveParams uniform = p;
  uniform.alpha = 0.0;
  const State u0 = density_wave({0.13, 0.57}, 0.9, uniform, gas);
  CHECK(u0[0] == doctest::Approx(2.0).epsilon(1e-15));

  // Zero phase and peak phase.
  const double t = 0.4;
  const double x_zero = (p.a[0] + p.a[1]) * t;  // x1 + x2 == (a1+a2) t
  CHECK(density_wave({x_zero, 0.0}, t, p, gas)[0] == doctest::Approx(2.0).epsilon(1e-13));
  const double x_peak = x_zero + 0.5;  // phase pi/2
  CHECK(density_wave({x_peak, 0.0}, t, p, gas)[0] == doctest::Approx(2.1).epsilon(1e-13));

  auto sol = [&](Vec2 x, double tt) { return density_wave(x, tt, p, gas); };
  for (const Vec2 x : {Vec2{0.0, 0.0}, Vec2{0.3, 1.1}, Vec2{1.9, 0.2}}) {
    const auto res = fd_euler_residual(sol, gas, x, 0.77, 1e-3);
    for (int v = 0; v < 4; ++v) CHECK(std::abs(res[v]) < 1e-6);
  }
}

}  // TEST_SUITE
