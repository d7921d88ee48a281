#pragma once

#include <array>
#include <functional>
#include <span>

namespace sdg {

/// Five-stage fourth-order low-storage Runge-Kutta scheme (2N registers).
struct LowStorageRK {
  static constexpr int n_stages = 5;
  static const std::array<double, 5> a;
  static const std::array<double, 5> b;
  static const std::array<double, 5> c;
};

/// Advances u by one step of size dt. `rhs(stage_time, u, dudt)` evaluates
/// the semidiscrete right-hand side; `reg` is the single extra register and
/// must have the same length as u.
void lsrk_step(std::span<double> u, std::span<double> reg, double t, double dt,
               const std::function<void(double, std::span<const double>, std::span<double>)>& rhs);

}  // namespace sdg
