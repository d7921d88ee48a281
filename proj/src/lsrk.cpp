#include "lsrk.hpp"

#include <vector>

namespace sdg {

const std::array<double, 5> LowStorageRK::a = {
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
};

const std::array<double, 5> LowStorageRK::b = {
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
};

const std::array<double, 5> LowStorageRK::c = {
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
};

void lsrk_step(std::span<double> u, std::span<double> reg, double t, double dt,
               const std::function<void(double, std::span<const double>, std::span<double>)>& rhs) {
  static thread_local std::vector<double> dudt;
  dudt.assign(u.size(), 0.0);
  for (int s = 0; s < LowStorageRK::n_stages; ++s) {
    rhs(t + LowStorageRK::c[s] * dt, u, dudt);
    const double as = LowStorageRK::a[s];
    const double bs = LowStorageRK::b[s];
    for (std::size_t i = 0; i < u.size(); ++i) {
      reg[i] = as * reg[i] + dt * dudt[i];
      u[i] += bs * reg[i];
    }
  }
}

}  // namespace sdg
