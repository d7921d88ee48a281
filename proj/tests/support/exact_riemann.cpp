#include "exact_riemann.hpp"

#include <cmath>
#include <stdexcept>

namespace sdg::test {

namespace {

struct SideFn {
  double rho, u, p, c, A, B;
};

SideFn make_side(const Riemann1D& s, double gamma) {
  SideFn f;
  f.rho = s.rho;
  f.u = s.u;
  f.p = s.p;
  f.c = std::sqrt(gamma * s.p / s.rho);
  f.A = 2.0 / ((gamma + 1.0) * s.rho);
  f.B = (gamma - 1.0) / (gamma + 1.0) * s.p;
  return f;
}

// Pressure function and derivative across one wave (shock or rarefaction).
void pressure_fn(const SideFn& k, double gamma, double p, double& f, double& df) {
  if (p > k.p) {
    const double root = std::sqrt(k.A / (p + k.B));
    f = (p - k.p) * root;
    df = root * (1.0 - 0.5 * (p - k.p) / (p + k.B));
  } else {
    const double pr = p / k.p;
    f = 2.0 * k.c / (gamma - 1.0) * (std::pow(pr, (gamma - 1.0) / (2.0 * gamma)) - 1.0);
    df = std::pow(pr, -(gamma + 1.0) / (2.0 * gamma)) / (k.rho * k.c);
  }
}

double solve_pstar(const SideFn& l, const SideFn& r, double gamma, double du) {
  // Two-rarefaction initial guess, clipped away from vacuum.
  const double z = (gamma - 1.0) / (2.0 * gamma);
  double p = std::pow((l.c + r.c - 0.5 * (gamma - 1.0) * du) /
                          (l.c / std::pow(l.p, z) + r.c / std::pow(r.p, z)),
                      1.0 / z);
  p = std::max(p, 1e-12);
  for (int it = 0; it < 100; ++it) {
    double fl, dfl, fr, dfr;
    pressure_fn(l, gamma, p, fl, dfl);
    pressure_fn(r, gamma, p, fr, dfr);
    const double g = fl + fr + du;
    const double step = g / (dfl + dfr);
    double pn = p - step;
    if (pn <= 0.0) pn = 0.5 * p;
    if (std::abs(pn - p) < 1e-14 * (0.5 * (pn + p))) {
      p = pn;
      break;
    }
    p = pn;
  }
  return p;
}

}  // namespace

Riemann1D exact_riemann_sample(const Riemann1D& left, const Riemann1D& right, double gamma,
                               double s) {
  const SideFn l = make_side(left, gamma);
  const SideFn r = make_side(right, gamma);
  const double du = right.u - left.u;
  if (2.0 * (l.c + r.c) / (gamma - 1.0) <= du)
    throw std::runtime_error("vacuum generated in Riemann problem");

  const double pstar = solve_pstar(l, r, gamma, du);
  double fl, dfl, fr, dfr;
  pressure_fn(l, gamma, pstar, fl, dfl);
  pressure_fn(r, gamma, pstar, fr, dfr);
  const double ustar = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);

  const double g1 = (gamma - 1.0) / (gamma + 1.0);
  if (s <= ustar) {
    // Left of the contact.
    if (pstar > left.p) {
      const double sl =
          left.u - l.c * std::sqrt((gamma + 1.0) / (2.0 * gamma) * pstar / left.p +
                                   (gamma - 1.0) / (2.0 * gamma));
      if (s <= sl) return left;
      const double rho = left.rho * ((pstar / left.p + g1) / (g1 * pstar / left.p + 1.0));
      return {rho, ustar, pstar};
    }
    const double shl = left.u - l.c;
    if (s <= shl) return left;
    const double cstar = l.c * std::pow(pstar / left.p, (gamma - 1.0) / (2.0 * gamma));
    const double stl = ustar - cstar;
    if (s >= stl) {
      const double rho = left.rho * std::pow(pstar / left.p, 1.0 / gamma);
      return {rho, ustar, pstar};
    }
    // Inside the left fan.
    const double c = 2.0 / (gamma + 1.0) * (l.c + 0.5 * (gamma - 1.0) * (left.u - s));
    const double u = 2.0 / (gamma + 1.0) * (l.c + 0.5 * (gamma - 1.0) * left.u + s);
    const double rho = left.rho * std::pow(c / l.c, 2.0 / (gamma - 1.0));
    const double p = left.p * std::pow(c / l.c, 2.0 * gamma / (gamma - 1.0));
    return {rho, u, p};
  }

  // Right of the contact.
  if (pstar > right.p) {
    const double sr =
        right.u + r.c * std::sqrt((gamma + 1.0) / (2.0 * gamma) * pstar / right.p +
                                  (gamma - 1.0) / (2.0 * gamma));
    if (s >= sr) return right;
    const double rho = right.rho * ((pstar / right.p + g1) / (g1 * pstar / right.p + 1.0));
    return {rho, ustar, pstar};
  }
  const double shr = right.u + r.c;
  if (s >= shr) return right;
  const double cstar = r.c * std::pow(pstar / right.p, (gamma - 1.0) / (2.0 * gamma));
  const double str = ustar + cstar;
  if (s <= str) {
    const double rho = right.rho * std::pow(pstar / right.p, 1.0 / gamma);
    return {rho, ustar, pstar};
  }
  const double c = 2.0 / (gamma + 1.0) * (r.c - 0.5 * (gamma - 1.0) * (right.u - s));
  const double u = 2.0 / (gamma + 1.0) * (-r.c + 0.5 * (gamma - 1.0) * right.u + s);
  const double rho = right.rho * std::pow(c / r.c, 2.0 / (gamma - 1.0));
  const double p = right.p * std::pow(c / r.c, 2.0 * gamma / (gamma - 1.0));
  return {rho, u, p};
}

}  // namespace sdg::test
