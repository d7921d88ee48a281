#include "mesh.hpp"

#include <cmath>

#include "errors.hpp"

namespace sdg {

InterfaceState displacement_state(double delta, double l_par, long n_faces) {
  // Reduce by whole periods to keep the fraction well conditioned.
  const double period = l_par * static_cast<double>(n_faces);
  double d = std::fmod(delta, period);
  if (d < 0.0) d += period;
  const double ratio = d / l_par;
  InterfaceState st;
  st.delta = d;
  st.n_delta = static_cast<long>(std::floor(ratio));
  st.s_delta = ratio - static_cast<double>(st.n_delta);
  if (st.n_delta >= n_faces) {  // guard the d == period rounding corner
    st.n_delta = 0;
    st.s_delta = 0.0;
    st.delta = 0.0;
  }
  return st;
}

Mesh::Mesh(const MeshSpec& spec) : spec_(spec) {
  if (spec.bands.empty()) throw ConfigError("mesh needs at least one band");
  if (spec.ny < 1) throw ConfigError("mesh needs ny >= 1");
  if (!(spec.width > 0.0) || !(spec.height > 0.0))
    throw ConfigError("mesh extents must be positive");

  double frac_sum = 0.0;
  for (const auto& b : spec.bands) {
    if (b.nx < 1) throw ConfigError("band element count nx must be >= 1");
    if (!(b.width_frac > 0.0)) throw ConfigError("band width fraction must be positive");
    frac_sum += b.width_frac;
  }

  const int nb = static_cast<int>(spec.bands.size());
  bands_.resize(nb);
  band_offset_.resize(nb);
  double x = spec.x0;
  double acc = 0.0;
  for (int b = 0; b < nb; ++b) {
    Band& band = bands_[b];
    band.id = b;
    band.x_lo = x;
    acc += spec.bands[b].width_frac;
    band.x_hi = (b == nb - 1) ? spec.x0 + spec.width : spec.x0 + spec.width * acc / frac_sum;
    x = band.x_hi;
    band.nx = spec.bands[b].nx;
    band.ny = spec.bands[b].ny > 0 ? spec.bands[b].ny : spec.ny;
    band.hx = (band.x_hi - band.x_lo) / band.nx;
    band.hy = spec.height / band.ny;
    band.vg_y = spec.bands[b].vg_y;
    band_offset_[b] = n_elements_;
    n_elements_ += band.n_elements();
    if (band.moving() && band.vg_y < 0.0)
      throw ConfigError("moving bands must translate toward +y");
    if (band.moving() && !spec.periodic_y)
      throw ConfigError("a moving band requires periodicity along the movement direction");
  }

  // Detect sliding interfaces between adjacent band pairs, including the
  // periodic wrap pair. Faces of adjacent bands must line up, so the face
  // counts (and with them the face length along the interface) must agree.
  const int n_pairs = spec.periodic_x ? nb : nb - 1;
  for (int p = 0; p < n_pairs; ++p) {
    const int left = p;
    const int right = (p + 1) % nb;
    if (nb == 1 && left == right) continue;  // single band wrapping onto itself
    const Band& bl = bands_[left];
    const Band& br = bands_[right];
    if (bl.ny != br.ny)
      throw ConfigError("interface face counts differ between bands " +
                        std::to_string(left) + " and " + std::to_string(right));
    if (bl.vg_y == br.vg_y) continue;  // conforming pair, no relative motion
    if (bl.vg_y != 0.0 && br.vg_y != 0.0)
      throw ConfigError("sliding interface requires one static side");
    SlidingInterface iface;
    iface.id = static_cast<int>(interfaces_.size());
    iface.left_band = left;
    iface.right_band = right;
    iface.static_is_left = (bl.vg_y == 0.0);
    iface.x_pos = bl.x_hi;
    iface.l_par = bl.hy;
    iface.n_faces = bl.ny;
    iface.vg_rel = iface.static_is_left ? br.vg_y : bl.vg_y;
    interfaces_.push_back(iface);
  }
}

void Mesh::locate(int gid, int& band, int& ix, int& iy) const {
  band = 0;
  while (band + 1 < static_cast<int>(bands_.size()) && gid >= band_offset_[band + 1]) ++band;
  const int local = gid - band_offset_[band];
  ix = local / bands_[band].ny;
  iy = local % bands_[band].ny;
}

ElementMetrics Mesh::metrics(int band) const {
  const Band& b = bands_[band];
  ElementMetrics m;
  m.jac = 0.25 * b.hx * b.hy;
  m.dxi_dx = 2.0 / b.hx;
  m.deta_dy = 2.0 / b.hy;
  m.sj_x = 0.5 * b.hy;
  m.sj_y = 0.5 * b.hx;
  return m;
}

Vec2 Mesh::element_origin(int band, int ix, int iy) const {
  const Band& b = bands_[band];
  return {b.x_lo + ix * b.hx, spec_.y0 + iy * b.hy};
}

Vec2 Mesh::physical(int band, int ix, int iy, double xi, double eta, double time) const {
  const Band& b = bands_[band];
  const Vec2 o = element_origin(band, ix, iy);
  return {o[0] + 0.5 * (xi + 1.0) * b.hx, o[1] + 0.5 * (eta + 1.0) * b.hy + b.vg_y * time};
}

}  // namespace sdg
