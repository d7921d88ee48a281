#pragma once

#include <cstdint>
#include <vector>

#include "state.hpp"

namespace sdg {

/// One vertical band of the domain: a structured nx x ny block of
/// axis-aligned rectangular elements that may translate rigidly in y.
struct BandSpec {
  int nx = 1;
  double width_frac = 1.0;  // relative width, normalized over all bands
  double vg_y = 0.0;        // rigid translation speed along the interface
  int ny = 0;               // per-band override; 0 uses the mesh-wide ny
};

struct MeshSpec {
  double x0 = 0.0, y0 = 0.0;
  double width = 1.0, height = 1.0;
  int ny = 1;
  std::vector<BandSpec> bands;
  bool periodic_x = true;
  bool periodic_y = true;
};

struct Band {
  int id = 0;
  double x_lo = 0.0, x_hi = 0.0;
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;
  double vg_y = 0.0;
  bool moving() const { return vg_y != 0.0; }
  int n_elements() const { return nx * ny; }
};

/// Constant metric terms of an axis-aligned rectangular element.
struct ElementMetrics {
  double jac = 0.0;      // mapping Jacobian (hx*hy/4)
  double dxi_dx = 0.0;   // 2/hx
  double deta_dy = 0.0;  // 2/hy
  double sj_x = 0.0;     // surface Jacobian of xi-faces (hy/2)
  double sj_y = 0.0;     // surface Jacobian of eta-faces (hx/2)
};

/// Displacement of a moving side decomposed into whole and fractional faces.
struct InterfaceState {
  double delta = 0.0;
  long n_delta = 0;
  double s_delta = 0.0;
  bool conforming() const { return s_delta == 0.0; }
};

InterfaceState displacement_state(double delta, double l_par, long n_faces);

/// A planar sliding interface between two adjacent bands (right side of
/// band `left`, possibly the periodic wrap pair).
struct SlidingInterface {
  int id = 0;
  int left_band = 0;
  int right_band = 0;
  bool static_is_left = true;  // which side is static (the other moves)
  double x_pos = 0.0;
  double l_par = 0.0;
  long n_faces = 0;
  double vg_rel = 0.0;  // speed of the moving side

  int static_band() const { return static_is_left ? left_band : right_band; }
  int moving_band() const { return static_is_left ? right_band : left_band; }

  InterfaceState state_at(double time) const {
    return displacement_state(vg_rel * time, l_par, n_faces);
  }
};

class Mesh {
 public:
  explicit Mesh(const MeshSpec& spec);

  const MeshSpec& spec() const { return spec_; }
  const std::vector<Band>& bands() const { return bands_; }
  const Band& band(int b) const { return bands_[b]; }
  const std::vector<SlidingInterface>& interfaces() const { return interfaces_; }

  int n_elements() const { return n_elements_; }
  double l_par() const { return bands_.empty() ? 0.0 : spec_.height / spec_.ny; }

  /// Global element id; elements are numbered band by band, column-major
  /// within a band (x index outer, y index inner).
  int global_id(int band, int ix, int iy) const {
    return band_offset_[band] + ix * bands_[band].ny + iy;
  }
  void locate(int gid, int& band, int& ix, int& iy) const;

  ElementMetrics metrics(int band) const;

  /// Lower-left corner of an element in its build position (t = 0).
  Vec2 element_origin(int band, int ix, int iy) const;

  /// Physical position of reference point (xi, eta) at time t, including
  /// the band's rigid displacement.
  Vec2 physical(int band, int ix, int iy, double xi, double eta, double time) const;

  Vec2 grid_velocity(int band) const { return {0.0, bands_[band].vg_y}; }

 private:
  MeshSpec spec_;
  std::vector<Band> bands_;
  std::vector<SlidingInterface> interfaces_;
  std::vector<int> band_offset_;
  int n_elements_ = 0;
};

}  // namespace sdg
