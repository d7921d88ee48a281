#include <doctest.h>

#include "errors.hpp"
#include "face_topology.hpp"
#include "mesh.hpp"
#include "partition.hpp"

using namespace sdg;

namespace {

MeshSpec three_band_spec(int nx_per_band = 2, int ny = 6, double vg = 1.0) {
  MeshSpec spec;
  spec.width = 2.0;
  spec.height = 2.0;
  spec.ny = ny;
  spec.bands = {{nx_per_band, 1.0, 0.0}, {nx_per_band, 1.0, vg}, {nx_per_band, 1.0, 0.0}};
  return spec;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("three bands with a moving center give two sliding interfaces") {
  const Mesh mesh(three_band_spec());
  REQUIRE(mesh.interfaces().size() == 2);
  for (const auto& iface : mesh.interfaces()) {
    CHECK(iface.n_faces == 6);
    CHECK(iface.l_par == doctest::Approx(2.0 / 6.0));
    CHECK(iface.moving_band() == 1);
  }
  CHECK(mesh.interfaces()[0].static_band() == 0);
  CHECK(mesh.interfaces()[0].static_is_left);
  CHECK(mesh.interfaces()[1].static_band() == 2);
  CHECK_FALSE(mesh.interfaces()[1].static_is_left);
  CHECK(mesh.n_elements() == 36);
}

TEST_CASE("single static band has no sliding interfaces") {
  MeshSpec spec;
  spec.width = 1.0;
  spec.height = 1.0;
  spec.ny = 4;
  spec.bands = {{4, 1.0, 0.0}};
  const Mesh mesh(spec);
  CHECK(mesh.interfaces().empty());
}

TEST_CASE("mismatched interface spacing is rejected") {
  MeshSpec spec = three_band_spec();
  spec.bands[1].ny = 8;  // finer than the neighbors
  CHECK_THROWS_AS(Mesh{spec}, ConfigError);
}

TEST_CASE("moving band requires periodic movement direction and one static side") {
  MeshSpec spec = three_band_spec();
  spec.periodic_y = false;
  CHECK_THROWS_AS(Mesh{spec}, ConfigError);

  MeshSpec both = three_band_spec();
  both.bands[0].vg_y = 0.5;  // both sides of the interface would move
  CHECK_THROWS_AS(Mesh{both}, ConfigError);

  MeshSpec backwards = three_band_spec();
  backwards.bands[1].vg_y = -1.0;
  CHECK_THROWS_AS(Mesh{backwards}, ConfigError);
}

TEST_CASE("displacement decomposition") {
  const double l = 1.0;
  const long nf = 100;

  auto st = displacement_state(0.4, l, nf);
  CHECK(st.n_delta == 0);
  CHECK(st.s_delta == doctest::Approx(0.4).epsilon(1e-13));
  CHECK_FALSE(st.conforming());

  st = displacement_state(1.1, l, nf);
  CHECK(st.n_delta == 1);
  CHECK(st.s_delta == doctest::Approx(0.1).epsilon(1e-12));

  st = displacement_state(1.0, l, nf);
  CHECK(st.n_delta == 1);
  CHECK(st.s_delta == 0.0);
  CHECK(st.conforming());
}

TEST_CASE("displacement is periodic over the interface extent") {
  const double l = 1.0 / 3.0;
  const long nf = 6;
  for (double delta : {0.07, 0.5, 1.23, 1.999}) {
    const auto a = displacement_state(delta, l, nf);
    const auto b = displacement_state(delta + nf * l, l, nf);
    CHECK(a.n_delta == b.n_delta);
    CHECK(a.s_delta == doctest::Approx(b.s_delta).epsilon(1e-10));
  }
}

TEST_CASE("metrics of axis-aligned elements") {
  const Mesh mesh(three_band_spec());
  const ElementMetrics met = mesh.metrics(0);
  const Band& b = mesh.band(0);
  CHECK(met.jac == doctest::Approx(0.25 * b.hx * b.hy));
  CHECK(met.jac > 0.0);
  CHECK(met.sj_x == doctest::Approx(0.5 * b.hy));
  CHECK(met.sj_y == doctest::Approx(0.5 * b.hx));
  CHECK(met.dxi_dx == doctest::Approx(2.0 / b.hx));
}

TEST_CASE("element ids and positions") {
  const Mesh mesh(three_band_spec());
  int band, ix, iy;
  mesh.locate(mesh.global_id(1, 1, 3), band, ix, iy);
  CHECK(band == 1);
  CHECK(ix == 1);
  CHECK(iy == 3);

  // The moving band translates rigidly with time.
  const Vec2 a = mesh.physical(1, 0, 0, 0.0, 0.0, 0.0);
  const Vec2 b = mesh.physical(1, 0, 0, 0.0, 0.0, 2.5);
  CHECK(b[0] == doctest::Approx(a[0]));
  CHECK(b[1] == doctest::Approx(a[1] + 2.5));

  // Static bands do not move.
  const Vec2 c = mesh.physical(0, 0, 0, 0.3, -0.7, 0.0);
  const Vec2 d = mesh.physical(0, 0, 0, 0.3, -0.7, 2.5);
  CHECK(c[0] == d[0]);
  CHECK(c[1] == d[1]);
}

TEST_CASE("local domain face inventory on one rank") {
  const Mesh mesh(three_band_spec());
  const Ownership own = assign_ranks(mesh, 1);
  const LocalDomain dom = build_local_domain(mesh, own, 0);
  CHECK(dom.elements.size() == 36);
  // 36 y-faces plus interior x-faces of each band (6 per band) plus the
  // conforming periodic wrap between the two static bands (6 faces).
  CHECK(dom.interior_faces.size() == 36 + 18 + 6);
  CHECK(dom.remote_faces.empty());
  CHECK(dom.dirichlet_faces.empty());
  REQUIRE(dom.sliding_faces.size() == 2);
  CHECK(dom.sliding_faces[0].size() == 12);  // both sides on this rank
  CHECK(dom.sliding_faces[1].size() == 12);
}

TEST_CASE("local domains partition faces across ranks") {
  const Mesh mesh(three_band_spec());
  const Ownership own = assign_ranks(mesh, 3);
  std::size_t total_elems = 0, sliding = 0;
  for (int r = 0; r < 3; ++r) {
    const LocalDomain dom = build_local_domain(mesh, own, r);
    total_elems += dom.elements.size();
    for (const auto& sf : dom.sliding_faces) sliding += sf.size();
    for (const auto& rf : dom.remote_faces) CHECK(rf.partner != r);
  }
  CHECK(total_elems == 36);
  CHECK(sliding == 24);
}

}  // TEST_SUITE
