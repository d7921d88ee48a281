#include <doctest.h>

#include <set>
#include <tuple>

#include "errors.hpp"
#include "mesh.hpp"
#include "partition.hpp"

using namespace sdg;

namespace {

MeshSpec three_band_spec(int nx = 2, int ny = 6) {
  MeshSpec spec;
  spec.width = 2.0;
  spec.height = 2.0;
  spec.ny = ny;
  spec.bands = {{nx, 1.0, 0.0}, {nx, 1.0, 1.0}, {nx, 1.0, 0.0}};
  return spec;
}

// The worked sorting example: five static faces with parallel indices 3..5,
// normal indices 1..2, one face length already surpassed, and the opposing
// side handled by ranks 4 and 7.
struct WorkedExample {
  std::vector<LocalInterfaceFace> faces;
  RankMaps maps;
  long n_delta = 1;
  long n_faces = 6;
};

WorkedExample worked_example() {
  WorkedExample ex;
  // Process-local face ids 5..9 against (i_par, i_perp).
  ex.faces = {{5, 4, 1}, {6, 4, 2}, {7, 5, 1}, {8, 3, 2}, {9, 3, 1}};

  ex.maps.moving_side.n_par = 6;
  ex.maps.moving_side.n_perp = 3;
  ex.maps.moving_side.ranks.assign(18, 9);  // unused entries get a bystander rank
  auto set = [&](long i_par, long i_perp, int rank) {
    ex.maps.moving_side.slot(i_par, i_perp) = rank;
  };
  set(1, 1, 7);
  set(2, 1, 7);
  set(3, 1, 4);
  set(4, 1, 4);
  set(1, 2, 7);
  set(2, 2, 4);
  set(3, 2, 4);
  set(4, 2, 4);
  return ex;
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("rank assignment splits bands proportionally") {
  const Mesh mesh(three_band_spec());

  const Ownership one = assign_ranks(mesh, 1);
  CHECK(one.band_blocks[0][0].rank == 0);
  CHECK(one.band_blocks[2][0].count == 12);

  const Ownership three = assign_ranks(mesh, 3);
  for (int b = 0; b < 3; ++b) {
    REQUIRE(three.band_blocks[b].size() == 1);
    CHECK(three.band_blocks[b][0].rank == b);
    CHECK(three.band_blocks[b][0].count == 12);
  }
}

TEST_CASE("six ranks over three equal bands give two ranks per band") {
  const Mesh mesh(three_band_spec(6, 6));  // 36 elements per band
  const Ownership own = assign_ranks(mesh, 6);
  int next = 0;
  for (int b = 0; b < 3; ++b) {
    REQUIRE(own.band_blocks[b].size() == 2);
    for (const auto& blk : own.band_blocks[b]) {
      CHECK(blk.rank == next++);
      CHECK(blk.count == 18);
    }
  }
}

TEST_CASE("two ranks separate the static and moving sides") {
  const Mesh mesh(three_band_spec());
  const Ownership own = assign_ranks(mesh, 2);
  CHECK(own.band_blocks[0][0].rank == 0);
  CHECK(own.band_blocks[1][0].rank == 1);
  CHECK(own.band_blocks[2][0].rank == 0);
}

TEST_CASE("undersized rank counts are rejected") {
  MeshSpec spec = three_band_spec();
  spec.bands.push_back({2, 1.0, 0.0});
  spec.bands.push_back({2, 1.0, 0.0});
  const Mesh mesh(spec);  // five bands
  CHECK_THROWS_AS(assign_ranks(mesh, 3), ConfigError);
  CHECK_THROWS_AS(assign_ranks(mesh, 0), ConfigError);

  // Two ranks need both a static and a moving group.
  MeshSpec all_static = three_band_spec();
  all_static.bands[1].vg_y = 0.0;
  const Mesh stat(all_static);
  CHECK_THROWS_AS(assign_ranks(stat, 2), ConfigError);
}

TEST_CASE("worked sorting example reproduces the index arrays") {
  const WorkedExample ex = worked_example();
  IndexArrayA a;
  MappingM m;
  rebuild_index_arrays(ex.faces, ex.maps, ex.n_delta, ex.n_faces, /*static=*/true,
                       /*conforming=*/false, a, m);

  REQUIRE(a.cols.size() == 10);
  const int exp_rank[10] = {4, 4, 4, 4, 4, 4, 7, 7, 7, 7};
  const long exp_par[10] = {3, 4, 4, 4, 5, 5, 3, 3, 3, 4};
  const long exp_perp[10] = {2, 1, 2, 2, 1, 1, 1, 1, 2, 1};
  const int exp_sub[10] = {1, 1, 0, 1, 0, 1, 0, 1, 0, 0};
  const long exp_face[10] = {8, 5, 6, 6, 7, 7, 9, 9, 8, 5};
  for (int c = 0; c < 10; ++c) {
    CHECK(a.cols[c].partner_rank == exp_rank[c]);
    CHECK(a.cols[c].i_par == exp_par[c]);
    CHECK(a.cols[c].i_perp == exp_perp[c]);
    CHECK(a.cols[c].i_sub == exp_sub[c]);
    CHECK(a.cols[c].i_face == exp_face[c]);
  }

  // m holds one-based mortar indices in the reference; ours are zero-based.
  const int exp_m0[5] = {10, 3, 5, 9, 7};
  const int exp_m1[5] = {2, 4, 6, 1, 8};
  REQUIRE(m.face_lo == 5);
  for (int f = 0; f < 5; ++f) {
    CHECK(m.at(0, 5 + f) + 1 == exp_m0[f]);
    CHECK(m.at(1, 5 + f) + 1 == exp_m1[f]);
  }

  ScheduleEntry self;
  const auto sched = build_schedule(a.cols, /*self=*/0, self);
  REQUIRE(sched.size() == 2);
  CHECK(sched[0].partner == 4);
  CHECK(sched[0].offset == 0);
  CHECK(sched[0].count == 6);
  CHECK(sched[1].partner == 7);
  CHECK(sched[1].offset == 6);
  CHECK(sched[1].count == 4);
  CHECK(self.count == 0);
}

TEST_CASE("sorting is idempotent and keys are unique") {
  const WorkedExample ex = worked_example();
  IndexArrayA a;
  MappingM m;
  rebuild_index_arrays(ex.faces, ex.maps, ex.n_delta, ex.n_faces, true, false, a, m);
  auto resorted = a.cols;
  sort_index_array(resorted);
  for (std::size_t c = 0; c < a.cols.size(); ++c) {
    CHECK(resorted[c].i_face == a.cols[c].i_face);
    CHECK(resorted[c].i_sub == a.cols[c].i_sub);
  }
  std::set<std::tuple<int, long, long, int>> keys;
  for (const auto& t : a.cols)
    keys.insert(std::make_tuple(t.partner_rank, t.i_par, t.i_perp, t.i_sub));
  CHECK(keys.size() == a.cols.size());
}

TEST_CASE("conforming single-partner case sorts by the face indices alone") {
  RankMaps maps;
  maps.moving_side.n_par = 4;
  maps.moving_side.n_perp = 1;
  maps.moving_side.ranks.assign(4, 3);
  std::vector<LocalInterfaceFace> faces = {{0, 2, 0}, {1, 0, 0}, {2, 3, 0}, {3, 1, 0}};
  IndexArrayA a;
  MappingM m;
  rebuild_index_arrays(faces, maps, 0, 4, true, /*conforming=*/true, a, m);
  REQUIRE(a.cols.size() == 4);  // one full-width mortar per face
  for (const auto& t : a.cols) CHECK(t.i_sub == 1);
  for (std::size_t c = 1; c < a.cols.size(); ++c)
    CHECK(a.cols[c - 1].i_par < a.cols[c].i_par);
}

TEST_CASE("both endpoints derive matching message blocks independently") {
  // Two ranks book the same interface from opposite sides; the schedule
  // blocks they compute must agree in size and in the global key order.
  const long n_faces = 8;
  RankMaps maps;
  maps.static_side.n_par = n_faces;
  maps.static_side.n_perp = 1;
  maps.static_side.ranks.assign(n_faces, 0);  // rank 0 owns the static side
  maps.moving_side.n_par = n_faces;
  maps.moving_side.n_perp = 1;
  maps.moving_side.ranks.assign(n_faces, 1);  // rank 1 owns the moving side

  std::vector<LocalInterfaceFace> static_faces, moving_faces;
  for (long i = 0; i < n_faces; ++i) {
    static_faces.push_back({i, i, 0});
    moving_faces.push_back({i, i, 0});
  }
  const long n_delta = 3;

  IndexArrayA a_static, a_moving;
  MappingM m_static, m_moving;
  rebuild_index_arrays(static_faces, maps, n_delta, n_faces, true, false, a_static,
                       m_static);
  rebuild_index_arrays(moving_faces, maps, n_delta, n_faces, false, false, a_moving,
                       m_moving);

  ScheduleEntry self0, self1;
  const auto sched_static = build_schedule(a_static.cols, 0, self0);
  const auto sched_moving = build_schedule(a_moving.cols, 1, self1);
  REQUIRE(sched_static.size() == 1);
  REQUIRE(sched_moving.size() == 1);
  CHECK(sched_static[0].partner == 1);
  CHECK(sched_moving[0].partner == 0);
  REQUIRE(sched_static[0].count == sched_moving[0].count);

  // Stamp check: the aligned entries must reference the same global mortar.
  for (int k = 0; k < sched_static[0].count; ++k) {
    const MortarTuple& s = a_static.cols[sched_static[0].offset + k];
    const MortarTuple& mv = a_moving.cols[sched_moving[0].offset + k];
    CHECK(s.i_par == mv.i_par);
    CHECK(s.i_perp == mv.i_perp);
    CHECK(s.i_sub == mv.i_sub);
  }
}

TEST_CASE("performance index formula") {
  CHECK(measure_pid(10.0, 1, 1000, 100, 5) == doctest::Approx(2e-5).epsilon(1e-12));
  CHECK(measure_pid(10.0, 2, 1000, 100, 5) == doctest::Approx(4e-5).epsilon(1e-12));
  CHECK_THROWS_AS(measure_pid(1.0, 0, 1000, 100, 5), ConfigError);
}

}  // TEST_SUITE
