#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "config.hpp"
#include "driver.hpp"
#include "snapshot.hpp"

using namespace sdg;

namespace {

const char* kWaveConfig = R"(
[case]
name = density-wave
alpha = 0.1
ax = 1.0
ay = 1.0
p0 = 1.0

[gas]
gamma = 1.4
R = 1.0

[mesh]
width = 2.0
height = 2.0
ny = 6
band_nx = 2 2 2
band_vg = 0 1.0 0

[solver]
degree = 3
cfl = 0.4
end_time = 0.25

[run]
ranks = 1
out = /tmp/sdg_test_out
)";

}  // namespace

TEST_SUITE("driver") {

TEST_CASE("parameter file parsing") {
  const ParamFile p = ParamFile::parse_string("a = 1\n[sec]\nb = text # comment\nlist = 1 2 3\n");
  CHECK(p.get_double("a") == 1.0);
  CHECK(p.get_string("sec.b") == "text");
  CHECK(p.get_list("sec.list") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(p.get_long("sec.missing", 7) == 7);
  CHECK_THROWS_AS(p.get_string("sec.missing"), ConfigError);
  CHECK_THROWS_AS(ParamFile::parse_string("nonsense line\n"), ConfigError);
  CHECK_THROWS_AS(ParamFile::parse_string("[broken\n"), ConfigError);
}

TEST_CASE("run config construction and refinement") {
  const RunConfig cfg = RunConfig::from_params(ParamFile::parse_string(kWaveConfig));
  CHECK(cfg.flow_case.kind == CaseDef::Kind::DensityWave);
  CHECK(cfg.mesh.bands.size() == 3);
  CHECK(cfg.mesh.bands[1].vg_y == 1.0);
  CHECK(cfg.degree == 3);

  const MeshSpec fine = cfg.refined_mesh(1);
  CHECK(fine.ny == 12);
  CHECK(fine.bands[0].nx == 4);

  CHECK_THROWS_AS(
      RunConfig::from_params(ParamFile::parse_string("[case]\nname = warp\n")),
      ConfigError);
}

TEST_CASE("error norms vanish for the exact field") {
  const RunConfig cfg = RunConfig::from_params(ParamFile::parse_string(kWaveConfig));
  const Mesh mesh(cfg.mesh);
  const NodeSet ns(cfg.degree, cfg.node_kind);
  const GlobalField exact = sample_case(mesh, ns, cfg.flow_case, cfg.gas, 0.37);
  const ErrorNorms norms = error_norms(mesh, ns, exact, cfg.flow_case, cfg.gas, 0.37);
  for (int v = 0; v < kNumVars; ++v) {
    CHECK(norms.l2[v] < 1e-13);
    CHECK(norms.linf[v] < 1e-13);
  }
}

TEST_CASE("case runs are reproducible") {
  RunConfig cfg = RunConfig::from_params(ParamFile::parse_string(kWaveConfig));
  cfg.n_steps = 5;
  const CaseReport a = run_case(cfg, /*write_outputs=*/false);
  const CaseReport b = run_case(cfg, /*write_outputs=*/false);
  CHECK(a.norms.l2[0] == b.norms.l2[0]);
  CHECK(a.norms.linf[3] == b.norms.linf[3]);
  CHECK(a.run.field == b.run.field);
  CHECK(a.norms.l2[0] > 0.0);
  CHECK(a.mass_drift < 1e-12);
}

TEST_CASE("snapshot round trip") {
  const RunConfig cfg = RunConfig::from_params(ParamFile::parse_string(kWaveConfig));
  const Mesh mesh(cfg.mesh);
  const NodeSet ns(2, cfg.node_kind);
  const GlobalField field = sample_case(mesh, ns, cfg.flow_case, cfg.gas, 0.5);

  const std::string path = "/tmp/sdg_snapshot_test.sdg";
  write_snapshot(path, mesh, field, 0.5);
  double t = 0.0;
  const GlobalField back = read_snapshot(path, mesh, t);
  CHECK(t == 0.5);
  CHECK(back == field);
  std::remove(path.c_str());
}

TEST_CASE("worker cap from the environment") {
  ::setenv("SLIDEDG_MAX_RANKS", "2", 1);
  CHECK(capped_ranks(6) == 2);
  ::unsetenv("SLIDEDG_MAX_RANKS");
  CHECK(capped_ranks(6) == 6);
}

}  // TEST_SUITE
