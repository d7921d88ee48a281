#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace sdg {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ParamFile ParamFile::parse_string(const std::string& text) {
  ParamFile p;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
    p.values_[section.empty() ? key : section + "." + key] = value;
  }
  return p;
}

ParamFile ParamFile::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_string(buf.str());
}

std::string ParamFile::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

std::string ParamFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ParamFile::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    return std::stod(s);
  } catch (...) {
    throw ConfigError("config key '" + key + "' is not a number: " + s);
  }
}

double ParamFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long ParamFile::get_long(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key);
  try {
    return std::stol(s);
  } catch (...) {
    throw ConfigError("config key '" + key + "' is not an integer: " + s);
  }
}

bool ParamFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + s);
}

std::vector<double> ParamFile::get_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream is(get_string(key));
  std::string tok;
  while (is >> tok) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw ConfigError("config key '" + key + "' has a non-numeric entry: " + tok);
    }
  }
  return out;
}

std::vector<long> ParamFile::get_int_list(const std::string& key) const {
  std::vector<long> out;
  for (double v : get_list(key)) out.push_back(static_cast<long>(v));
  return out;
}

CaseDef::Kind CaseDef::kind_from_string(const std::string& s) {
  if (s == "freestream") return Kind::Freestream;
  if (s == "density-wave" || s == "density_wave") return Kind::DensityWave;
  if (s == "vortex") return Kind::Vortex;
  throw ConfigError("unknown case '" + s + "' (expected freestream, density-wave, vortex)");
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_params(ParamFile::parse_file(path));
}

RunConfig RunConfig::from_params(const ParamFile& p) {
  RunConfig cfg;

  cfg.gas.gamma = p.get_double("gas.gamma", 1.4);
  cfg.gas.R = p.get_double("gas.R", 287.058);
  cfg.gas.mu = p.get_double("gas.mu", 0.0);
  cfg.gas.Pr = p.get_double("gas.Pr", 0.72);
  cfg.gas.validate();

  cfg.flow_case.kind = CaseDef::kind_from_string(p.get_string("case.name"));
  switch (cfg.flow_case.kind) {
    case CaseDef::Kind::Freestream: {
      auto& fs = cfg.flow_case.fs;
      fs.rho = p.get_double("case.rho", fs.rho);
      fs.v[0] = p.get_double("case.vx", fs.v[0]);
      fs.v[1] = p.get_double("case.vy", fs.v[1]);
      fs.p = p.get_double("case.p", fs.p);
      break;
    }
    case CaseDef::Kind::DensityWave: {
      auto& dw = cfg.flow_case.dw;
      dw.alpha = p.get_double("case.alpha", dw.alpha);
      dw.a[0] = p.get_double("case.ax", dw.a[0]);
      dw.a[1] = p.get_double("case.ay", dw.a[1]);
      dw.p0 = p.get_double("case.p0", dw.p0);
      if (!(dw.alpha < 1.0)) throw ConfigError("density wave needs alpha < 1");
      break;
    }
    case CaseDef::Kind::Vortex: {
      auto& vx = cfg.flow_case.vx;
      vx.eps = p.get_double("case.eps", vx.eps);
      vx.rc = p.get_double("case.rc", vx.rc);
      vx.rho_inf = p.get_double("case.rho_inf", vx.rho_inf);
      vx.v_inf = p.get_double("case.v_inf", vx.v_inf);
      vx.theta = p.get_double("case.theta", vx.theta);
      vx.ma_inf = p.get_double("case.ma_inf", vx.ma_inf);
      vx.center0[0] = p.get_double("case.center_x", vx.center0[0]);
      vx.center0[1] = p.get_double("case.center_y", vx.center0[1]);
      break;
    }
  }

  cfg.mesh.x0 = p.get_double("mesh.x0", 0.0);
  cfg.mesh.y0 = p.get_double("mesh.y0", 0.0);
  cfg.mesh.width = p.get_double("mesh.width");
  cfg.mesh.height = p.get_double("mesh.height");
  cfg.mesh.ny = static_cast<int>(p.get_long("mesh.ny", 1));
  cfg.mesh.periodic_x = p.get_bool("mesh.periodic_x", true);
  cfg.mesh.periodic_y = p.get_bool("mesh.periodic_y", true);
  const auto nx = p.get_int_list("mesh.band_nx");
  std::vector<double> frac(nx.size(), 1.0);
  if (p.has("mesh.band_frac")) frac = p.get_list("mesh.band_frac");
  std::vector<double> vg(nx.size(), 0.0);
  if (p.has("mesh.band_vg")) vg = p.get_list("mesh.band_vg");
  std::vector<long> bny(nx.size(), 0);
  if (p.has("mesh.band_ny")) bny = p.get_int_list("mesh.band_ny");
  if (frac.size() != nx.size() || vg.size() != nx.size() || bny.size() != nx.size())
    throw ConfigError("band_nx, band_frac, band_vg and band_ny must have matching lengths");
  for (std::size_t b = 0; b < nx.size(); ++b)
    cfg.mesh.bands.push_back(
        {static_cast<int>(nx[b]), frac[b], vg[b], static_cast<int>(bny[b])});

  cfg.degree = static_cast<int>(p.get_long("solver.degree", 3));
  cfg.node_kind = node_kind_from_string(p.get_string("solver.nodes", "lgl"));
  cfg.cfl = p.get_double("solver.cfl", 0.4);
  cfg.end_time = p.get_double("solver.end_time", 1.0);
  cfg.n_steps = p.get_long("solver.n_steps", 0);
  cfg.fixed_dt = p.get_double("solver.fixed_dt", 0.0);

  cfg.ranks = static_cast<int>(p.get_long("run.ranks", 1));
  cfg.backend = backend_from_string(p.get_string("run.backend", "inproc"));
  cfg.out_dir = p.get_string("run.out", "out");
  cfg.write_snapshot = p.get_bool("run.snapshot", false);

  if (p.has("study.degrees")) cfg.conv_degrees = p.get_int_list("study.degrees");
  cfg.conv_levels = static_cast<int>(p.get_long("study.levels", 3));
  if (p.has("study.ranks")) cfg.scale_ranks = p.get_int_list("study.ranks");
  cfg.scale_repetitions = static_cast<int>(p.get_long("study.repetitions", 5));

  return cfg;
}

MeshSpec RunConfig::refined_mesh(int level) const {
  MeshSpec spec = mesh;
  const int factor = 1 << level;
  spec.ny *= factor;
  for (auto& b : spec.bands) b.nx *= factor;
  return spec;
}

int capped_ranks(int requested) {
  const char* cap = std::getenv("SLIDEDG_MAX_RANKS");
  if (cap == nullptr) return requested;
  try {
    const int limit = std::stoi(cap);
    if (limit >= 1) return std::min(requested, limit);
  } catch (...) {
  }
  return requested;
}

}  // namespace sdg
