#pragma once

#include <map>
#include <string>
#include <vector>

#include "cases.hpp"
#include "mesh.hpp"
#include "runner.hpp"

namespace sdg {

/// Flat `key = value` parameter file with [section] headers and # comments.
class ParamFile {
 public:
  static ParamFile parse_file(const std::string& path);
  static ParamFile parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<long> get_int_list(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> raw text
};

enum class StudyMode { Single, Convergence, Scaling };

/// Everything a study needs: case, gas, mesh, discretization, run options.
struct RunConfig {
  CaseDef flow_case;
  GasModel gas;
  MeshSpec mesh;

  int degree = 3;
  NodeKind node_kind = NodeKind::LegendreGaussLobatto;
  double cfl = 0.4;
  double end_time = 1.0;
  long n_steps = 0;     // > 0 overrides end_time
  double fixed_dt = 0;  // > 0 overrides the CFL estimate

  int ranks = 1;
  Backend backend = Backend::InProc;
  std::string out_dir = "out";

  // Study parameters.
  std::vector<long> conv_degrees{2, 3, 4, 5};
  int conv_levels = 3;
  std::vector<long> scale_ranks{1, 2, 3, 4};
  int scale_repetitions = 5;

  bool write_snapshot = false;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_params(const ParamFile& p);

  /// Refined copy: every band element count and ny scaled by 2^level.
  MeshSpec refined_mesh(int level) const;
};

/// Applies the worker-count cap from the environment, if set.
int capped_ranks(int requested);

}  // namespace sdg
