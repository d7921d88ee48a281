#pragma once

#include <span>
#include <vector>

#include "cases.hpp"
#include "face_topology.hpp"
#include "flux.hpp"
#include "mesh.hpp"
#include "mortar.hpp"
#include "nodal_basis.hpp"
#include "partition.hpp"
#include "transport.hpp"

namespace sdg {

/// Per-rank participation in one side of one sliding interface.
struct InterfaceSideCtx {
  int iface_id = 0;
  const SlidingInterface* iface = nullptr;
  bool on_static = true;
  std::vector<SlidingFace> faces;  // sorted by i_par; position is i_face
  RankMaps maps;
  MappingM m;

  // Displacement accumulates per completed step; stages add an offset on top.
  double delta_base = 0.0;
  InterfaceState st;
  double sigma_side = -1.0;  // hanging-node position seen from this side
  bool conforming = true;
  MortarOperators ops;

  long last_topo_n = -1;
  bool last_topo_conforming = true;
  bool topo_valid = false;
  long rebuild_count = 0;

  MortarHalf half_of_sub(int i_sub) const {
    if (on_static) return i_sub == 0 ? MortarHalf::Lower : MortarHalf::Upper;
    return i_sub == 0 ? MortarHalf::Upper : MortarHalf::Lower;
  }
};

/// Sorted mortar bookkeeping and data arrays for one communication role.
/// Static-side ranks use the static role, moving-side ranks the moving one;
/// a single-rank run holds both and exchanges blocks by direct copy.
struct RoleArrays {
  std::vector<MortarTuple> cols;     // merged over interfaces, sorted
  std::vector<ScheduleEntry> sched;  // remote partners, ascending
  ScheduleEntry self_entry{0, 0, 0};
  int n_mortars = 0;

  std::vector<State> u_mine, u_theirs, flux;
  std::vector<double> lift_star;               // 3 scalars per node
  std::vector<double> grad_mine, grad_theirs;  // 6 scalars per node
};

struct SolverConfig {
  GasModel gas;
  CaseDef flow_case;
};

/// The DGSEM operator and low-storage RK integrator for one rank's elements.
class RankSolver {
 public:
  RankSolver(const Mesh& mesh, const Ownership& own, LocalDomain dom, const NodeSet& ns,
             const BasisOperators& basis, const SolverConfig& cfg, Transport& transport);

  /// One-time global exchange of the interface rank maps.
  void init_rank_maps();

  void set_initial_condition(double t0);

  /// Advances one low-storage RK step of size dt.
  void step(double dt);

  double time() const { return time_; }
  int step_index() const { return step_index_; }
  const LocalDomain& domain() const { return dom_; }
  std::span<const double> field() const { return field_; }
  std::span<double> field() { return field_; }

  /// Semidiscrete residual at the given stage time; also used directly by
  /// kernel-level tests.
  void compute_residual(double t_stage, std::span<const double> u, std::span<double> dudt);

  /// BR1 gradients of (v1, v2, T), 6 per node. All ranks must call this
  /// together when running distributed.
  void compute_gradients(double t_stage, std::span<const double> u);
  std::span<const double> gradients() const { return grad_; }

  double suggest_dt(double cfl) const;

  const InterfaceSideCtx* side_ctx(int iface_id, bool on_static) const;
  long total_rebuilds() const;

  /// Test hook: emits one unsanctioned collective-kind message per peer.
  void inject_collective();

 private:
  int n1() const { return ns_->count(); }
  std::size_t node_offset(int elem, int i, int j) const {
    return ((static_cast<std::size_t>(elem) * n1() + i) * n1() + j) * kNumVars;
  }
  State load_state(std::span<const double> u, int elem, int i, int j) const {
    const double* p = u.data() + node_offset(elem, i, j);
    return {p[0], p[1], p[2], p[3]};
  }
  State* trace_line(int elem, Side side) {
    return trace_.data() + (static_cast<std::size_t>(elem) * 4 + side) * n1();
  }
  State* flux_line(int elem, Side side) {
    return face_flux_.data() + (static_cast<std::size_t>(elem) * 4 + side) * n1();
  }
  double* lift_star_line(int elem, Side side) {
    return lift_star_trace_.data() + (static_cast<std::size_t>(elem) * 4 + side) * n1() * 3;
  }
  double* grad_trace_line(int elem, Side side) {
    return grad_trace_.data() + (static_cast<std::size_t>(elem) * 4 + side) * n1() * 6;
  }
  Side my_side_of(const RemoteFace& rf) const {
    if (rf.dir == 0) return rf.primary ? XPlus : XMinus;
    return rf.primary ? YPlus : YMinus;
  }

  // Pipeline phases.
  void update_interfaces(double t_stage);
  void rebuild_role(RoleArrays& role, const std::vector<int>& ctx_ids);
  void prolong_traces(std::span<const double> u);
  void fill_mortar_solution();
  void send_solution_phase();
  void run_lifting(double t_stage, std::span<const double> u);
  void assemble_gradients(std::span<const double> u);
  void send_gradient_phase();
  void receive_conf_gradients();
  void receive_mortar_gradients();
  void interior_face_phase();
  void volume_kernel(std::span<const double> u, std::span<double> dudt);
  void primary_flux_phase();
  void mortar_flux_phase();
  void replica_apply_phase();
  void mortar_apply_phase();
  void dirichlet_phase(double t_stage);
  void apply_all_faces(std::span<double> dudt);
  void check_admissible(std::span<const double> u) const;

  Vec2 face_node_position(int elem, Side side, int k, double t) const;
  State face_numerical_flux(const State& um, const State& up, int dir, double vg_n,
                            const double* gm, const double* gp) const;
  void receive_conf_solution(int batch_index);
  void receive_mortar_solution();

  const Mesh* mesh_;
  const Ownership* own_;
  LocalDomain dom_;
  const NodeSet* ns_;
  const BasisOperators* basis_;
  SolverConfig cfg_;
  Transport* transport_;

  Matrix weak_diff_;  // (1/w_i) D^T diag(w)
  std::vector<ElementMetrics> metrics_;
  std::vector<Vec2> grid_vel_;

  std::vector<double> field_;
  std::vector<double> rk_reg_;
  std::vector<double> dudt_;
  std::vector<double> grad_;

  std::vector<State> trace_;      // 4 sides per element
  std::vector<State> face_flux_;  // numerical flux per element side
  std::vector<double> grad_trace_;
  std::vector<double> lift_star_trace_;

  struct ConfBatch {
    int partner = 0;
    std::vector<int> faces;  // indices into dom_.remote_faces
  };
  std::vector<ConfBatch> primary_batches_, replica_batches_;
  std::vector<State> remote_u_;
  std::vector<double> remote_grad_;

  std::vector<InterfaceSideCtx> ctxs_;
  std::vector<int> static_ctx_ids_, moving_ctx_ids_;
  RoleArrays statics_, movings_;

  bool lifting_enabled_ = false;
  bool conf_u_received_ = false;
  bool mortar_u_received_ = false;
  bool grads_received_ = false;

  double time_ = 0.0;
  int step_index_ = 0;
  int stage_index_ = 0;
};

}  // namespace sdg
