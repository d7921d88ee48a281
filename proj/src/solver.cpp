#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "lsrk.hpp"

namespace sdg {

namespace {

void pack_states(const State* line, int count, std::vector<double>& out) {
  const std::size_t base = out.size();
  out.resize(base + static_cast<std::size_t>(count) * kNumVars);
  std::memcpy(out.data() + base, line, static_cast<std::size_t>(count) * sizeof(State));
}

void unpack_states(const double* in, State* line, int count) {
  std::memcpy(line, in, static_cast<std::size_t>(count) * sizeof(State));
}

}  // namespace

RankSolver::RankSolver(const Mesh& mesh, const Ownership& own, LocalDomain dom,
                       const NodeSet& ns, const BasisOperators& basis,
                       const SolverConfig& cfg, Transport& transport)
    : mesh_(&mesh),
      own_(&own),
      dom_(std::move(dom)),
      ns_(&ns),
      basis_(&basis),
      cfg_(cfg),
      transport_(&transport) {
  const int n = n1();
  weak_diff_ = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m)
      weak_diff_(i, m) = ns.weights()[m] * basis.diff(m, i) / ns.weights()[i];

  const int ne = static_cast<int>(dom_.elements.size());
  metrics_.resize(ne);
  grid_vel_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    metrics_[e] = mesh.metrics(dom_.elements[e].band);
    grid_vel_[e] = mesh.grid_velocity(dom_.elements[e].band);
  }

  const std::size_t nn = static_cast<std::size_t>(ne) * n * n * kNumVars;
  field_.assign(nn, 0.0);
  rk_reg_.assign(nn, 0.0);
  dudt_.assign(nn, 0.0);
  grad_.assign(static_cast<std::size_t>(ne) * n * n * 6, 0.0);
  trace_.assign(static_cast<std::size_t>(ne) * 4 * n, State{});
  face_flux_.assign(static_cast<std::size_t>(ne) * 4 * n, State{});
  grad_trace_.assign(static_cast<std::size_t>(ne) * 4 * n * 6, 0.0);
  lift_star_trace_.assign(static_cast<std::size_t>(ne) * 4 * n * 3, 0.0);

  // Group remote conforming faces by partner; dom_.remote_faces is already
  // sorted by (partner, key).
  for (int rf = 0; rf < static_cast<int>(dom_.remote_faces.size()); ++rf) {
    const RemoteFace& f = dom_.remote_faces[rf];
    auto& batches = f.primary ? primary_batches_ : replica_batches_;
    if (batches.empty() || batches.back().partner != f.partner)
      batches.push_back({f.partner, {}});
    batches.back().faces.push_back(rf);
  }
  remote_u_.assign(dom_.remote_faces.size() * n, State{});
  remote_grad_.assign(dom_.remote_faces.size() * n * 6, 0.0);

  // One interface context per (interface, side) this rank participates in.
  for (std::size_t ic = 0; ic < dom_.sliding_faces.size(); ++ic) {
    const SlidingInterface& iface = mesh.interfaces()[ic];
    for (const bool left_side : {true, false}) {
      InterfaceSideCtx ctx;
      ctx.iface_id = static_cast<int>(ic);
      ctx.iface = &iface;
      for (const SlidingFace& sf : dom_.sliding_faces[ic])
        if ((sf.side == XPlus) == left_side) ctx.faces.push_back(sf);
      if (ctx.faces.empty()) continue;
      ctx.on_static = (iface.static_is_left == left_side);
      std::sort(ctx.faces.begin(), ctx.faces.end(),
                [](const SlidingFace& a, const SlidingFace& b) { return a.i_par < b.i_par; });
      const int id = static_cast<int>(ctxs_.size());
      (ctx.on_static ? static_ctx_ids_ : moving_ctx_ids_).push_back(id);
      ctxs_.push_back(std::move(ctx));
    }
  }

  lifting_enabled_ = cfg_.gas.viscous();
}

void RankSolver::init_rank_maps() {
  // Contribution: (interface, side, i_par) triples for every owned face.
  std::vector<double> mine;
  for (const auto& ctx : ctxs_)
    for (const auto& f : ctx.faces) {
      mine.push_back(static_cast<double>(ctx.iface_id));
      mine.push_back(ctx.on_static ? 0.0 : 1.0);
      mine.push_back(static_cast<double>(f.i_par));
    }

  const auto all = transport_->allgather(mine);

  std::vector<RankMaps> maps(mesh_->interfaces().size());
  for (std::size_t ic = 0; ic < maps.size(); ++ic) {
    const long nf = mesh_->interfaces()[ic].n_faces;
    for (RankMap* side : {&maps[ic].static_side, &maps[ic].moving_side}) {
      side->n_par = nf;
      side->n_perp = 1;
      side->ranks.assign(static_cast<std::size_t>(nf), -1);
    }
  }
  for (int r = 0; r < static_cast<int>(all.size()); ++r) {
    const auto& payload = all[r];
    for (std::size_t k = 0; k + 2 < payload.size(); k += 3) {
      const int ic = static_cast<int>(payload[k]);
      const bool is_static = payload[k + 1] == 0.0;
      const long i_par = static_cast<long>(payload[k + 2]);
      RankMap& map = is_static ? maps[ic].static_side : maps[ic].moving_side;
      if (map.slot(i_par, 0) != -1) throw ProtocolError("interface face claimed by two ranks");
      map.slot(i_par, 0) = r;
    }
  }
  for (const auto& mp : maps)
    for (const RankMap* side : {&mp.static_side, &mp.moving_side})
      for (int r : side->ranks)
        if (r < 0) throw ProtocolError("interface face without an owner");

  for (auto& ctx : ctxs_) ctx.maps = maps[ctx.iface_id];
}

void RankSolver::set_initial_condition(double t0) {
  time_ = t0;
  step_index_ = 0;
  const int n = n1();
  for (int e = 0; e < static_cast<int>(dom_.elements.size()); ++e) {
    const auto& el = dom_.elements[e];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec2 x =
            mesh_->physical(el.band, el.ix, el.iy, ns_->nodes()[i], ns_->nodes()[j], t0);
        const State u = cfg_.flow_case(x, t0, cfg_.gas);
        double* p = field_.data() + node_offset(e, i, j);
        for (int v = 0; v < kNumVars; ++v) p[v] = u[v];
      }
  }
  for (auto& ctx : ctxs_) {
    ctx.delta_base = ctx.iface->vg_rel * t0;
    ctx.topo_valid = false;
  }
}

void RankSolver::update_interfaces(double t_stage) {
  bool static_topo = false, moving_topo = false;
  for (auto& ctx : ctxs_) {
    const double delta = ctx.delta_base + ctx.iface->vg_rel * (t_stage - time_);
    ctx.st = displacement_state(delta, ctx.iface->l_par, ctx.iface->n_faces);
    ctx.conforming = ctx.st.conforming();
    const double sigma = sigma_from_displacement(ctx.st.s_delta);
    ctx.sigma_side = ctx.on_static ? sigma : -sigma;
    if (!ctx.conforming) ctx.ops = build_mortar_operators(*ns_, ctx.sigma_side);
    if (!ctx.topo_valid || ctx.st.n_delta != ctx.last_topo_n ||
        ctx.conforming != ctx.last_topo_conforming) {
      ctx.topo_valid = true;
      ctx.last_topo_n = ctx.st.n_delta;
      ctx.last_topo_conforming = ctx.conforming;
      ctx.rebuild_count++;
      (ctx.on_static ? static_topo : moving_topo) = true;
    }
  }
  if (static_topo) rebuild_role(statics_, static_ctx_ids_);
  if (moving_topo) rebuild_role(movings_, moving_ctx_ids_);
}

void RankSolver::rebuild_role(RoleArrays& role, const std::vector<int>& ctx_ids) {
  role.cols.clear();
  for (const int cid : ctx_ids) {
    InterfaceSideCtx& ctx = ctxs_[cid];
    std::vector<LocalInterfaceFace> faces(ctx.faces.size());
    for (std::size_t f = 0; f < ctx.faces.size(); ++f)
      faces[f] = {static_cast<long>(f), ctx.faces[f].i_par, 0};
    append_mortar_tuples(faces, ctx.maps, ctx.st.n_delta, ctx.iface->n_faces, ctx.on_static,
                         ctx.conforming, ctx.iface_id, cid, role.cols);
  }
  sort_index_array(role.cols);
  for (const int cid : ctx_ids) {
    InterfaceSideCtx& ctx = ctxs_[cid];
    std::vector<LocalInterfaceFace> faces(ctx.faces.size());
    for (std::size_t f = 0; f < ctx.faces.size(); ++f)
      faces[f] = {static_cast<long>(f), ctx.faces[f].i_par, 0};
    build_mapping(role.cols, cid, faces, ctx.m);
  }
  role.sched = build_schedule(role.cols, transport_->rank(), role.self_entry);
  role.n_mortars = static_cast<int>(role.cols.size());

  const std::size_t nodes = static_cast<std::size_t>(role.n_mortars) * n1();
  role.u_mine.assign(nodes, State{});
  role.u_theirs.assign(nodes, State{});
  role.flux.assign(nodes, State{});
  role.lift_star.assign(nodes * 3, 0.0);
  role.grad_mine.assign(nodes * 6, 0.0);
  role.grad_theirs.assign(nodes * 6, 0.0);
}

void RankSolver::prolong_traces(std::span<const double> u) {
  const int n = n1();
  const auto& fl = basis_->face_left;
  const auto& fr = basis_->face_right;
  for (int e = 0; e < static_cast<int>(dom_.elements.size()); ++e) {
    State* xm = trace_line(e, XMinus);
    State* xp = trace_line(e, XPlus);
    State* ym = trace_line(e, YMinus);
    State* yp = trace_line(e, YPlus);
    std::fill(xm, xm + n, State{});
    std::fill(xp, xp + n, State{});
    std::fill(ym, ym + n, State{});
    std::fill(yp, yp + n, State{});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* p = u.data() + node_offset(e, i, j);
        for (int v = 0; v < kNumVars; ++v) {
          xm[j][v] += fl[i] * p[v];
          xp[j][v] += fr[i] * p[v];
          ym[i][v] += fl[j] * p[v];
          yp[i][v] += fr[j] * p[v];
        }
      }
  }
}

void RankSolver::fill_mortar_solution() {
  const int n = n1();
  for (auto& ctx : ctxs_) {
    RoleArrays& role = ctx.on_static ? statics_ : movings_;
    for (std::size_t f = 0; f < ctx.faces.size(); ++f) {
      const State* line = trace_line(ctx.faces[f].local_elem, ctx.faces[f].side);
      if (ctx.conforming) {
        State* dst = role.u_mine.data() + static_cast<std::size_t>(ctx.m.at(1, f)) * n;
        std::copy(line, line + n, dst);
      } else {
        for (int i_sub = 0; i_sub < 2; ++i_sub) {
          State* dst = role.u_mine.data() + static_cast<std::size_t>(ctx.m.at(i_sub, f)) * n;
          apply_line(ctx.ops.forward(ctx.half_of_sub(i_sub)),
                     {line, static_cast<std::size_t>(n)}, {dst, static_cast<std::size_t>(n)});
        }
      }
    }
  }
}

void RankSolver::send_solution_phase() {
  const int n = n1();
  // Conforming faces: the replica passes its trace to the primary owner.
  for (const auto& batch : replica_batches_) {
    std::vector<double> payload;
    payload.reserve(batch.faces.size() * n * kNumVars);
    for (const int rf : batch.faces)
      pack_states(
          trace_line(dom_.remote_faces[rf].local_elem, my_side_of(dom_.remote_faces[rf])), n,
          payload);
    transport_->send(batch.partner, MsgKind::SolutionConf, payload);
  }
  // Sliding mortars: the moving side passes its mortar solution.
  for (const auto& entry : movings_.sched) {
    std::vector<double> payload;
    pack_states(movings_.u_mine.data() + static_cast<std::size_t>(entry.offset) * n,
                entry.count * n, payload);
    transport_->send(entry.partner, MsgKind::SolutionMortar, payload);
  }
  if (movings_.self_entry.count > 0) {
    if (movings_.self_entry.count != statics_.self_entry.count)
      throw ProtocolError("loopback mortar block size mismatch");
    std::copy_n(
        movings_.u_mine.begin() + static_cast<std::size_t>(movings_.self_entry.offset) * n,
        static_cast<std::size_t>(movings_.self_entry.count) * n,
        statics_.u_theirs.begin() + static_cast<std::size_t>(statics_.self_entry.offset) * n);
  }
}

void RankSolver::receive_conf_solution(int batch_index) {
  const int n = n1();
  const auto& batch = primary_batches_[batch_index];
  const auto payload = transport_->recv(batch.partner, MsgKind::SolutionConf);
  if (payload.size() != batch.faces.size() * n * kNumVars)
    throw ProtocolError("conforming solution message length mismatch");
  for (std::size_t k = 0; k < batch.faces.size(); ++k)
    unpack_states(payload.data() + k * n * kNumVars,
                  remote_u_.data() + static_cast<std::size_t>(batch.faces[k]) * n, n);
}

void RankSolver::receive_mortar_solution() {
  if (mortar_u_received_) return;
  mortar_u_received_ = true;
  const int n = n1();
  for (const auto& entry : statics_.sched) {
    const auto payload = transport_->recv(entry.partner, MsgKind::SolutionMortar);
    if (payload.size() != static_cast<std::size_t>(entry.count) * n * kNumVars)
      throw ProtocolError("mortar solution message length mismatch");
    unpack_states(payload.data(),
                  statics_.u_theirs.data() + static_cast<std::size_t>(entry.offset) * n,
                  entry.count * n);
  }
}

State RankSolver::face_numerical_flux(const State& um, const State& up, int dir, double vg_n,
                                      const double* gm, const double* gp) const {
  const Vec2 normal = dir == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  State f = roe_flux(um, up, normal, vg_n, cfg_.gas);
  if (cfg_.gas.viscous() && gm != nullptr && gp != nullptr) {
    const PrimGrad pgm{{gm[0], gm[1]}, {gm[2], gm[3]}, {gm[4], gm[5]}};
    const PrimGrad pgp{{gp[0], gp[1]}, {gp[2], gp[3]}, {gp[4], gp[5]}};
    const FluxPair fm = viscous_flux(um, pgm, cfg_.gas);
    const FluxPair fp = viscous_flux(up, pgp, cfg_.gas);
    for (int v = 0; v < kNumVars; ++v)
      f[v] -= 0.5 * ((fm.fx[v] + fp.fx[v]) * normal[0] + (fm.fy[v] + fp.fy[v]) * normal[1]);
  }
  return f;
}

void RankSolver::interior_face_phase() {
  const int n = n1();
  const bool visc = cfg_.gas.viscous();
  for (const auto& face : dom_.interior_faces) {
    const Side side_m = face.dir == 0 ? XPlus : YPlus;
    const Side side_p = face.dir == 0 ? XMinus : YMinus;
    const State* um = trace_line(face.elem_minus, side_m);
    const State* up = trace_line(face.elem_plus, side_p);
    const double vg_n = face.dir == 1 ? grid_vel_[face.elem_minus][1] : 0.0;
    State* out_m = flux_line(face.elem_minus, side_m);
    State* out_p = flux_line(face.elem_plus, side_p);
    for (int k = 0; k < n; ++k) {
      const double* gm = visc ? grad_trace_line(face.elem_minus, side_m) + k * 6 : nullptr;
      const double* gp = visc ? grad_trace_line(face.elem_plus, side_p) + k * 6 : nullptr;
      out_m[k] = face_numerical_flux(um[k], up[k], face.dir, vg_n, gm, gp);
      out_p[k] = out_m[k];
    }
  }
}

void RankSolver::volume_kernel(std::span<const double> u, std::span<double> dudt) {
  const int n = n1();
  static thread_local std::vector<State> fx, fy;
  fx.assign(static_cast<std::size_t>(n) * n, State{});
  fy.assign(static_cast<std::size_t>(n) * n, State{});
  const bool visc = cfg_.gas.viscous();

  for (int e = 0; e < static_cast<int>(dom_.elements.size()); ++e) {
    const ElementMetrics& met = metrics_[e];
    const Vec2 vg = grid_vel_[e];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const State s = load_state(u, e, i, j);
        FluxPair f = ale_convective_flux(s, vg, cfg_.gas);
        if (visc) {
          const double* g = grad_.data() + (node_offset(e, i, j) / kNumVars) * 6;
          const PrimGrad pg{{g[0], g[1]}, {g[2], g[3]}, {g[4], g[5]}};
          const FluxPair fv = viscous_flux(s, pg, cfg_.gas);
          for (int v = 0; v < kNumVars; ++v) {
            f.fx[v] -= fv.fx[v];
            f.fy[v] -= fv.fy[v];
          }
        }
        // Contravariant fluxes of the affine mapping.
        for (int v = 0; v < kNumVars; ++v) {
          fx[static_cast<std::size_t>(i) * n + j][v] = f.fx[v] * met.sj_x;
          fy[static_cast<std::size_t>(i) * n + j][v] = f.fy[v] * met.sj_y;
        }
      }
    const double inv_jac = 1.0 / met.jac;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double* out = dudt.data() + node_offset(e, i, j);
        for (int v = 0; v < kNumVars; ++v) {
          double acc = 0.0;
          for (int m = 0; m < n; ++m)
            acc += weak_diff_(i, m) * fx[static_cast<std::size_t>(m) * n + j][v] +
                   weak_diff_(j, m) * fy[static_cast<std::size_t>(i) * n + m][v];
          out[v] = acc * inv_jac;
        }
      }
  }
}

void RankSolver::receive_conf_gradients() {
  if (!lifting_enabled_ || grads_received_) return;
  const int n = n1();
  for (const auto& batch : primary_batches_) {
    const auto payload = transport_->recv(batch.partner, MsgKind::GradConf);
    if (payload.size() != batch.faces.size() * n * 6)
      throw ProtocolError("gradient message length mismatch");
    for (std::size_t k = 0; k < batch.faces.size(); ++k)
      std::copy_n(payload.data() + k * n * 6, n * 6,
                  remote_grad_.data() + static_cast<std::size_t>(batch.faces[k]) * n * 6);
  }
}

void RankSolver::receive_mortar_gradients() {
  if (!lifting_enabled_) return;
  const int n = n1();
  for (const auto& entry : statics_.sched) {
    const auto payload = transport_->recv(entry.partner, MsgKind::GradMortar);
    if (payload.size() != static_cast<std::size_t>(entry.count) * n * 6)
      throw ProtocolError("mortar gradient message length mismatch");
    std::copy_n(payload.data(), payload.size(),
                statics_.grad_theirs.begin() + static_cast<std::size_t>(entry.offset) * n * 6);
  }
}

void RankSolver::primary_flux_phase() {
  const int n = n1();
  for (int b = 0; b < static_cast<int>(primary_batches_.size()); ++b) {
    const auto& batch = primary_batches_[b];
    if (!conf_u_received_) receive_conf_solution(b);
    std::vector<double> payload;
    payload.reserve(batch.faces.size() * n * kNumVars);
    for (const int rfi : batch.faces) {
      const RemoteFace& rf = dom_.remote_faces[rfi];
      const Side my_side = my_side_of(rf);
      const State* um = trace_line(rf.local_elem, my_side);
      const State* up = remote_u_.data() + static_cast<std::size_t>(rfi) * n;
      const double vg_n = rf.dir == 1 ? grid_vel_[rf.local_elem][1] : 0.0;
      State* out = flux_line(rf.local_elem, my_side);
      for (int k = 0; k < n; ++k) {
        const double* gm =
            lifting_enabled_ ? grad_trace_line(rf.local_elem, my_side) + k * 6 : nullptr;
        const double* gp =
            lifting_enabled_
                ? remote_grad_.data() + (static_cast<std::size_t>(rfi) * n + k) * 6
                : nullptr;
        out[k] = face_numerical_flux(um[k], up[k], rf.dir, vg_n, gm, gp);
      }
      pack_states(out, n, payload);
    }
    transport_->send(batch.partner, MsgKind::FluxConf, payload);
  }
  conf_u_received_ = true;
}

void RankSolver::mortar_flux_phase() {
  const int n = n1();
  if (statics_.n_mortars == 0) return;
  receive_mortar_solution();
  receive_mortar_gradients();

  for (int c = 0; c < statics_.n_mortars; ++c) {
    const InterfaceSideCtx& ctx = ctxs_[statics_.cols[c].ctx_tag];
    const bool static_left = ctx.iface->static_is_left;
    for (int k = 0; k < n; ++k) {
      const std::size_t node = static_cast<std::size_t>(c) * n + k;
      const State& mine = statics_.u_mine[node];
      const State& theirs = statics_.u_theirs[node];
      const double* gm = nullptr;
      const double* gt = nullptr;
      if (lifting_enabled_) {
        gm = statics_.grad_mine.data() + node * 6;
        gt = statics_.grad_theirs.data() + node * 6;
      }
      // The interface motion is purely tangential, so the normal grid speed
      // vanishes in the mortar Riemann problem.
      statics_.flux[node] = static_left ? face_numerical_flux(mine, theirs, 0, 0.0, gm, gt)
                                        : face_numerical_flux(theirs, mine, 0, 0.0, gt, gm);
    }
  }

  for (const auto& entry : statics_.sched) {
    std::vector<double> payload;
    pack_states(statics_.flux.data() + static_cast<std::size_t>(entry.offset) * n,
                entry.count * n, payload);
    transport_->send(entry.partner, MsgKind::FluxMortar, payload);
  }
  if (statics_.self_entry.count > 0)
    std::copy_n(
        statics_.flux.begin() + static_cast<std::size_t>(statics_.self_entry.offset) * n,
        static_cast<std::size_t>(statics_.self_entry.count) * n,
        movings_.flux.begin() + static_cast<std::size_t>(movings_.self_entry.offset) * n);
}

void RankSolver::replica_apply_phase() {
  const int n = n1();
  for (const auto& batch : replica_batches_) {
    const auto payload = transport_->recv(batch.partner, MsgKind::FluxConf);
    if (payload.size() != batch.faces.size() * n * kNumVars)
      throw ProtocolError("conforming flux message length mismatch");
    for (std::size_t k = 0; k < batch.faces.size(); ++k) {
      const RemoteFace& rf = dom_.remote_faces[batch.faces[k]];
      unpack_states(payload.data() + k * n * kNumVars,
                    flux_line(rf.local_elem, my_side_of(rf)), n);
    }
  }
}

void RankSolver::mortar_apply_phase() {
  const int n = n1();
  for (const auto& entry : movings_.sched) {
    const auto payload = transport_->recv(entry.partner, MsgKind::FluxMortar);
    if (payload.size() != static_cast<std::size_t>(entry.count) * n * kNumVars)
      throw ProtocolError("mortar flux message length mismatch");
    unpack_states(payload.data(),
                  movings_.flux.data() + static_cast<std::size_t>(entry.offset) * n,
                  entry.count * n);
  }

  static thread_local std::vector<State> part;
  part.assign(n, State{});
  for (const auto& ctx : ctxs_) {
    const RoleArrays& role = ctx.on_static ? statics_ : movings_;
    for (std::size_t f = 0; f < ctx.faces.size(); ++f) {
      State* out = flux_line(ctx.faces[f].local_elem, ctx.faces[f].side);
      if (ctx.conforming) {
        const State* src = role.flux.data() + static_cast<std::size_t>(ctx.m.at(1, f)) * n;
        std::copy(src, src + n, out);
        continue;
      }
      std::fill(out, out + n, State{});
      for (int i_sub = 0; i_sub < 2; ++i_sub) {
        const State* src = role.flux.data() + static_cast<std::size_t>(ctx.m.at(i_sub, f)) * n;
        apply_line(ctx.ops.backward(ctx.half_of_sub(i_sub)),
                   {src, static_cast<std::size_t>(n)}, {part.data(), static_cast<std::size_t>(n)});
        for (int k = 0; k < n; ++k) out[k] += part[k];
      }
    }
  }
}

void RankSolver::dirichlet_phase(double t_stage) {
  const int n = n1();
  for (const auto& df : dom_.dirichlet_faces) {
    const State* mine = trace_line(df.local_elem, df.side);
    State* out = flux_line(df.local_elem, df.side);
    const int dir = (df.side == XMinus || df.side == XPlus) ? 0 : 1;
    const bool plus_side = df.side == XPlus || df.side == YPlus;
    const double vg_n = dir == 1 ? grid_vel_[df.local_elem][1] : 0.0;
    for (int k = 0; k < n; ++k) {
      const Vec2 x = face_node_position(df.local_elem, df.side, k, t_stage);
      const State ext = cfg_.flow_case(x, t_stage, cfg_.gas);
      const double* g = lifting_enabled_ ? grad_trace_line(df.local_elem, df.side) + k * 6
                                         : nullptr;
      out[k] = plus_side ? face_numerical_flux(mine[k], ext, dir, vg_n, g, g)
                         : face_numerical_flux(ext, mine[k], dir, vg_n, g, g);
    }
  }
}

void RankSolver::apply_all_faces(std::span<double> dudt) {
  const int n = n1();
  const auto& w = ns_->weights();
  const auto& fl = basis_->face_left;
  const auto& fr = basis_->face_right;
  for (int e = 0; e < static_cast<int>(dom_.elements.size()); ++e) {
    const ElementMetrics& met = metrics_[e];
    const double cx = met.sj_x / met.jac;
    const double cy = met.sj_y / met.jac;
    for (int side = 0; side < 4; ++side) {
      const State* line = flux_line(e, static_cast<Side>(side));
      const bool plus = side == XPlus || side == YPlus;
      const double sgn = plus ? -1.0 : 1.0;
      const auto& lift = plus ? fr : fl;
      if (side == XMinus || side == XPlus) {
        for (int i = 0; i < n; ++i) {
          const double c = sgn * cx * lift[i] / w[i];
          if (c == 0.0) continue;
          for (int j = 0; j < n; ++j) {
            double* out = dudt.data() + node_offset(e, i, j);
            for (int v = 0; v < kNumVars; ++v) out[v] += c * line[j][v];
          }
        }
      } else {
        for (int j = 0; j < n; ++j) {
          const double c = sgn * cy * lift[j] / w[j];
          if (c == 0.0) continue;
          for (int i = 0; i < n; ++i) {
            double* out = dudt.data() + node_offset(e, i, j);
            for (int v = 0; v < kNumVars; ++v) out[v] += c * line[i][v];
          }
        }
      }
    }
  }
}

Vec2 RankSolver::face_node_position(int elem, Side side, int k, double t) const {
  const auto& el = dom_.elements[elem];
  const double node = ns_->nodes()[k];
  double xi = 0.0, eta = 0.0;
  switch (side) {
    case XMinus: xi = -1.0; eta = node; break;
    case XPlus: xi = 1.0; eta = node; break;
    case YMinus: xi = node; eta = -1.0; break;
    case YPlus: xi = node; eta = 1.0; break;
  }
  return mesh_->physical(el.band, el.ix, el.iy, xi, eta, t);
}

void RankSolver::run_lifting(double t_stage, std::span<const double> u) {
  const int n = n1();

  auto prim3 = [&](const State& s, double* out) {
    out[0] = s[1] / s[0];
    out[1] = s[2] / s[0];
    out[2] = temperature(s, cfg_.gas);
  };

  // Interior faces: arithmetic-mean trace of (v1, v2, T).
  for (const auto& face : dom_.interior_faces) {
    const Side side_m = face.dir == 0 ? XPlus : YPlus;
    const Side side_p = face.dir == 0 ? XMinus : YMinus;
    const State* um = trace_line(face.elem_minus, side_m);
    const State* up = trace_line(face.elem_plus, side_p);
    double* lm = lift_star_line(face.elem_minus, side_m);
    double* lp = lift_star_line(face.elem_plus, side_p);
    for (int k = 0; k < n; ++k) {
      double a[3], b[3];
      prim3(um[k], a);
      prim3(up[k], b);
      for (int c = 0; c < 3; ++c) lm[k * 3 + c] = lp[k * 3 + c] = 0.5 * (a[c] + b[c]);
    }
  }

  // Conforming remote faces: the primary computes the mean and passes it back.
  for (int b = 0; b < static_cast<int>(primary_batches_.size()); ++b) {
    const auto& batch = primary_batches_[b];
    receive_conf_solution(b);
    std::vector<double> reply;
    reply.reserve(batch.faces.size() * n * 3);
    for (const int rfi : batch.faces) {
      const RemoteFace& rf = dom_.remote_faces[rfi];
      const State* um = trace_line(rf.local_elem, my_side_of(rf));
      const State* up = remote_u_.data() + static_cast<std::size_t>(rfi) * n;
      double* lm = lift_star_line(rf.local_elem, my_side_of(rf));
      for (int k = 0; k < n; ++k) {
        double a[3], bb[3];
        prim3(um[k], a);
        prim3(up[k], bb);
        for (int c = 0; c < 3; ++c) {
          lm[k * 3 + c] = 0.5 * (a[c] + bb[c]);
          reply.push_back(lm[k * 3 + c]);
        }
      }
    }
    transport_->send(batch.partner, MsgKind::LiftConf, reply);
  }
  conf_u_received_ = true;
  for (const auto& batch : replica_batches_) {
    const auto payload = transport_->recv(batch.partner, MsgKind::LiftConf);
    if (payload.size() != batch.faces.size() * n * 3)
      throw ProtocolError("lifting trace message length mismatch");
    for (std::size_t k = 0; k < batch.faces.size(); ++k) {
      const RemoteFace& rf = dom_.remote_faces[batch.faces[k]];
      std::copy_n(payload.data() + k * n * 3, n * 3,
                  lift_star_line(rf.local_elem, my_side_of(rf)));
    }
  }

  // Sliding mortars: the static side computes the mean on the mortars.
  if (statics_.n_mortars > 0) {
    receive_mortar_solution();
    for (int c = 0; c < statics_.n_mortars; ++c)
      for (int k = 0; k < n; ++k) {
        const std::size_t node = static_cast<std::size_t>(c) * n + k;
        double a[3], b[3];
        prim3(statics_.u_mine[node], a);
        prim3(statics_.u_theirs[node], b);
        for (int q = 0; q < 3; ++q) statics_.lift_star[node * 3 + q] = 0.5 * (a[q] + b[q]);
      }
    for (const auto& entry : statics_.sched) {
      std::vector<double> payload(
          statics_.lift_star.begin() + static_cast<std::size_t>(entry.offset) * n * 3,
          statics_.lift_star.begin() + static_cast<std::size_t>(entry.offset + entry.count) * n * 3);
      transport_->send(entry.partner, MsgKind::LiftMortar, payload);
    }
    if (statics_.self_entry.count > 0)
      std::copy_n(
          statics_.lift_star.begin() + static_cast<std::size_t>(statics_.self_entry.offset) * n * 3,
          static_cast<std::size_t>(statics_.self_entry.count) * n * 3,
          movings_.lift_star.begin() + static_cast<std::size_t>(movings_.self_entry.offset) * n * 3);
  }
  for (const auto& entry : movings_.sched) {
    const auto payload = transport_->recv(entry.partner, MsgKind::LiftMortar);
    if (payload.size() != static_cast<std::size_t>(entry.count) * n * 3)
      throw ProtocolError("mortar lifting message length mismatch");
    std::copy_n(payload.data(), payload.size(),
                movings_.lift_star.begin() + static_cast<std::size_t>(entry.offset) * n * 3);
  }

  // Back-project the mortar means onto the element faces.
  static thread_local std::vector<double> comp_in, comp_out;
  for (const auto& ctx : ctxs_) {
    const RoleArrays& role = ctx.on_static ? statics_ : movings_;
    for (std::size_t f = 0; f < ctx.faces.size(); ++f) {
      double* lout = lift_star_line(ctx.faces[f].local_elem, ctx.faces[f].side);
      if (ctx.conforming) {
        std::copy_n(role.lift_star.data() + static_cast<std::size_t>(ctx.m.at(1, f)) * n * 3,
                    static_cast<std::size_t>(n) * 3, lout);
        continue;
      }
      std::fill(lout, lout + n * 3, 0.0);
      for (int i_sub = 0; i_sub < 2; ++i_sub) {
        const double* src =
            role.lift_star.data() + static_cast<std::size_t>(ctx.m.at(i_sub, f)) * n * 3;
        for (int c = 0; c < 3; ++c) {
          comp_in.assign(n, 0.0);
          comp_out.assign(n, 0.0);
          for (int k = 0; k < n; ++k) comp_in[k] = src[k * 3 + c];
          apply_line(ctx.ops.backward(ctx.half_of_sub(i_sub)),
                     {comp_in.data(), static_cast<std::size_t>(n)},
                     {comp_out.data(), static_cast<std::size_t>(n)});
          for (int k = 0; k < n; ++k) lout[k * 3 + c] += comp_out[k];
        }
      }
    }
  }

  // Dirichlet faces: the exact primitive trace.
  for (const auto& df : dom_.dirichlet_faces) {
    double* lout = lift_star_line(df.local_elem, df.side);
    for (int k = 0; k < n; ++k) {
      const Vec2 x = face_node_position(df.local_elem, df.side, k, t_stage);
      prim3(cfg_.flow_case(x, t_stage, cfg_.gas), lout + k * 3);
    }
  }

  assemble_gradients(u);
  send_gradient_phase();
}

void RankSolver::assemble_gradients(std::span<const double> u) {
  const int n = n1();
  const auto& w = ns_->weights();
  const auto& fl = basis_->face_left;
  const auto& fr = basis_->face_right;
  static thread_local std::vector<double> q;
  q.assign(static_cast<std::size_t>(n) * n * 3, 0.0);

  for (int e = 0; e < static_cast<int>(dom_.elements.size()); ++e) {
    const ElementMetrics& met = metrics_[e];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const State s = load_state(u, e, i, j);
        double* qq = q.data() + (static_cast<std::size_t>(i) * n + j) * 3;
        qq[0] = s[1] / s[0];
        qq[1] = s[2] / s[0];
        qq[2] = temperature(s, cfg_.gas);
      }
    const double* star_xm = lift_star_line(e, XMinus);
    const double* star_xp = lift_star_line(e, XPlus);
    const double* star_ym = lift_star_line(e, YMinus);
    const double* star_yp = lift_star_line(e, YPlus);
    const double cx = met.sj_x / met.jac;
    const double cy = met.sj_y / met.jac;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double* g = grad_.data() + (node_offset(e, i, j) / kNumVars) * 6;
        for (int c = 0; c < 3; ++c) {
          double vol_x = 0.0, vol_y = 0.0;
          for (int m = 0; m < n; ++m) {
            vol_x += weak_diff_(i, m) * q[(static_cast<std::size_t>(m) * n + j) * 3 + c];
            vol_y += weak_diff_(j, m) * q[(static_cast<std::size_t>(i) * n + m) * 3 + c];
          }
          const double sx = (star_xp[j * 3 + c] * fr[i] - star_xm[j * 3 + c] * fl[i]) / w[i];
          const double sy = (star_yp[i * 3 + c] * fr[j] - star_ym[i * 3 + c] * fl[j]) / w[j];
          g[2 * c + 0] = cx * (sx - vol_x);
          g[2 * c + 1] = cy * (sy - vol_y);
        }
      }
  }

  // Prolong gradients to the element faces.
  for (int e = 0; e < static_cast<int>(dom_.elements.size()); ++e) {
    double* xm = grad_trace_line(e, XMinus);
    double* xp = grad_trace_line(e, XPlus);
    double* ym = grad_trace_line(e, YMinus);
    double* yp = grad_trace_line(e, YPlus);
    std::fill(xm, xm + n * 6, 0.0);
    std::fill(xp, xp + n * 6, 0.0);
    std::fill(ym, ym + n * 6, 0.0);
    std::fill(yp, yp + n * 6, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* g = grad_.data() + (node_offset(e, i, j) / kNumVars) * 6;
        for (int c = 0; c < 6; ++c) {
          xm[j * 6 + c] += fl[i] * g[c];
          xp[j * 6 + c] += fr[i] * g[c];
          ym[i * 6 + c] += fl[j] * g[c];
          yp[i * 6 + c] += fr[j] * g[c];
        }
      }
  }
}

void RankSolver::send_gradient_phase() {
  const int n = n1();
  for (const auto& batch : replica_batches_) {
    std::vector<double> payload;
    payload.reserve(batch.faces.size() * n * 6);
    for (const int rfi : batch.faces) {
      const RemoteFace& rf = dom_.remote_faces[rfi];
      const double* g = grad_trace_line(rf.local_elem, my_side_of(rf));
      payload.insert(payload.end(), g, g + n * 6);
    }
    transport_->send(batch.partner, MsgKind::GradConf, payload);
  }

  // Transfer gradients onto the mortars with the solution operators.
  static thread_local std::vector<double> comp_in, comp_out;
  for (auto& ctx : ctxs_) {
    RoleArrays& role = ctx.on_static ? statics_ : movings_;
    for (std::size_t f = 0; f < ctx.faces.size(); ++f) {
      const double* gline = grad_trace_line(ctx.faces[f].local_elem, ctx.faces[f].side);
      if (ctx.conforming) {
        std::copy_n(gline, static_cast<std::size_t>(n) * 6,
                    role.grad_mine.begin() + static_cast<std::size_t>(ctx.m.at(1, f)) * n * 6);
        continue;
      }
      for (int i_sub = 0; i_sub < 2; ++i_sub) {
        double* dst =
            role.grad_mine.data() + static_cast<std::size_t>(ctx.m.at(i_sub, f)) * n * 6;
        for (int c = 0; c < 6; ++c) {
          comp_in.assign(n, 0.0);
          comp_out.assign(n, 0.0);
          for (int k = 0; k < n; ++k) comp_in[k] = gline[k * 6 + c];
          apply_line(ctx.ops.forward(ctx.half_of_sub(i_sub)),
                     {comp_in.data(), static_cast<std::size_t>(n)},
                     {comp_out.data(), static_cast<std::size_t>(n)});
          for (int k = 0; k < n; ++k) dst[k * 6 + c] = comp_out[k];
        }
      }
    }
  }

  for (const auto& entry : movings_.sched) {
    std::vector<double> payload(
        movings_.grad_mine.begin() + static_cast<std::size_t>(entry.offset) * n * 6,
        movings_.grad_mine.begin() + static_cast<std::size_t>(entry.offset + entry.count) * n * 6);
    transport_->send(entry.partner, MsgKind::GradMortar, payload);
  }
  if (movings_.self_entry.count > 0)
    std::copy_n(
        movings_.grad_mine.begin() + static_cast<std::size_t>(movings_.self_entry.offset) * n * 6,
        static_cast<std::size_t>(movings_.self_entry.count) * n * 6,
        statics_.grad_theirs.begin() + static_cast<std::size_t>(statics_.self_entry.offset) * n * 6);
}

void RankSolver::compute_residual(double t_stage, std::span<const double> u,
                                  std::span<double> dudt) {
  transport_->set_context(step_index_, stage_index_);
  conf_u_received_ = false;
  mortar_u_received_ = false;
  grads_received_ = false;

  update_interfaces(t_stage);
  prolong_traces(u);
  fill_mortar_solution();
  send_solution_phase();
  if (lifting_enabled_) run_lifting(t_stage, u);
  interior_face_phase();
  volume_kernel(u, dudt);
  if (lifting_enabled_) {
    receive_conf_gradients();
    grads_received_ = true;
  }
  primary_flux_phase();
  mortar_flux_phase();
  replica_apply_phase();
  mortar_apply_phase();
  dirichlet_phase(t_stage);
  apply_all_faces(dudt);
}

void RankSolver::compute_gradients(double t_stage, std::span<const double> u) {
  transport_->set_context(step_index_, stage_index_);
  conf_u_received_ = false;
  mortar_u_received_ = false;
  grads_received_ = false;
  const bool saved = lifting_enabled_;
  lifting_enabled_ = true;

  update_interfaces(t_stage);
  prolong_traces(u);
  fill_mortar_solution();
  send_solution_phase();
  run_lifting(t_stage, u);
  // Drain the gradient messages so the channels end this call aligned.
  receive_conf_gradients();
  receive_mortar_gradients();

  lifting_enabled_ = saved;
}

void RankSolver::check_admissible(std::span<const double> u) const {
  const int n = n1();
  for (int e = 0; e < static_cast<int>(dom_.elements.size()); ++e)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const State s = load_state(u, e, i, j);
        if (!admissible(s, cfg_.gas)) {
          std::ostringstream os;
          os << "inadmissible state in element gid=" << dom_.elements[e].gid << " node (" << i
             << "," << j << ") at step " << step_index_ << " stage " << stage_index_ << ": ["
             << s[0] << ", " << s[1] << ", " << s[2] << ", " << s[3] << "]";
          throw InvalidStateError(os.str());
        }
      }
}

void RankSolver::step(double dt) {
  for (int s = 0; s < LowStorageRK::n_stages; ++s) {
    stage_index_ = s;
    compute_residual(time_ + LowStorageRK::c[s] * dt, field_, dudt_);
    const double as = LowStorageRK::a[s];
    const double bs = LowStorageRK::b[s];
    for (std::size_t i = 0; i < field_.size(); ++i) {
      rk_reg_[i] = as * rk_reg_[i] + dt * dudt_[i];
      field_[i] += bs * rk_reg_[i];
    }
    check_admissible(field_);
  }
  time_ += dt;
  step_index_++;
  for (auto& ctx : ctxs_) {
    ctx.delta_base += ctx.iface->vg_rel * dt;
    const double period = ctx.iface->l_par * static_cast<double>(ctx.iface->n_faces);
    while (ctx.delta_base >= period) ctx.delta_base -= period;
  }
}

double RankSolver::suggest_dt(double cfl) const {
  const int n = n1();
  double dt = std::numeric_limits<double>::max();
  for (int e = 0; e < static_cast<int>(dom_.elements.size()); ++e) {
    const Band& band = mesh_->band(dom_.elements[e].band);
    const Vec2 vg = grid_vel_[e];
    double lmax = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const State s = load_state(field_, e, i, j);
        const double v1 = s[1] / s[0] - vg[0];
        const double v2 = s[2] / s[0] - vg[1];
        lmax = std::max(lmax, std::sqrt(v1 * v1 + v2 * v2) + sound_speed(s, cfg_.gas));
      }
    const double h = std::min(band.hx, band.hy);
    dt = std::min(dt, cfl * h / (lmax * (2.0 * ns_->degree() + 1.0)));
  }
  return dt;
}

const InterfaceSideCtx* RankSolver::side_ctx(int iface_id, bool on_static) const {
  for (const auto& ctx : ctxs_)
    if (ctx.iface_id == iface_id && ctx.on_static == on_static) return &ctx;
  return nullptr;
}

long RankSolver::total_rebuilds() const {
  long total = 0;
  for (const auto& ctx : ctxs_) total += ctx.rebuild_count;
  return total;
}

void RankSolver::inject_collective() {
  for (int r = 0; r < transport_->size(); ++r)
    if (r != transport_->rank()) transport_->send(r, MsgKind::InitRankMaps, {0.0});
}

}  // namespace sdg
