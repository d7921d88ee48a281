#include "partition.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "mortar.hpp"

namespace sdg {

int Ownership::owner(int band, int local_elem) const {
  for (const auto& blk : band_blocks[band])
    if (local_elem >= blk.start && local_elem < blk.start + blk.count) return blk.rank;
  throw ProtocolError("ownership lookup outside any block");
}

Ownership assign_ranks(const Mesh& mesh, int n_ranks) {
  const int nb = static_cast<int>(mesh.bands().size());
  if (n_ranks < 1) throw ConfigError("rank count must be positive");

  Ownership own;
  own.n_ranks = n_ranks;
  own.band_blocks.resize(nb);

  if (n_ranks == 1) {
    for (int b = 0; b < nb; ++b)
      own.band_blocks[b].push_back({0, 0, mesh.band(b).n_elements()});
    return own;
  }

  if (n_ranks < nb) {
    // Fewer ranks than bands: put all static bands on rank 0 and all moving
    // bands on rank 1, which keeps every rank on one side of every sliding
    // interface.
    if (n_ranks != 2)
      throw ConfigError("rank count below band count is only supported for 2 ranks");
    bool any_static = false, any_moving = false;
    for (const auto& b : mesh.bands()) (b.moving() ? any_moving : any_static) = true;
    if (!any_static || !any_moving)
      throw ConfigError("2 ranks over " + std::to_string(nb) +
                        " bands requires both static and moving bands");
    for (int b = 0; b < nb; ++b)
      own.band_blocks[b].push_back(
          {mesh.band(b).moving() ? 1 : 0, 0, mesh.band(b).n_elements()});
    return own;
  }

  // Largest-remainder split of ranks over bands, at least one rank each.
  const int total = mesh.n_elements();
  std::vector<int> ranks_per_band(nb, 1);
  int assigned = nb;
  std::vector<std::pair<double, int>> remainders;
  for (int b = 0; b < nb; ++b) {
    const double share = double(mesh.band(b).n_elements()) / total * n_ranks;
    const int extra = std::max(0, static_cast<int>(std::floor(share)) - 1);
    ranks_per_band[b] += extra;
    assigned += extra;
    remainders.emplace_back(share - std::floor(share), b);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; assigned < n_ranks; ++i) {
    ranks_per_band[remainders[i % nb].second]++;
    ++assigned;
  }

  int next_rank = 0;
  for (int b = 0; b < nb; ++b) {
    const int ne = mesh.band(b).n_elements();
    const int r = std::min(ranks_per_band[b], ne);
    int start = 0;
    for (int k = 0; k < r; ++k) {
      const int count = ne / r + (k < ne % r ? 1 : 0);
      own.band_blocks[b].push_back({next_rank++, start, count});
      start += count;
    }
    // Ranks beyond the element count of a tiny band stay idle but valid.
    next_rank += std::max(0, ranks_per_band[b] - r);
  }
  return own;
}

void append_mortar_tuples(const std::vector<LocalInterfaceFace>& faces,
                          const RankMaps& maps, long n_delta, long n_faces,
                          bool on_static_side, bool conforming, int iface_id,
                          int ctx_tag, std::vector<MortarTuple>& out) {
  const RankMap& partner_map = on_static_side ? maps.moving_side : maps.static_side;
  for (const auto& f : faces) {
    for (int i_sub = conforming ? 1 : 0; i_sub < 2; ++i_sub) {
      MortarTuple tup;
      tup.i_iface = iface_id;
      tup.i_sub = i_sub;
      tup.i_perp = f.i_perp;
      tup.i_face = f.i_face;
      tup.ctx_tag = ctx_tag;
      if (on_static_side) {
        tup.i_par = f.i_par;
        tup.partner_rank =
            partner_map.at(moving_index(f.i_par, n_delta, i_sub, n_faces), f.i_perp);
      } else {
        // Mortars inherit the static-frame index.
        tup.i_par = static_index(f.i_par, n_delta, i_sub, n_faces);
        tup.partner_rank = partner_map.at(tup.i_par, f.i_perp);
      }
      if (tup.partner_rank < 0)
        throw ProtocolError("rank map lookup hit an unset entry");
      out.push_back(tup);
    }
  }
}

void sort_index_array(std::vector<MortarTuple>& cols) {
  std::sort(cols.begin(), cols.end(), [](const MortarTuple& x, const MortarTuple& y) {
    if (x.partner_rank != y.partner_rank) return x.partner_rank < y.partner_rank;
    if (x.i_iface != y.i_iface) return x.i_iface < y.i_iface;
    if (x.i_par != y.i_par) return x.i_par < y.i_par;
    if (x.i_perp != y.i_perp) return x.i_perp < y.i_perp;
    return x.i_sub < y.i_sub;
  });
}

void build_mapping(const std::vector<MortarTuple>& cols, int ctx_tag,
                   const std::vector<LocalInterfaceFace>& faces, MappingM& m) {
  long lo = 0, hi = -1;
  if (!faces.empty()) {
    lo = hi = faces.front().i_face;
    for (const auto& f : faces) {
      lo = std::min(lo, f.i_face);
      hi = std::max(hi, f.i_face);
    }
  }
  m.face_lo = lo;
  m.rows[0].assign(static_cast<std::size_t>(hi - lo + 1), -1);
  m.rows[1].assign(static_cast<std::size_t>(hi - lo + 1), -1);
  for (int i = 0; i < static_cast<int>(cols.size()); ++i) {
    if (cols[i].ctx_tag != ctx_tag) continue;
    m.rows[cols[i].i_sub][static_cast<std::size_t>(cols[i].i_face - lo)] = i;
  }
}

void rebuild_index_arrays(const std::vector<LocalInterfaceFace>& faces,
                          const RankMaps& maps, long n_delta, long n_faces,
                          bool on_static_side, bool conforming, IndexArrayA& a,
                          MappingM& m) {
  a.cols.clear();
  append_mortar_tuples(faces, maps, n_delta, n_faces, on_static_side, conforming,
                       /*iface_id=*/0, /*ctx_tag=*/0, a.cols);
  sort_index_array(a.cols);
  build_mapping(a.cols, 0, faces, m);
}

std::vector<ScheduleEntry> build_schedule(const std::vector<MortarTuple>& cols, int self,
                                          ScheduleEntry& self_entry) {
  std::vector<ScheduleEntry> sched;
  self_entry = {self, 0, 0};
  for (int i = 0; i < static_cast<int>(cols.size()); ++i) {
    const int p = cols[i].partner_rank;
    if (p == self) {
      if (self_entry.count == 0) self_entry.offset = i;
      self_entry.count++;
      continue;
    }
    if (sched.empty() || sched.back().partner != p) sched.push_back({p, i, 0});
    sched.back().count++;
  }
  return sched;
}

double measure_pid(double wall_seconds, long n_cores, long n_dof, long n_steps,
                   long n_rk_stages) {
  if (n_cores <= 0 || n_dof <= 0 || n_steps <= 0 || n_rk_stages <= 0)
    throw ConfigError("measure_pid requires positive counts");
  return wall_seconds * static_cast<double>(n_cores) /
         (static_cast<double>(n_dof) * n_steps * n_rk_stages);
}

}  // namespace sdg
