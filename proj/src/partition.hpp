#pragma once

#include <array>
#include <vector>

#include "mesh.hpp"

namespace sdg {

/// Contiguous element block of one band owned by one rank.
struct OwnBlock {
  int rank = 0;
  int start = 0;  // local element index within the band (column-major)
  int count = 0;
};

/// Assignment of bands (or band parts) to ranks. No rank ever owns elements
/// on both sides of a sliding interface.
struct Ownership {
  int n_ranks = 1;
  std::vector<std::vector<OwnBlock>> band_blocks;  // per band

  int owner(int band, int local_elem) const;
};

Ownership assign_ranks(const Mesh& mesh, int n_ranks);

/// Owning rank of every interface face on one side, full periodic extent.
/// Row index is i_perp (a single row for a line interface), column i_par.
struct RankMap {
  long n_par = 0;
  long n_perp = 1;
  std::vector<int> ranks;  // n_perp * n_par, row-major, -1 when unset

  int at(long i_par, long i_perp) const {
    const long ip = ((i_par % n_par) + n_par) % n_par;
    return ranks[static_cast<std::size_t>(i_perp) * n_par + ip];
  }
  int& slot(long i_par, long i_perp) {
    return ranks[static_cast<std::size_t>(i_perp) * n_par + i_par];
  }
};

/// The pair (r, r~) for one sliding interface.
struct RankMaps {
  RankMap static_side;
  RankMap moving_side;
};

/// One column of the index array A: the five-entry tuple per mortar, plus
/// the outermost interface index used when several interfaces coexist.
struct MortarTuple {
  int partner_rank = 0;
  int i_iface = 0;  // outer sorting index between interfaces
  long i_par = 0;
  long i_perp = 0;
  int i_sub = 0;
  long i_face = 0;
  int ctx_tag = 0;  // passive local payload, not a sort key
};

struct IndexArrayA {
  std::vector<MortarTuple> cols;  // sorted; position = i_mortar (0-based)
};

/// Inverse of the last two rows of A: m(i_sub, i_face) -> i_mortar.
struct MappingM {
  long face_lo = 0;
  std::array<std::vector<int>, 2> rows;  // -1 where no such mortar exists

  int at(int i_sub, long i_face) const {
    return rows[i_sub][static_cast<std::size_t>(i_face - face_lo)];
  }
};

/// A face of the local rank adjacent to a sliding interface.
struct LocalInterfaceFace {
  long i_face = 0;  // process-local face id
  long i_par = 0;   // static-frame parallel index (moving side: moving index)
  long i_perp = 0;
};

/// Emits the tuples of all mortars adjacent to the given faces. On the
/// conforming configuration (s_delta == 0) each face carries one full-width
/// mortar with i_sub = 1.
void append_mortar_tuples(const std::vector<LocalInterfaceFace>& faces,
                          const RankMaps& maps, long n_delta, long n_faces,
                          bool on_static_side, bool conforming, int iface_id,
                          int ctx_tag, std::vector<MortarTuple>& out);

/// Nested sort by (partner, interface, i_par, i_perp, i_sub); i_face rides
/// along passively.
void sort_index_array(std::vector<MortarTuple>& cols);

/// Fills m for the subset of sorted columns with the given ctx_tag.
void build_mapping(const std::vector<MortarTuple>& cols, int ctx_tag,
                   const std::vector<LocalInterfaceFace>& faces, MappingM& m);

/// Single-interface convenience wrapper: tuples, sort, mapping in one call.
void rebuild_index_arrays(const std::vector<LocalInterfaceFace>& faces,
                          const RankMaps& maps, long n_delta, long n_faces,
                          bool on_static_side, bool conforming, IndexArrayA& a,
                          MappingM& m);

/// Contiguous per-partner message descriptor derived from a sorted A.
/// Blocks destined to `self` are returned separately: they are served by a
/// direct copy, not by a message.
struct ScheduleEntry {
  int partner = 0;
  int offset = 0;  // first i_mortar of the block
  int count = 0;
};

std::vector<ScheduleEntry> build_schedule(const std::vector<MortarTuple>& cols, int self,
                                          ScheduleEntry& self_entry);

/// Performance index: average walltime per degree of freedom per stage.
double measure_pid(double wall_seconds, long n_cores, long n_dof, long n_steps,
                   long n_rk_stages);

}  // namespace sdg
