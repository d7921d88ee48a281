#include "face_topology.hpp"

#include <algorithm>
#include <map>

#include "errors.hpp"

namespace sdg {

namespace {

struct NeighborRef {
  bool exists = false;
  bool sliding = false;
  int interface_id = -1;
  int band = 0, ix = 0, iy = 0;
};

// Neighbor of (band, ix, iy) in +x, honoring band boundaries and wrap.
NeighborRef x_neighbor(const Mesh& mesh, int band, int ix, int iy, bool plus) {
  const Band& b = mesh.band(band);
  NeighborRef n;
  if (plus && ix + 1 < b.nx) {
    n = {true, false, -1, band, ix + 1, iy};
    return n;
  }
  if (!plus && ix > 0) {
    n = {true, false, -1, band, ix - 1, iy};
    return n;
  }
  const int nb = static_cast<int>(mesh.bands().size());
  int other = plus ? band + 1 : band - 1;
  if (other < 0 || other >= nb) {
    if (!mesh.spec().periodic_x) return n;  // domain boundary
    other = (other + nb) % nb;
  }
  if (nb == 1) {  // single band wrapping onto itself
    n = {true, false, -1, band, plus ? 0 : b.nx - 1, iy};
    return n;
  }
  // Interface between the two bands; sliding if registered.
  const int left = plus ? band : other;
  for (const auto& iface : mesh.interfaces()) {
    if (iface.left_band == left && iface.right_band == (plus ? other : band)) {
      n = {true, true, iface.id, other, 0, iy};
      return n;
    }
  }
  n = {true, false, -1, other, plus ? 0 : mesh.band(other).nx - 1, iy};
  return n;
}

}  // namespace

LocalDomain build_local_domain(const Mesh& mesh, const Ownership& own, int rank) {
  LocalDomain dom;
  dom.rank = rank;
  dom.sliding_faces.resize(mesh.interfaces().size());

  const int nb = static_cast<int>(mesh.bands().size());
  std::map<int, int> local_of_gid;
  for (int b = 0; b < nb; ++b) {
    const Band& band = mesh.band(b);
    for (const auto& blk : own.band_blocks[b]) {
      if (blk.rank != rank) continue;
      for (int e = blk.start; e < blk.start + blk.count; ++e) {
        const int ix = e / band.ny;
        const int iy = e % band.ny;
        const int gid = mesh.global_id(b, ix, iy);
        local_of_gid[gid] = static_cast<int>(dom.elements.size());
        dom.elements.push_back({b, ix, iy, gid});
      }
    }
  }

  auto owner_of = [&](int band, int ix, int iy) {
    return own.owner(band, ix * mesh.band(band).ny + iy);
  };

  for (int le = 0; le < static_cast<int>(dom.elements.size()); ++le) {
    const auto& el = dom.elements[le];
    const Band& band = mesh.band(el.band);

    // y-direction: always within the band, periodic or Dirichlet.
    {
      const bool top = el.iy + 1 == band.ny;
      if (top && !mesh.spec().periodic_y) {
        dom.dirichlet_faces.push_back({le, YPlus});
      } else {
        const int niy = (el.iy + 1) % band.ny;
        const int ngid = mesh.global_id(el.band, el.ix, niy);
        const long key = 2L * mesh.global_id(el.band, el.ix, el.iy) + 1;
        const int nrank = owner_of(el.band, el.ix, niy);
        if (nrank == rank) {
          dom.interior_faces.push_back({le, local_of_gid.at(ngid), 1});
        } else {
          dom.remote_faces.push_back({le, 1, true, nrank, key});
        }
      }
      const bool bottom = el.iy == 0;
      if (bottom && !mesh.spec().periodic_y) {
        dom.dirichlet_faces.push_back({le, YMinus});
      } else {
        const int niy = (el.iy - 1 + band.ny) % band.ny;
        const int nrank = owner_of(el.band, el.ix, niy);
        if (nrank != rank) {
          const long key = 2L * mesh.global_id(el.band, el.ix, niy) + 1;
          dom.remote_faces.push_back({le, 1, false, nrank, key});
        }
      }
    }

    // x-direction.
    for (const bool plus : {true, false}) {
      const NeighborRef n = x_neighbor(mesh, el.band, el.ix, el.iy, plus);
      if (!n.exists) {
        dom.dirichlet_faces.push_back({le, plus ? XPlus : XMinus});
        continue;
      }
      if (n.sliding) {
        dom.sliding_faces[n.interface_id].push_back(
            {n.interface_id, le, plus ? XPlus : XMinus, el.iy});
        continue;
      }
      const int nrank = owner_of(n.band, n.ix, n.iy);
      const int ngid = mesh.global_id(n.band, n.ix, n.iy);
      if (plus) {
        const long key = 2L * el.gid;
        if (nrank == rank) {
          dom.interior_faces.push_back({le, local_of_gid.at(ngid), 0});
        } else {
          dom.remote_faces.push_back({le, 0, true, nrank, key});
        }
      } else if (nrank != rank) {
        const long key = 2L * ngid;
        dom.remote_faces.push_back({le, 0, false, nrank, key});
      }
    }
  }

  std::sort(dom.remote_faces.begin(), dom.remote_faces.end(),
            [](const RemoteFace& a, const RemoteFace& b) {
              if (a.partner != b.partner) return a.partner < b.partner;
              return a.key < b.key;
            });
  for (auto& sf : dom.sliding_faces)
    std::sort(sf.begin(), sf.end(),
              [](const SlidingFace& a, const SlidingFace& b) { return a.i_par < b.i_par; });
  return dom;
}

}  // namespace sdg
