#pragma once

#include <vector>

#include "mesh.hpp"
#include "partition.hpp"

namespace sdg {

enum Side : int { XMinus = 0, XPlus = 1, YMinus = 2, YPlus = 3 };

/// An element owned by this rank.
struct OwnedElement {
  int band = 0, ix = 0, iy = 0;
  int gid = 0;
};

/// Face between two locally owned elements. The minus element sees the face
/// on its positive side; the face normal points along the +axis.
struct InteriorFace {
  int elem_minus = 0;  // local element indices
  int elem_plus = 0;
  int dir = 0;  // 0: x-face, 1: y-face
};

/// Face shared with another rank. `primary` marks the minus-side owner,
/// which computes the numerical flux.
struct RemoteFace {
  int local_elem = 0;
  int dir = 0;
  bool primary = false;
  int partner = 0;
  long key = 0;  // globally unique sort key
};

/// Domain-boundary face supplied with the exact solution trace.
struct DirichletFace {
  int local_elem = 0;
  Side side = XMinus;
};

/// Face of a locally owned element adjacent to a sliding interface.
struct SlidingFace {
  int interface_id = 0;
  int local_elem = 0;
  Side side = XMinus;  // XPlus when the owning band lies left of the interface
  long i_par = 0;      // static index (static side) or moving index (moving side)
};

/// Everything one rank needs to know about its share of the mesh.
struct LocalDomain {
  int rank = 0;
  std::vector<OwnedElement> elements;
  std::vector<InteriorFace> interior_faces;
  std::vector<RemoteFace> remote_faces;  // sorted by (partner, key)
  std::vector<DirichletFace> dirichlet_faces;
  std::vector<std::vector<SlidingFace>> sliding_faces;  // per interface, by i_par
};

LocalDomain build_local_domain(const Mesh& mesh, const Ownership& own, int rank);

}  // namespace sdg
