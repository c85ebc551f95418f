// Copyright 2026 The confq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "confq/sterimol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "confq/elements.hpp"
#include "confq/error.hpp"
#include "confq/geom.hpp"

namespace confq {

std::vector<int> substituent_atoms(const MolecularGraph& graph, int a, int b) {
  try {
    auto atoms = side_of_bond(graph, a, b);
    std::sort(atoms.begin(), atoms.end());
    return atoms;
  } catch (const TopologyError& e) {
    throw TopologyError(std::string("unsupported substituent topology: ") + e.what());
  }
}

SterimolResult sterimol_LB5(const MolecularGraph& graph, const Coords& coords, int a,
                            int b, const std::vector<int>& substituent) {
  const Eigen::RowVector3d ra = coords.row(a);
  Eigen::RowVector3d axis = coords.row(b) - ra;
  const double len = axis.norm();
  if (!(len > 1e-12)) throw GeometryError("descriptor bond has zero length");
  axis /= len;

  SterimolResult r;
  r.L = -std::numeric_limits<double>::infinity();
  r.B5 = -std::numeric_limits<double>::infinity();
  for (int i : substituent) {
    const double radius = vdw_radius(graph.atom(i).atomic_number);
    const Eigen::RowVector3d d = coords.row(i) - ra;
    const double axial = d.dot(axis);
    const double radial = (d - axial * axis).norm();
    r.L = std::max(r.L, axial + radius);
    r.B5 = std::max(r.B5, radial + radius);
  }
  r.substituent_atom_ids = substituent;
  if (!std::isfinite(r.L) || !std::isfinite(r.B5))
    throw GeometryError("Sterimol values are not finite");
  return r;
}

SterimolResult sterimol_LB5(const MolecularGraph& graph, const Conformer& conformer) {
  const BondRef ref = graph.descriptor_bond();
  if (!ref.is_set()) throw InvalidArgument("graph has no descriptor bond");
  if (conformer.coords.rows() != graph.atom_count())
    throw InvalidArgument("conformer atom count does not match graph");
  return sterimol_LB5(graph, conformer.coords, ref.a, ref.b,
                      substituent_atoms(graph, ref.a, ref.b));
}

}  // namespace confq
