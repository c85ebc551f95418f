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


#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "confq/molecule.hpp"

namespace confq {

/// x -> rotation * x + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Coords apply(const Coords& points) const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

/// Least-squares proper rigid transform mapping `p` onto `q` (row
/// correspondence). Throws GeometryError for fewer than 3 points or a
/// covariance of rank < 2.
RigidTransform kabsch(const Coords& p, const Coords& q);

/// Root-mean-square deviation without any alignment.
double rmsd(const Coords& p, const Coords& q);

/// RMSD after optimal superposition of `p` onto `q`.
double rmsd_aligned(const Coords& p, const Coords& q);

Coords select_rows(const Coords& coords, const std::vector<int>& rows);

/// Aligned RMSD over heavy atoms with identity correspondence.
double heavy_atom_rmsd(const MolecularGraph& graph, const Conformer& x,
                       const Conformer& y);

/// Dihedral i-j-k-l in degrees, IUPAC sign, range (-180, 180].
double get_torsion(const Coords& coords, int i, int j, int k, int l);

/// Atoms reachable from `to` without crossing the bond (from, to),
/// including `to`. Throws TopologyError if `from` is still reachable, i.e.
/// the bond sits in a ring.
std::vector<int> side_of_bond(const MolecularGraph& graph, int from, int to);

/// Reference atoms (i, l) used to define the torsion about bond (j, k):
/// lowest-index heavy neighbor when one exists, else lowest-index neighbor.
std::pair<int, int> torsion_reference_atoms(const MolecularGraph& graph, int j,
                                            int k);

/// Rotates the k side of bond (j, k) so that the torsion defined by
/// torsion_reference_atoms equals `angle_deg`.
Coords set_torsion(const Coords& coords, const MolecularGraph& graph, int j,
                   int k, double angle_deg);

/// Rotates the k side of bond (j, k) by `delta_deg` about the j->k axis.
void rotate_about_bond(Coords& coords, const std::vector<int>& moving, int j,
                       int k, double delta_deg);

}  // namespace confq
