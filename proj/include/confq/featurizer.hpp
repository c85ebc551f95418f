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
#include <vector>

#include "confq/molecule.hpp"

namespace confq {

// Per-atom layout: element one-hot | degree one-hot | radial histogram.
inline constexpr int kElementSlots = 9;  // H C N O F S Cl Br other
inline constexpr int kDegreeSlots = 5;   // 0..4, higher degrees clipped to 4
inline constexpr int kHistogramBins = 8;
inline constexpr double kHistogramRange = 5.0;  // Angstrom; longer distances land in the last bin
inline constexpr int kAtomFeatureDim = kElementSlots + kDegreeSlots + kHistogramBins;

/// Heavy atoms plus hydrogens flagged kAtomFlagExplicitH, ascending.
std::vector<int> featurized_atoms(const MolecularGraph& graph);

struct AtomFeatures {
  std::vector<int> atoms;  // graph index of each row
  Eigen::MatrixXd h;       // atoms.size() x kAtomFeatureDim

  int row_of(int atom) const;  // -1 when the atom is not featurized
};

AtomFeatures featurize_conformer(const MolecularGraph& graph, const Coords& coords);

/// Raw (unstandardized) encoder inputs for one conformer.
struct BondFeatures {
  Eigen::RowVectorXd h_a;
  Eigen::RowVectorXd h_b;
  Eigen::RowVectorXd pooled;  // sum over all featurized atoms
};

/// Features of the descriptor bond atoms. Throws InvalidArgument when the
/// graph has no descriptor bond or its atoms are not featurized.
BondFeatures bond_features(const MolecularGraph& graph, const Coords& coords);

}  // namespace confq
