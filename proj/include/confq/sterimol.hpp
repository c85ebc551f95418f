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

#include <vector>

#include "confq/molecule.hpp"

namespace confq {

struct SterimolResult {
  double L = 0.0;   // Angstrom
  double B5 = 0.0;  // Angstrom
  std::vector<int> substituent_atom_ids;
};

/// Atoms on the b side of the bond (a, b), b included and a excluded.
/// Throws TopologyError when (a, b) is not a bond or lies in a ring.
std::vector<int> substituent_atoms(const MolecularGraph& graph, int a, int b);

/// Sterimol L and B5 of the graph's descriptor bond. L is measured along
/// the a->b axis from atom a; neither value carries a legacy offset.
SterimolResult sterimol_LB5(const MolecularGraph& graph, const Conformer& conformer);

/// Same computation for an explicit substituent list.
SterimolResult sterimol_LB5(const MolecularGraph& graph, const Coords& coords, int a,
                            int b, const std::vector<int>& substituent);

}  // namespace confq
