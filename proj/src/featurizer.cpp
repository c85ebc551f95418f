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


#include "confq/featurizer.hpp"

#include <algorithm>
#include <cmath>

#include "confq/elements.hpp"
#include "confq/error.hpp"

namespace confq {
namespace {

int element_slot(int z) {
  switch (z) {
    case kHydrogen: return 0;
    case kCarbon: return 1;
    case kNitrogen: return 2;
    case kOxygen: return 3;
    case kFluorine: return 4;
    case kSulfur: return 5;
    case kChlorine: return 6;
    case kBromine: return 7;
    default: return 8;
  }
}

bool featurized(const MolecularGraph& g, int i) {
  return g.is_heavy(i) || (g.atom(i).flags & kAtomFlagExplicitH);
}

}  // namespace

std::vector<int> featurized_atoms(const MolecularGraph& graph) {
  std::vector<int> out;
  for (int i = 0; i < graph.atom_count(); ++i)
    if (featurized(graph, i)) out.push_back(i);
  return out;
}

int AtomFeatures::row_of(int atom) const {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), atom);
  return it != atoms.end() && *it == atom ? static_cast<int>(it - atoms.begin()) : -1;
}

AtomFeatures featurize_conformer(const MolecularGraph& graph, const Coords& coords) {
  if (coords.rows() != graph.atom_count())
    throw InvalidArgument("coordinate rows do not match the atom count");
  AtomFeatures f;
  f.atoms = featurized_atoms(graph);
  const auto heavy = graph.heavy_atoms();
  f.h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(f.atoms.size()), kAtomFeatureDim);
  constexpr double width = kHistogramRange / kHistogramBins;
  for (std::size_t r = 0; r < f.atoms.size(); ++r) {
    const int i = f.atoms[r];
    f.h(r, element_slot(graph.atom(i).atomic_number)) = 1.0;
    int degree = 0;
    for (int n : graph.neighbors(i))
      if (featurized(graph, n)) ++degree;
    f.h(r, kElementSlots + std::min(degree, kDegreeSlots - 1)) = 1.0;
    for (int j : heavy) {
      if (j == i) continue;
      const double d = (coords.row(i) - coords.row(j)).norm();
      const int bin = std::min(static_cast<int>(std::floor(d / width)), kHistogramBins - 1);
      f.h(r, kElementSlots + kDegreeSlots + bin) += 1.0;
    }
  }
  return f;
}

BondFeatures bond_features(const MolecularGraph& graph, const Coords& coords) {
  const BondRef bond = graph.descriptor_bond();
  if (!bond.is_set()) throw InvalidArgument("graph has no descriptor bond");
  const AtomFeatures f = featurize_conformer(graph, coords);
  const int ra = f.row_of(bond.a), rb = f.row_of(bond.b);
  if (ra < 0 || rb < 0) throw InvalidArgument("descriptor bond atom is not featurized");
  return {f.h.row(ra), f.h.row(rb), f.h.colwise().sum()};
}

}  // namespace confq
