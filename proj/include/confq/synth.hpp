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

#include <cstdint>
#include <vector>

#include "confq/elements.hpp"
#include "confq/ensemble.hpp"
#include "confq/molecule.hpp"

namespace confq {

/// V(t) = v1/2 (1 + cos t) + v2/2 (1 - cos 2t) + v3/2 (1 + cos 3t), kcal/mol.
struct TorsionPotential {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;

  double energy(double theta_deg) const;
  double derivative(double theta_deg) const;  // per radian
  /// Local minima in degrees, ascending, in (-180, 180].
  std::vector<double> minima() const;
  double global_minimum() const;
};

struct TorsionTerm {
  int j = 0;
  int k = 0;
  TorsionPotential potential;
};

/// Repulsion k (d0 - d)^2 between heavy atoms at least `min_separation`
/// bonds apart, for d < d0.
struct ClashTerm {
  double k = 12.0;
  double d0 = 3.0;
  int min_separation = 4;
};

double conformer_energy(const MolecularGraph& graph, const Coords& coords,
                        const std::vector<TorsionTerm>& torsions, const ClashTerm& clash);

/// Every combination of per-bond local minima for `varied`, with the bonds
/// in `frozen` held at their global minimum. Conformer ids enumerate the
/// combinations in lexicographic order; energies include the clash term.
ConformerEnsemble enumerate_torsional_minima(const MolecularGraph& graph, const Coords& base,
                                             const std::vector<TorsionTerm>& varied,
                                             const std::vector<TorsionTerm>& frozen,
                                             const ClashTerm& clash);

/// Tree geometry from ideal bond lengths and angles; every torsion starts
/// anti or staggered. Throws TopologyError for graphs with rings.
Coords build_tree_geometry(const MolecularGraph& graph);

struct SyntheticMoleculeSpec {
  int min_chain = 4;  // substituent heavy atoms, the first substituent atom included
  int max_chain = 8;
  double branch_probability = 0.3;
  std::vector<int> palette{kCarbon, kCarbon, kCarbon, kCarbon, kNitrogen, kOxygen, kFluorine, kChlorine};
  int max_rotatable = 3;
  TorsionPotential torsion{0.8, 0.2, 2.8};
  double coefficient_spread = 0.3;  // per-bond factors drawn from [1 - s, 1 + s]
  ClashTerm clash;
  double mid_perturbation = 0.15;  // relative noise on cheap-tier potential coefficients
  double low_perturbation = 0.35;
  TierNoise mid_noise = kMidTierNoise;
  TierNoise low_noise = kLowTierNoise;
  std::uint64_t seed = 0;
  int max_retries = 100;

  void validate() const;
};

/// One synthetic acid-like molecule: carboxyl carbon a, alpha carbon b and a
/// random substituent tree. Exact labels come from the Exact ensemble after
/// 6-decimal quantization, so they survive a manifest round trip.
DatasetRecord generate_molecule(const SyntheticMoleculeSpec& spec, std::int64_t id);
std::vector<DatasetRecord> generate_dataset(const SyntheticMoleculeSpec& spec, int n_molecules);

}  // namespace confq
