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
#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "confq/molecule.hpp"
#include "confq/sterimol.hpp"

namespace confq {

inline constexpr double kBoltzmannKcal = 0.0019872041;  // kcal/(mol K)
inline constexpr double kDefaultTemperature = 298.15;   // K
inline constexpr double kDefaultEnergyWindow = 5.0;     // kcal/mol

/// Keeps conformers with E - E_min <= window. Throws InvalidArgument when
/// energies are missing.
ConformerEnsemble energy_filter(const ConformerEnsemble& ensemble,
                                double window = kDefaultEnergyWindow);

/// Normalized Boltzmann factors exp(-(E - E_min) / kT).
std::vector<double> boltzmann_weights(std::span<const double> energies,
                                      double temperature = kDefaultTemperature);
double boltzmann_average(std::span<const double> values, std::span<const double> weights);

struct AggregatedLabels {
  TargetValues values{};
  std::array<int, 4> active_ids{};  // conformer id attaining each target

  double value(Target t) const { return at(values, t); }
  int active_id(Target t) const { return active_ids[static_cast<std::size_t>(t)]; }
};

std::vector<SterimolResult> sterimol_per_conformer(const ConformerEnsemble& ensemble);

/// Ensemble min/max of L and B5; ties resolve to the lowest conformer id.
AggregatedLabels aggregate_labels(const ConformerEnsemble& ensemble);

struct Cluster {
  int centroid = 0;
  std::vector<int> members;  // centroid first, then ascending
};

/// Butina sphere-exclusion clustering over a symmetric distance matrix.
/// Items are matrix indices; neighbors satisfy d <= threshold.
std::vector<Cluster> butina_from_distances(const Eigen::MatrixXd& distances,
                                           double threshold);

/// Pairwise heavy-atom RMSD, rows in ensemble order.
Eigen::MatrixXd rmsd_matrix(const ConformerEnsemble& ensemble);

/// Butina clustering of an ensemble; cluster entries are conformer ids.
std::vector<Cluster> butina_cluster(const ConformerEnsemble& ensemble, double threshold);

struct IterativeButinaResult {
  ConformerEnsemble centroids;
  double threshold = 0.0;  // threshold of the accepted pass
  int passes = 0;
};

/// Re-clusters with a growing threshold until at most `max_clusters`
/// clusters remain; returns the centroid conformers in id order.
IterativeButinaResult iterative_butina(const ConformerEnsemble& ensemble, double start = 0.20,
                                       double step = 0.10, int max_clusters = 20);

/// Single, acyclic bonds between heavy atoms that each carry another
/// heavy neighbor, as (j, k) with the k side moving.
std::vector<std::pair<int, int>> rotatable_bonds(const MolecularGraph& graph);

struct TierNoise {
  double jitter_sigma;   // Angstrom
  double torsion_sigma;  // degrees
};

inline constexpr TierNoise kMidTierNoise{0.03, 3.0};
inline constexpr TierNoise kLowTierNoise{0.09, 8.0};

struct CorruptionSpec {
  double jitter_sigma = 0.0;
  double torsion_sigma = 0.0;
  std::uint64_t seed = 0;
  Quality quality = Quality::Exact;

  static CorruptionSpec for_tier(Quality q, std::uint64_t seed, TierNoise mid = kMidTierNoise,
                                 TierNoise low = kLowTierNoise);
  void validate() const;
};

/// Gaussian coordinate jitter followed by Gaussian torsion perturbation of
/// every rotatable bond. Each conformer draws from its own stream derived
/// from (seed, conformer id), so corrupting a subset matches corrupting the
/// whole ensemble and subsetting.
ConformerEnsemble corrupt(const ConformerEnsemble& ensemble, const CorruptionSpec& spec);

/// n_c draws without replacement, restarting a fresh pass once the
/// ensemble is exhausted.
std::vector<Conformer> presample(const ConformerEnsemble& ensemble, int n_c, std::uint64_t seed);
Conformer sample_random_conformer(const ConformerEnsemble& ensemble, std::uint64_t seed);

struct DecoySet {
  std::vector<Conformer> conformers;
  int active_position = -1;
  bool contains_active = false;
  bool undersized = false;  // fewer than n_c members were available
  Quality quality = Quality::Exact;
};

DecoySet build_decoy_set(const ConformerEnsemble& ensemble_exact, int active_id, int n_c,
                         const CorruptionSpec& spec, std::uint64_t seed);
DecoySet build_decoy_set(const ConformerEnsemble& ensemble_exact, Target target, int n_c,
                         const CorruptionSpec& spec, std::uint64_t seed);

}  // namespace confq
