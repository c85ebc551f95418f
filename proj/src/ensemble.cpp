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


#include "confq/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "confq/error.hpp"
#include "confq/geom.hpp"
#include "confq/rng.hpp"

namespace confq {

ConformerEnsemble energy_filter(const ConformerEnsemble& ensemble, double window) {
  if (!ensemble.has_energies())
    throw InvalidArgument("energy filter needs energies on every conformer");
  double e_min = std::numeric_limits<double>::infinity();
  for (const Conformer& c : ensemble.conformers) e_min = std::min(e_min, *c.energy);
  ConformerEnsemble out{ensemble.graph, {}};
  for (const Conformer& c : ensemble.conformers)
    if (*c.energy - e_min <= window) out.conformers.push_back(c);
  return out;
}

std::vector<double> boltzmann_weights(std::span<const double> energies, double temperature) {
  if (energies.empty()) throw InvalidArgument("Boltzmann weights of an empty ensemble");
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be positive");
  const double kt = kBoltzmannKcal * temperature;
  const double e_min = *std::min_element(energies.begin(), energies.end());
  std::vector<double> w(energies.size());
  double z = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    w[i] = std::exp(-(energies[i] - e_min) / kt);
    z += w[i];
  }
  for (double& x : w) x /= z;
  return w;
}

double boltzmann_average(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size() || values.empty())
    throw InvalidArgument("values and weights must be nonempty and equal in length");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * weights[i];
  return s;
}

std::vector<SterimolResult> sterimol_per_conformer(const ConformerEnsemble& ensemble) {
  const BondRef ref = ensemble.graph.descriptor_bond();
  if (!ref.is_set()) throw InvalidArgument("graph has no descriptor bond");
  const auto sub = substituent_atoms(ensemble.graph, ref.a, ref.b);
  std::vector<SterimolResult> out;
  out.reserve(ensemble.conformers.size());
  for (const Conformer& c : ensemble.conformers)
    out.push_back(sterimol_LB5(ensemble.graph, c.coords, ref.a, ref.b, sub));
  return out;
}

AggregatedLabels aggregate_labels(const ConformerEnsemble& ensemble) {
  if (ensemble.conformers.empty()) throw InvalidArgument("empty ensemble");
  const auto values = sterimol_per_conformer(ensemble);
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return ensemble.conformers[x].id < ensemble.conformers[y].id;
  });
  AggregatedLabels out;
  bool first = true;
  for (std::size_t idx : order) {
    const int id = ensemble.conformers[idx].id;
    const double l = values[idx].L, b5 = values[idx].B5;
    auto update = [&](Target t, double v, bool take_min) {
      auto k = static_cast<std::size_t>(t);
      if (first || (take_min ? v < out.values[k] : v > out.values[k])) {
        out.values[k] = v;
        out.active_ids[k] = id;
      }
    };
    update(Target::LMin, l, true);
    update(Target::LMax, l, false);
    update(Target::B5Min, b5, true);
    update(Target::B5Max, b5, false);
    first = false;
  }
  return out;
}

std::vector<Cluster> butina_from_distances(const Eigen::MatrixXd& d, double threshold) {
  const int n = static_cast<int>(d.rows());
  if (d.cols() != n) throw InvalidArgument("distance matrix must be square");
  std::vector<std::vector<int>> nbrs(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && d(i, j) <= threshold) nbrs[i].push_back(j);

  std::vector<char> assigned(n, 0);
  std::vector<Cluster> clusters;
  int remaining = n;
  while (remaining > 0) {
    int best = -1, best_count = -1;
    for (int i = 0; i < n; ++i) {
      if (assigned[i]) continue;
      int count = 0;
      for (int j : nbrs[i]) count += assigned[j] ? 0 : 1;
      if (count > best_count) {
        best = i;
        best_count = count;
      }
    }
    Cluster c;
    c.centroid = best;
    c.members.push_back(best);
    assigned[best] = 1;
    --remaining;
    for (int j : nbrs[best])
      if (!assigned[j]) {
        assigned[j] = 1;
        --remaining;
        c.members.push_back(j);
      }
    std::sort(c.members.begin() + 1, c.members.end());
    clusters.push_back(std::move(c));
  }
  return clusters;
}

Eigen::MatrixXd rmsd_matrix(const ConformerEnsemble& ensemble) {
  const auto heavy = ensemble.graph.heavy_atoms();
  const int n = static_cast<int>(ensemble.conformers.size());
  std::vector<Coords> reduced;
  reduced.reserve(n);
  for (const Conformer& c : ensemble.conformers) reduced.push_back(select_rows(c.coords, heavy));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = rmsd_aligned(reduced[i], reduced[j]);
  return d;
}

namespace {

// Ensemble indices sorted by conformer id, so index ties become id ties.
std::vector<int> id_order(const ConformerEnsemble& e) {
  std::vector<int> order(e.conformers.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return e.conformers[x].id < e.conformers[y].id; });
  return order;
}

std::vector<Cluster> cluster_sorted(const ConformerEnsemble& e, const std::vector<int>& order,
                                    const Eigen::MatrixXd& d_sorted, double threshold) {
  auto clusters = butina_from_distances(d_sorted, threshold);
  for (Cluster& c : clusters) {
    c.centroid = e.conformers[order[c.centroid]].id;
    for (int& m : c.members) m = e.conformers[order[m]].id;
    std::sort(c.members.begin() + 1, c.members.end());
  }
  return clusters;
}

Eigen::MatrixXd permuted(const Eigen::MatrixXd& d, const std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = d(order[i], order[j]);
  return out;
}

}  // namespace

std::vector<Cluster> butina_cluster(const ConformerEnsemble& ensemble, double threshold) {
  if (ensemble.conformers.empty()) throw InvalidArgument("clustering an empty ensemble");
  const auto order = id_order(ensemble);
  return cluster_sorted(ensemble, order, permuted(rmsd_matrix(ensemble), order), threshold);
}

IterativeButinaResult iterative_butina(const ConformerEnsemble& ensemble, double start,
                                       double step, int max_clusters) {
  if (ensemble.conformers.empty()) throw InvalidArgument("clustering an empty ensemble");
  if (!(step > 0.0) || max_clusters < 1)
    throw InvalidArgument("iterative Butina needs step > 0 and max_clusters >= 1");
  const auto order = id_order(ensemble);
  const Eigen::MatrixXd d = permuted(rmsd_matrix(ensemble), order);
  IterativeButinaResult result;
  for (int pass = 0;; ++pass) {
    const double threshold = start + pass * step;
    auto clusters = cluster_sorted(ensemble, order, d, threshold);
    if (static_cast<int>(clusters.size()) <= max_clusters) {
      std::vector<int> ids;
      for (const Cluster& c : clusters) ids.push_back(c.centroid);
      std::sort(ids.begin(), ids.end());
      result.centroids.graph = ensemble.graph;
      for (int id : ids) result.centroids.conformers.push_back(ensemble.by_id(id));
      result.threshold = threshold;
      result.passes = pass + 1;
      return result;
    }
  }
}

std::vector<std::pair<int, int>> rotatable_bonds(const MolecularGraph& graph) {
  std::vector<std::pair<int, int>> out;
  for (const Bond& b : graph.bonds()) {
    if (b.order != 1 || !graph.is_heavy(b.i) || !graph.is_heavy(b.j)) continue;
    if (graph.heavy_degree(b.i) < 2 || graph.heavy_degree(b.j) < 2) continue;
    try {
      side_of_bond(graph, b.i, b.j);
    } catch (const TopologyError&) {
      continue;  // ring bond
    }
    out.emplace_back(b.i, b.j);
  }
  return out;
}

CorruptionSpec CorruptionSpec::for_tier(Quality q, std::uint64_t seed, TierNoise mid,
                                        TierNoise low) {
  CorruptionSpec s;
  s.seed = seed;
  s.quality = q;
  if (q == Quality::Mid) {
    s.jitter_sigma = mid.jitter_sigma;
    s.torsion_sigma = mid.torsion_sigma;
  } else if (q == Quality::Low) {
    s.jitter_sigma = low.jitter_sigma;
    s.torsion_sigma = low.torsion_sigma;
  }
  return s;
}

void CorruptionSpec::validate() const {
  if (!(jitter_sigma >= 0.0) || !(torsion_sigma >= 0.0))
    throw InvalidArgument("corruption sigmas must be non-negative");
  const bool zero = jitter_sigma == 0.0 && torsion_sigma == 0.0;
  if (zero != (quality == Quality::Exact))
    throw InvalidArgument("quality Exact requires zero sigmas and vice versa");
}

ConformerEnsemble corrupt(const ConformerEnsemble& ensemble, const CorruptionSpec& spec) {
  spec.validate();
  ConformerEnsemble out = ensemble;
  std::vector<std::pair<std::vector<int>, std::pair<int, int>>> rotors;
  if (spec.torsion_sigma > 0.0)
    for (auto [j, k] : rotatable_bonds(ensemble.graph))
      rotors.push_back({side_of_bond(ensemble.graph, j, k), {j, k}});
  for (Conformer& c : out.conformers) {
    c.quality = spec.quality;
    Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(c.id)}));
    std::normal_distribution<double> unit(0.0, 1.0);
    if (spec.jitter_sigma > 0.0)
      for (Eigen::Index i = 0; i < c.coords.size(); ++i)
        c.coords.data()[i] += spec.jitter_sigma * unit(rng);
    for (const auto& [moving, bond] : rotors)
      rotate_about_bond(c.coords, moving, bond.first, bond.second,
                        spec.torsion_sigma * unit(rng));
  }
  return out;
}

std::vector<Conformer> presample(const ConformerEnsemble& ensemble, int n_c, std::uint64_t seed) {
  if (n_c <= 0) throw InvalidArgument("n_c must be positive");
  if (ensemble.conformers.empty()) throw InvalidArgument("sampling from an empty ensemble");
  Rng rng(seed);
  std::vector<std::size_t> pool;
  std::vector<Conformer> out;
  out.reserve(n_c);
  while (static_cast<int>(out.size()) < n_c) {
    if (pool.empty()) {
      pool.resize(ensemble.conformers.size());
      std::iota(pool.begin(), pool.end(), 0);
      std::shuffle(pool.begin(), pool.end(), rng);
    }
    out.push_back(ensemble.conformers[pool.back()]);
    pool.pop_back();
  }
  return out;
}

Conformer sample_random_conformer(const ConformerEnsemble& ensemble, std::uint64_t seed) {
  return presample(ensemble, 1, seed).front();
}

DecoySet build_decoy_set(const ConformerEnsemble& ensemble_exact, int active_id, int n_c,
                         const CorruptionSpec& spec, std::uint64_t seed) {
  if (n_c <= 0) throw InvalidArgument("n_c must be positive");
  Rng rng(seed);
  std::vector<int> decoys;
  for (const Conformer& c : ensemble_exact.conformers)
    if (c.id != active_id) decoys.push_back(c.id);
  std::sort(decoys.begin(), decoys.end());
  std::shuffle(decoys.begin(), decoys.end(), rng);
  if (static_cast<int>(decoys.size()) > n_c - 1) decoys.resize(n_c - 1);

  ConformerEnsemble members{ensemble_exact.graph, {ensemble_exact.by_id(active_id)}};
  for (int id : decoys) members.conformers.push_back(ensemble_exact.by_id(id));
  members = corrupt(members, spec);

  std::vector<int> order(members.conformers.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  DecoySet set;
  set.quality = spec.quality;
  set.contains_active = true;
  set.undersized = static_cast<int>(order.size()) < n_c;
  for (std::size_t p = 0; p < order.size(); ++p) {
    if (order[p] == 0) set.active_position = static_cast<int>(p);
    set.conformers.push_back(std::move(members.conformers[order[p]]));
  }
  return set;
}

DecoySet build_decoy_set(const ConformerEnsemble& ensemble_exact, Target target, int n_c,
                         const CorruptionSpec& spec, std::uint64_t seed) {
  return build_decoy_set(ensemble_exact, aggregate_labels(ensemble_exact).active_id(target),
                         n_c, spec, seed);
}

}  // namespace confq
