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

#include <Eigen/Geometry>
#include <random>

#include "confq/elements.hpp"
#include "confq/molecule.hpp"
#include "confq/rng.hpp"

namespace confq::testing {

inline Eigen::Matrix3d random_rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Coords random_cloud(Rng& rng, int n, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Coords c(n, 3);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d) c(i, d) = u(rng);
  return c;
}

inline Coords rigid_motion(const Coords& c, const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  Coords out = c * r.transpose();
  out.rowwise() += t.transpose();
  return out;
}

/// Random tree: atom 0 is the base atom a, atom 1 is b; every other atom
/// hangs off a random earlier atom. Elements drawn from {H, C, N, O, F, Cl}.
inline MolecularGraph random_tree(Rng& rng, int n_atoms) {
  static constexpr int kPalette[] = {kHydrogen, kCarbon, kCarbon, kNitrogen, kOxygen, kFluorine, kChlorine};
  std::uniform_int_distribution<int> el(0, 6);
  MolecularGraph g;
  g.add_atom({kCarbon, 0, 0});
  for (int i = 1; i < n_atoms; ++i) {
    g.add_atom({i == 1 ? kCarbon : kPalette[el(rng)], 0, 0});
    std::uniform_int_distribution<int> parent(0, i - 1);
    g.add_bond(i == 1 ? 0 : parent(rng), i);
  }
  g.set_descriptor_bond({0, 1});
  return g;
}

}  // namespace confq::testing

#include <algorithm>
#include <cmath>
#include <vector>

namespace confq::testing {

/// Test-only Sterimol reference: samples each vdW sphere surface with a
/// Fibonacci lattice and measures the sampled extent directly.
struct SampledSterimol {
  double L;
  double B5;
};

inline SampledSterimol sphere_sampling_oracle(const MolecularGraph& g, const Coords& x, int a, int b,
                                              const std::vector<int>& substituent,
                                              int points_per_atom) {
  const Eigen::Vector3d origin = x.row(a).transpose();
  const Eigen::Vector3d axis = (x.row(b).transpose() - origin).normalized();
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  double L = -1e300, B5 = -1e300;
  for (int i : substituent) {
    const double r = vdw_radius(g.atom(i).atomic_number);
    const Eigen::Vector3d c = x.row(i).transpose() - origin;
    for (int k = 0; k < points_per_atom; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / points_per_atom;
      const double rho = std::sqrt(1.0 - z * z);
      const double phi = golden * k;
      const Eigen::Vector3d p = c + r * Eigen::Vector3d(rho * std::cos(phi), rho * std::sin(phi), z);
      const double axial = p.dot(axis);
      L = std::max(L, axial);
      B5 = std::max(B5, (p - axial * axis).norm());
    }
  }
  return {L, B5};
}

struct RandomSubstituent {
  MolecularGraph graph;
  Coords coords;
  std::vector<int> substituent;  // every atom except a = 0
};

/// Atom 0 = a at the origin, atom 1 = b; the remaining substituent atoms
/// hang off random earlier substituent atoms at bond-like distances.
inline RandomSubstituent random_substituent(Rng& rng, int n_substituent) {
  static constexpr int kPalette[] = {kHydrogen, kCarbon, kNitrogen, kOxygen, kFluorine, kChlorine, kBromine};
  std::uniform_int_distribution<int> el(0, 6);
  std::uniform_real_distribution<double> len(1.0, 1.8);
  std::normal_distribution<double> n(0.0, 1.0);
  RandomSubstituent s;
  s.coords = Coords::Zero(n_substituent + 1, 3);
  s.graph.add_atom({kCarbon, 0, 0});
  for (int i = 1; i <= n_substituent; ++i) {
    s.graph.add_atom({i == 1 ? kCarbon : kPalette[el(rng)], 0, 0});
    int parent = 0;
    if (i > 1) parent = std::uniform_int_distribution<int>(1, i - 1)(rng);
    s.graph.add_bond(parent, i);
    Eigen::Vector3d dir(n(rng), n(rng), n(rng));
    s.coords.row(i) = s.coords.row(parent) + len(rng) * dir.normalized().transpose();
    s.substituent.push_back(i);
  }
  s.graph.set_descriptor_bond({0, 1});
  return s;
}

}  // namespace confq::testing

namespace confq::testing {

/// Random tree graph with `n_conformers` random-coordinate conformers,
/// ids 0..n-1 and energies 0.5 * id.
inline ConformerEnsemble random_ensemble(Rng& rng, int n_atoms, int n_conformers) {
  ConformerEnsemble e{random_tree(rng, n_atoms), {}};
  for (int k = 0; k < n_conformers; ++k) {
    Conformer c;
    c.coords = random_cloud(rng, n_atoms);
    c.energy = 0.5 * k;
    c.id = k;
    e.conformers.push_back(std::move(c));
  }
  return e;
}

}  // namespace confq::testing

#include <bit>

#include "confq/surrogate.hpp"

namespace confq::testing {

// Reference Butina: depth-first search over every centroid order, keeping
// only prefixes that obey the greedy rule.
inline void reference_butina(const std::vector<unsigned>& nbr, unsigned assigned,
                      std::vector<std::vector<int>>& current,
                      std::vector<std::vector<std::vector<int>>>& found) {
  const int n = static_cast<int>(nbr.size());
  const unsigned full = (1u << n) - 1;
  if (assigned == full) {
    found.push_back(current);
    return;
  }
  for (int cand = 0; cand < n; ++cand) {
    if (assigned & (1u << cand)) continue;
    const int cc = std::popcount(nbr[cand] & ~assigned);
    bool valid = true;
    for (int u = 0; u < n && valid; ++u) {
      if (u == cand || (assigned & (1u << u))) continue;
      const int cu = std::popcount(nbr[u] & ~assigned);
      if (cu > cc || (cu == cc && u < cand)) valid = false;
    }
    if (!valid) continue;
    const unsigned members = (nbr[cand] & ~assigned) | (1u << cand);
    std::vector<int> cluster{cand};
    for (int u = 0; u < n; ++u)
      if (u != cand && (members & (1u << u))) cluster.push_back(u);
    current.push_back(cluster);
    reference_butina(nbr, assigned | members, current, found);
    current.pop_back();
  }
}


inline EncodedConformer random_encoded(Rng& rng, int da, int dp) {
  std::normal_distribution<double> n(0.0, 1.0);
  EncodedConformer x{Eigen::RowVectorXd(da), Eigen::RowVectorXd(da), Eigen::RowVectorXd(dp)};
  for (int i = 0; i < da; ++i) {
    x.h_a[i] = n(rng);
    x.h_b[i] = n(rng);
  }
  for (int i = 0; i < dp; ++i) x.pooled[i] = n(rng);
  return x;
}

// Random-valued encoder so biases are nonzero too.
inline EncoderParams random_encoder(Rng& rng, int da, int dp, const Hyperparams& hp, bool gate) {
  EncoderParams p = make_encoder(da, dp, hp, gate, rng);
  std::normal_distribution<double> n(0.0, 0.5);
  auto flat = p.flatten();
  for (double& v : flat) v = n(rng);
  p.assign(flat);
  return p;
}

}  // namespace confq::testing
