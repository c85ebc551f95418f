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


#include "confq/synth.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <random>

#include "confq/error.hpp"
#include "confq/geom.hpp"
#include "confq/mol_io.hpp"
#include "confq/rng.hpp"

namespace confq {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap_deg(double t) {
  t = std::fmod(t, 360.0);
  if (t <= -180.0) t += 360.0;
  if (t > 180.0) t -= 360.0;
  return t;
}

int valence(int z) {
  switch (z) {
    case kHydrogen: case kFluorine: case kChlorine: case kBromine: return 1;
    case kOxygen: case kSulfur: return 2;
    case kNitrogen: return 3;
    default: return 4;
  }
}

double covalent_radius(int z) {
  switch (z) {
    case kHydrogen: return 0.31;
    case kCarbon: return 0.76;
    case kNitrogen: return 0.71;
    case kOxygen: return 0.66;
    case kFluorine: return 0.57;
    case kSulfur: return 1.05;
    case kChlorine: return 1.02;
    case kBromine: return 1.20;
    default: return 0.75;
  }
}

double bond_length(const MolecularGraph& g, int i, int j) {
  const double l = covalent_radius(g.atom(i).atomic_number) + covalent_radius(g.atom(j).atomic_number);
  return g.bond_order(i, j) >= 2 ? l - 0.20 : l;
}

bool trigonal(const MolecularGraph& g, int i) {
  for (int n : g.neighbors(i))
    if (g.bond_order(i, n) >= 2) return true;
  return false;
}

// Natural extension reference frame placement of d bonded to c.
Eigen::Vector3d place(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                      double length, double angle_deg, double torsion_deg) {
  const Eigen::Vector3d bc = (c - b).normalized();
  Eigen::Vector3d n = (b - a).cross(bc);
  if (n.norm() < 1e-9) n = bc.unitOrthogonal();
  n.normalize();
  const Eigen::Vector3d m = n.cross(bc);
  const double ang = angle_deg * kDeg, tor = torsion_deg * kDeg;
  const Eigen::Vector3d d2(-length * std::cos(ang), length * std::sin(ang) * std::cos(tor),
                           length * std::sin(ang) * std::sin(tor));
  return c + d2.x() * bc + d2.y() * m + d2.z() * n;
}

std::vector<std::vector<int>> topological_distances(const MolecularGraph& g) {
  const int n = g.atom_count();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    q.push(s);
    d[s][s] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : g.neighbors(u))
        if (d[s][v] < 0) {
          d[s][v] = d[s][u] + 1;
          q.push(v);
        }
    }
  }
  return d;
}

Coords quantized(const Coords& c) { return c.unaryExpr([](double v) { return quantize6(v); }); }

}  // namespace

double TorsionPotential::energy(double t) const {
  const double r = t * kDeg;
  return 0.5 * v1 * (1.0 + std::cos(r)) + 0.5 * v2 * (1.0 - std::cos(2.0 * r)) +
         0.5 * v3 * (1.0 + std::cos(3.0 * r));
}

double TorsionPotential::derivative(double t) const {
  const double r = t * kDeg;
  return -0.5 * v1 * std::sin(r) + v2 * std::sin(2.0 * r) - 1.5 * v3 * std::sin(3.0 * r);
}

std::vector<double> TorsionPotential::minima() const {
  constexpr int kGrid = 3600;
  std::vector<double> e(kGrid);
  for (int i = 0; i < kGrid; ++i) e[i] = energy(-180.0 + 360.0 * i / kGrid);
  std::vector<double> out;
  for (int i = 0; i < kGrid; ++i) {
    const double prev = e[(i + kGrid - 1) % kGrid], next = e[(i + 1) % kGrid];
    if (!(e[i] < prev && e[i] <= next)) continue;
    // Bisection on the derivative inside the bracketing grid cells.
    double lo = -180.0 + 360.0 * (i - 1) / kGrid, hi = -180.0 + 360.0 * (i + 1) / kGrid;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (derivative(mid) < 0.0 ? lo : hi) = mid;
    }
    out.push_back(wrap_deg(0.5 * (lo + hi)));
  }
  if (out.empty()) out.push_back(180.0);  // flat potential
  std::sort(out.begin(), out.end());
  return out;
}

double TorsionPotential::global_minimum() const {
  double best = 0.0, e_best = 1e300;
  for (double t : minima())
    if (energy(t) < e_best - 1e-12) {
      e_best = energy(t);
      best = t;
    }
  return best;
}

double conformer_energy(const MolecularGraph& graph, const Coords& coords,
                        const std::vector<TorsionTerm>& torsions, const ClashTerm& clash) {
  double e = 0.0;
  for (const auto& t : torsions) {
    const auto [i, l] = torsion_reference_atoms(graph, t.j, t.k);
    e += t.potential.energy(get_torsion(coords, i, t.j, t.k, l));
  }
  const auto heavy = graph.heavy_atoms();
  const auto topo = topological_distances(graph);
  for (std::size_t x = 0; x < heavy.size(); ++x)
    for (std::size_t y = x + 1; y < heavy.size(); ++y) {
      const int i = heavy[x], j = heavy[y];
      if (topo[i][j] >= 0 && topo[i][j] < clash.min_separation) continue;
      const double d = (coords.row(i) - coords.row(j)).norm();
      if (d < clash.d0) e += clash.k * (clash.d0 - d) * (clash.d0 - d);
    }
  return e;
}

ConformerEnsemble enumerate_torsional_minima(const MolecularGraph& graph, const Coords& base,
                                             const std::vector<TorsionTerm>& varied,
                                             const std::vector<TorsionTerm>& frozen,
                                             const ClashTerm& clash) {
  Coords start = base;
  for (const auto& t : frozen) start = set_torsion(start, graph, t.j, t.k, t.potential.global_minimum());
  std::vector<std::vector<double>> minima;
  for (const auto& t : varied) minima.push_back(t.potential.minima());
  std::vector<TorsionTerm> all = varied;
  all.insert(all.end(), frozen.begin(), frozen.end());

  ConformerEnsemble out{graph, {}};
  std::vector<std::size_t> idx(varied.size(), 0);
  for (int id = 0;; ++id) {
    Coords x = start;
    for (std::size_t b = 0; b < varied.size(); ++b)
      x = set_torsion(x, graph, varied[b].j, varied[b].k, minima[b][idx[b]]);
    out.conformers.push_back({x, conformer_energy(graph, x, all, clash), Quality::Exact, id});
    std::size_t b = varied.size();
    while (b > 0) {
      --b;
      if (++idx[b] < minima[b].size()) break;
      idx[b] = 0;
      if (b == 0) return out;
    }
    if (varied.empty()) return out;
  }
}

Coords build_tree_geometry(const MolecularGraph& graph) {
  const int n = graph.atom_count();
  Coords x = Coords::Zero(n, 3);
  if (n == 0) return x;
  std::vector<int> parent(n, -2);
  std::vector<std::vector<int>> children(n);
  std::vector<int> order{0};
  parent[0] = -1;
  for (std::size_t h = 0; h < order.size(); ++h) {
    const int u = order[h];
    for (int v : graph.neighbors(u)) {
      if (v == parent[u]) continue;
      if (parent[v] != -2) throw TopologyError("geometry builder requires an acyclic graph");
      parent[v] = u;
      children[u].push_back(v);
      order.push_back(v);
    }
  }
  if (static_cast<int>(order.size()) != n) throw TopologyError("molecule graph is disconnected");

  const Eigen::Vector3d virtual_a(0.0, 1.0, 0.0), virtual_b(-1.0, 1.0, 0.0);
  auto pos = [&](int i) -> Eigen::Vector3d { return x.row(i).transpose(); };
  for (int u : order) {
    const bool sp2 = trigonal(graph, u);
    const double angle = sp2 ? 120.0 : 109.4712;
    const double sp3_torsions[] = {180.0, 60.0, -60.0, 0.0};
    const double sp2_torsions[] = {180.0, 0.0, 90.0};
    std::size_t slot = 0;
    for (std::size_t c = 0; c < children[u].size(); ++c) {
      const int v = children[u][c];
      const double len = bond_length(graph, u, v);
      Eigen::Vector3d p;
      if (parent[u] < 0) {
        // Root: first child on +x, the rest around it.
        if (c == 0) {
          p = Eigen::Vector3d(len, 0.0, 0.0);
        } else {
          const int first = children[u][0];
          const double t = sp2 ? (c == 1 ? 180.0 : 0.0) : 120.0 * static_cast<double>(c);
          p = place(virtual_a, pos(first), pos(u), len, angle, t);
        }
      } else {
        const int g = parent[u];
        // Dihedral reference: the grandparent, or a placed sibling of u
        // when u hangs off the root.
        Eigen::Vector3d ref = virtual_b;
        if (parent[g] >= 0) {
          ref = pos(parent[g]);
        } else {
          for (int s : children[g])
            if (s != u) {
              ref = pos(s);
              break;
            }
        }
        const double t = sp2 ? sp2_torsions[std::min<std::size_t>(slot, 2)]
                             : sp3_torsions[std::min<std::size_t>(slot, 3)];
        ++slot;
        p = place(ref, pos(g), pos(u), len, angle, t);
      }
      x.row(v) = p.transpose();
    }
  }
  return x;
}

void SyntheticMoleculeSpec::validate() const {
  if (min_chain < 3 || max_chain < min_chain) throw InvalidArgument("chain length range must satisfy 3 <= min <= max");
  if (!(branch_probability >= 0.0 && branch_probability <= 1.0))
    throw InvalidArgument("branch probability must be in [0, 1]");
  if (palette.empty()) throw InvalidArgument("element palette is empty");
  bool has_chain_element = false;
  for (int z : palette) {
    if (!find_element(z)) throw InvalidArgument("unknown element " + std::to_string(z) + " in palette");
    if (z == kHydrogen) throw InvalidArgument("hydrogen cannot be a palette element");
    if (valence(z) >= 2) has_chain_element = true;
  }
  if (!has_chain_element) throw InvalidArgument("palette needs an element of valence >= 2");
  if (max_rotatable < 1) throw InvalidArgument("max_rotatable must be at least 1");
  for (double v : {torsion.v1, torsion.v2, torsion.v3, coefficient_spread, clash.k, clash.d0,
                   mid_perturbation, low_perturbation})
    if (!std::isfinite(v)) throw InvalidArgument("potential coefficients must be finite");
  if (coefficient_spread < 0.0 || coefficient_spread >= 1.0)
    throw InvalidArgument("coefficient spread must be in [0, 1)");
  if (mid_perturbation < 0.0 || low_perturbation < 0.0)
    throw InvalidArgument("tier perturbations must be non-negative");
  if (max_retries < 1) throw InvalidArgument("max_retries must be positive");
}

namespace {

struct Skeleton {
  MolecularGraph graph;
  std::vector<int> substituent;  // heavy substituent atoms, b first
};

std::optional<Skeleton> grow_skeleton(const SyntheticMoleculeSpec& spec, Rng& rng) {
  Skeleton s;
  MolecularGraph& g = s.graph;
  const int a = g.add_atom({kCarbon, 0, 0});
  const int b = g.add_atom({kCarbon, 0, 0});
  const int o_double = g.add_atom({kOxygen, 0, 0});
  const int o_h = g.add_atom({kOxygen, 0, 0});
  g.add_bond(a, b);
  g.add_bond(a, o_double, 2);
  g.add_bond(a, o_h);
  s.substituent.push_back(b);

  std::uniform_int_distribution<int> len(spec.min_chain, spec.max_chain);
  std::uniform_int_distribution<std::size_t> pick(0, spec.palette.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto free_valence = [&](int i) {
    int used = 0;
    for (int n : g.neighbors(i)) used += g.bond_order(i, n);
    return valence(g.atom(i).atomic_number) - used;
  };
  const int target = len(rng);
  int last = b;
  while (static_cast<int>(s.substituent.size()) < target) {
    int parent = last;
    if (u(rng) < spec.branch_probability || free_valence(parent) < 1) {
      std::vector<int> open;
      for (int i : s.substituent)
        if (free_valence(i) >= 1) open.push_back(i);
      if (open.empty()) return std::nullopt;
      std::uniform_int_distribution<std::size_t> o(0, open.size() - 1);
      parent = open[o(rng)];
    }
    const int z = spec.palette[pick(rng)];
    const int v = g.add_atom({z, 0, 0});
    g.add_bond(parent, v);
    s.substituent.push_back(v);
    if (valence(z) >= 2) last = v;
  }
  // Hydrogens; the acid hydrogen is the one featurized explicitly.
  const int heavy_count = g.atom_count();
  for (int i = 0; i < heavy_count; ++i) {
    const int free = free_valence(i);
    for (int h = 0; h < free; ++h) {
      const int hid = g.add_atom({kHydrogen, 0, i == o_h ? kAtomFlagExplicitH : 0});
      g.add_bond(i, hid);
    }
  }
  g.set_descriptor_bond({a, b});
  g.validate();
  return s;
}

TorsionPotential scaled(const TorsionPotential& p, double f1, double f2, double f3) {
  return {p.v1 * f1, p.v2 * f2, p.v3 * f3};
}

ConformerEnsemble quantize_ensemble(ConformerEnsemble e) {
  for (auto& c : e.conformers) {
    c.coords = quantized(c.coords);
    if (c.energy) c.energy = quantize6(*c.energy);
  }
  return e;
}

// Renumbers conformers 0..n-1 in their current order.
ConformerEnsemble renumbered(ConformerEnsemble e) {
  for (std::size_t i = 0; i < e.conformers.size(); ++i) e.conformers[i].id = static_cast<int>(i);
  return e;
}

}  // namespace

DatasetRecord generate_molecule(const SyntheticMoleculeSpec& spec, std::int64_t id) {
  spec.validate();
  for (int attempt = 0; attempt < spec.max_retries; ++attempt) {
    Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(attempt)}));
    auto skeleton = grow_skeleton(spec, rng);
    if (!skeleton) continue;
    const MolecularGraph& g = skeleton->graph;
    auto sub = side_of_bond(g, g.descriptor_bond().a, g.descriptor_bond().b);
    std::sort(sub.begin(), sub.end());
    auto in_sub = [&](int i) { return std::binary_search(sub.begin(), sub.end(), i); };

    std::vector<std::pair<int, int>> substituent_bonds, other_bonds;
    for (auto bond : rotatable_bonds(g))
      (in_sub(bond.first) && in_sub(bond.second) ? substituent_bonds : other_bonds).push_back(bond);
    if (substituent_bonds.empty()) continue;
    std::shuffle(substituent_bonds.begin(), substituent_bonds.end(), rng);

    std::uniform_real_distribution<double> factor(1.0 - spec.coefficient_spread, 1.0 + spec.coefficient_spread);
    std::vector<TorsionTerm> varied, frozen;
    for (std::size_t i = 0; i < substituent_bonds.size(); ++i) {
      TorsionTerm t{substituent_bonds[i].first, substituent_bonds[i].second,
                    scaled(spec.torsion, factor(rng), factor(rng), factor(rng))};
      (static_cast<int>(i) < spec.max_rotatable ? varied : frozen).push_back(t);
    }
    for (auto [j, k] : other_bonds)
      frozen.push_back({j, k, scaled(spec.torsion, factor(rng), factor(rng), factor(rng))});

    const Coords base = build_tree_geometry(g);
    auto exact_all = enumerate_torsional_minima(g, base, varied, frozen, spec.clash);
    auto exact = quantize_ensemble(renumbered(iterative_butina(energy_filter(exact_all)).centroids));

    DatasetRecord rec;
    rec.id = id;
    rec.ensemble_exact = exact;
    rec.labels = aggregate_labels(exact).values;

    // Cheap tiers: perturbed potentials move minima and reorder energies,
    // then the tier corruption adds local noise.
    for (Quality q : {Quality::Mid, Quality::Low}) {
      const double eta = q == Quality::Mid ? spec.mid_perturbation : spec.low_perturbation;
      Rng trng(derive_seed(spec.seed, {static_cast<std::uint64_t>(id), 0x7469657200ULL + static_cast<std::uint64_t>(q)}));
      std::normal_distribution<double> noise(0.0, eta);
      auto perturb = [&](std::vector<TorsionTerm> terms) {
        for (auto& t : terms)
          t.potential = scaled(t.potential, std::max(0.0, 1.0 + noise(trng)),
                               std::max(0.0, 1.0 + noise(trng)), std::max(0.0, 1.0 + noise(trng)));
        return terms;
      };
      const auto pv = perturb(varied);
      const auto pf = perturb(frozen);
      ClashTerm clash = spec.clash;
      clash.k *= std::max(0.0, 1.0 + noise(trng));
      auto cheap = iterative_butina(energy_filter(enumerate_torsional_minima(g, base, pv, pf, clash))).centroids;
      cheap = renumbered(std::move(cheap));
      const auto cspec = CorruptionSpec::for_tier(
          q, derive_seed(spec.seed, {static_cast<std::uint64_t>(id), 0x636f7272ULL}), spec.mid_noise, spec.low_noise);
      auto corrupted = quantize_ensemble(corrupt(cheap, cspec));
      (q == Quality::Mid ? rec.ensemble_mid : rec.ensemble_low) = std::move(corrupted);
    }
    return rec;
  }
  throw InvalidArgument("could not generate molecule " + std::to_string(id) + " within " +
                        std::to_string(spec.max_retries) + " attempts");
}

std::vector<DatasetRecord> generate_dataset(const SyntheticMoleculeSpec& spec, int n_molecules) {
  if (n_molecules < 1) throw InvalidArgument("n_molecules must be at least 1");
  std::vector<DatasetRecord> out;
  out.reserve(static_cast<std::size_t>(n_molecules));
  for (int i = 0; i < n_molecules; ++i) out.push_back(generate_molecule(spec, i));
  return out;
}

}  // namespace confq
