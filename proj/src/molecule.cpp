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


#include "confq/molecule.hpp"

#include <algorithm>
#include <queue>

#include "confq/error.hpp"

namespace confq {

std::string_view to_string(Quality q) noexcept {
  switch (q) {
    case Quality::Exact: return "exact";
    case Quality::Mid: return "mid";
    case Quality::Low: return "low";
  }
  return "?";
}

std::string_view to_string(Target t) noexcept {
  switch (t) {
    case Target::LMin: return "L_min";
    case Target::LMax: return "L_max";
    case Target::B5Min: return "B5_min";
    case Target::B5Max: return "B5_max";
  }
  return "?";
}

Quality parse_quality(std::string_view text) {
  for (Quality q : kAllQualities)
    if (to_string(q) == text) return q;
  throw InvalidArgument("unknown quality tier '" + std::string(text) + "'");
}

Target parse_target(std::string_view text) {
  for (Target t : kAllTargets)
    if (to_string(t) == text) return t;
  throw InvalidArgument("unknown target '" + std::string(text) + "'");
}

int MolecularGraph::add_atom(Atom atom) {
  atoms_.push_back(atom);
  adjacency_.emplace_back();
  return atom_count() - 1;
}

void MolecularGraph::add_bond(int i, int j, int order) {
  if (i < 0 || j < 0 || i >= atom_count() || j >= atom_count())
    throw TopologyError("bond (" + std::to_string(i) + "," +
                        std::to_string(j) + ") references a missing atom");
  if (i == j)
    throw TopologyError("self-bond on atom " + std::to_string(i));
  if (has_bond(i, j))
    throw TopologyError("duplicate bond (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
  bonds_.push_back({i, j, order});
  adjacency_[i].push_back(j);
  adjacency_[j].push_back(i);
}

bool MolecularGraph::has_bond(int i, int j) const {
  const auto& n = adjacency_.at(i);
  return std::find(n.begin(), n.end(), j) != n.end();
}

int MolecularGraph::bond_order(int i, int j) const {
  for (const Bond& b : bonds_)
    if ((b.i == i && b.j == j) || (b.i == j && b.j == i)) return b.order;
  return 0;
}

int MolecularGraph::heavy_degree(int i) const {
  int n = 0;
  for (int j : neighbors(i)) n += is_heavy(j) ? 1 : 0;
  return n;
}

void MolecularGraph::set_descriptor_bond(BondRef ref) {
  if (ref.is_set() && (ref.a >= atom_count() || ref.b >= atom_count() ||
                       !has_bond(ref.a, ref.b)))
    throw TopologyError("descriptor bond (" + std::to_string(ref.a) + "," +
                        std::to_string(ref.b) + ") is not a bond");
  descriptor_ = ref;
}

std::vector<int> MolecularGraph::heavy_atoms() const {
  std::vector<int> out;
  for (int i = 0; i < atom_count(); ++i)
    if (is_heavy(i)) out.push_back(i);
  return out;
}

void MolecularGraph::validate() const {
  if (atoms_.empty()) throw TopologyError("graph has no atoms");
  std::vector<char> seen(atoms_.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int visited = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adjacency_[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++visited;
        q.push(v);
      }
  }
  if (visited != atom_count()) throw TopologyError("graph is disconnected");
  if (descriptor_.is_set() && !has_bond(descriptor_.a, descriptor_.b))
    throw TopologyError("descriptor bond is not a bond");
}

void ConformerEnsemble::validate() const {
  if (conformers.empty()) throw SchemaError("ensemble has no conformers");
  const bool first_has_energy = conformers.front().energy.has_value();
  for (const Conformer& c : conformers) {
    if (c.coords.rows() != graph.atom_count())
      throw SchemaError("conformer " + std::to_string(c.id) + " has " +
                        std::to_string(c.coords.rows()) + " atoms, graph has " +
                        std::to_string(graph.atom_count()));
    if (!c.coords.allFinite())
      throw SchemaError("conformer " + std::to_string(c.id) +
                        " has non-finite coordinates");
    if (c.energy.has_value() != first_has_energy)
      throw SchemaError("energies present on only part of the ensemble");
  }
}

bool ConformerEnsemble::has_energies() const {
  return !conformers.empty() &&
         std::all_of(conformers.begin(), conformers.end(),
                     [](const Conformer& c) { return c.energy.has_value(); });
}

const Conformer& ConformerEnsemble::by_id(int id) const {
  for (const Conformer& c : conformers)
    if (c.id == id) return c;
  throw InvalidArgument("no conformer with id " + std::to_string(id));
}

const ConformerEnsemble& DatasetRecord::ensemble(Quality q) const {
  switch (q) {
    case Quality::Exact: return ensemble_exact;
    case Quality::Mid: return ensemble_mid;
    case Quality::Low: return ensemble_low;
  }
  return ensemble_exact;
}

}  // namespace confq
