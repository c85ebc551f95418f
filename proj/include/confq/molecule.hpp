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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace confq {

/// N x 3 Cartesian coordinates in Angstrom, one row per atom.
using Coords = Eigen::MatrixX3d;

/// Geometry fidelity tier. Exact stands for the high-level reference,
/// Mid and Low for progressively cheaper optimizations.
enum class Quality : std::uint8_t { Exact, Mid, Low };

/// Ensemble-level regression targets.
enum class Target : std::uint8_t { LMin, LMax, B5Min, B5Max };

inline constexpr std::array<Target, 4> kAllTargets = {
    Target::LMin, Target::LMax, Target::B5Min, Target::B5Max};
inline constexpr std::array<Quality, 3> kAllQualities = {
    Quality::Exact, Quality::Mid, Quality::Low};

std::string_view to_string(Quality q) noexcept;
std::string_view to_string(Target t) noexcept;
Quality parse_quality(std::string_view text);
Target parse_target(std::string_view text);

/// Atom is kept by the featurizer even though it is a hydrogen.
inline constexpr std::uint32_t kAtomFlagExplicitH = 1u;

struct Atom {
  int atomic_number = 0;
  int formal_charge = 0;
  std::uint32_t flags = 0;

  bool operator==(const Atom&) const = default;
};

struct Bond {
  int i = 0;
  int j = 0;
  int order = 1;

  bool operator==(const Bond&) const = default;
};

/// Base atom `a` and first substituent atom `b` of the descriptor bond.
struct BondRef {
  int a = -1;
  int b = -1;

  bool is_set() const noexcept { return a >= 0 && b >= 0; }
  bool operator==(const BondRef&) const = default;
};

class MolecularGraph {
 public:
  int add_atom(Atom atom);
  /// Throws TopologyError on self-bonds, duplicates or out-of-range indices.
  void add_bond(int i, int j, int order = 1);
  void set_formal_charge(int i, int charge) { atoms_.at(i).formal_charge = charge; }

  int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const Atom& atom(int i) const { return atoms_.at(i); }
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_.at(i); }
  bool has_bond(int i, int j) const;
  int bond_order(int i, int j) const;  // 0 when not bonded
  bool is_heavy(int i) const { return atom(i).atomic_number != 1; }
  int heavy_degree(int i) const;

  const BondRef& descriptor_bond() const noexcept { return descriptor_; }
  void set_descriptor_bond(BondRef ref);

  /// Indices of atoms whose atomic number is not 1, ascending.
  std::vector<int> heavy_atoms() const;

  /// Throws TopologyError unless the graph is connected and the descriptor
  /// bond (when set) is one of its bonds.
  void validate() const;

  bool operator==(const MolecularGraph& o) const {
    return atoms_ == o.atoms_ && bonds_ == o.bonds_ &&
           descriptor_ == o.descriptor_;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adjacency_;
  BondRef descriptor_;
};

struct Conformer {
  Coords coords;
  std::optional<double> energy;  // kcal/mol
  Quality quality = Quality::Exact;
  int id = 0;
};

struct ConformerEnsemble {
  MolecularGraph graph;
  std::vector<Conformer> conformers;

  /// Throws SchemaError when a conformer disagrees with the graph's atom
  /// count, holds non-finite coordinates, or energies are only partially
  /// present. An empty ensemble is also rejected.
  void validate() const;
  bool has_energies() const;
  const Conformer& by_id(int id) const;
};

/// Per-target values indexed by `Target`.
using TargetValues = std::array<double, 4>;

inline double& at(TargetValues& v, Target t) {
  return v[static_cast<std::size_t>(t)];
}
inline double at(const TargetValues& v, Target t) {
  return v[static_cast<std::size_t>(t)];
}

struct DatasetRecord {
  std::int64_t id = 0;
  ConformerEnsemble ensemble_exact;
  ConformerEnsemble ensemble_mid;
  ConformerEnsemble ensemble_low;
  TargetValues labels{};

  const ConformerEnsemble& ensemble(Quality q) const;
};

}  // namespace confq
