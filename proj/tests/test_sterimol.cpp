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


#include <doctest.h>

#include <algorithm>
#include <functional>

#include "confq/error.hpp"
#include "confq/sterimol.hpp"
#include "support.hpp"

using namespace confq;

namespace {

Conformer conformer_of(const Coords& c) {
  Conformer conf;
  conf.coords = c;
  return conf;
}

}  // namespace

TEST_CASE("substituent_atoms: chains, terminal atoms and branches") {
  MolecularGraph chain;
  for (int i = 0; i < 3; ++i) chain.add_atom({kCarbon, 0, 0});
  chain.add_bond(0, 1);
  chain.add_bond(1, 2);
  CHECK(substituent_atoms(chain, 0, 1) == std::vector<int>{1, 2});
  CHECK(substituent_atoms(chain, 1, 2) == std::vector<int>{2});

  // b = 1 with three children, each carrying two grandchildren; a also has
  // its own side branch that must not leak in.
  MolecularGraph g;
  g.add_atom({kCarbon, 0, 0});
  g.add_atom({kCarbon, 0, 0});
  g.add_bond(0, 1);
  const int side = g.add_atom({kOxygen, 0, 0});
  g.add_bond(0, side);
  for (int c = 0; c < 3; ++c) {
    const int child = g.add_atom({kCarbon, 0, 0});
    g.add_bond(1, child);
    for (int gc = 0; gc < 2; ++gc) g.add_bond(child, g.add_atom({kHydrogen, 0, 0}));
  }
  // Independent recursive DFS oracle.
  std::vector<int> oracle;
  std::function<void(int, int)> dfs = [&](int u, int parent) {
    oracle.push_back(u);
    for (int v : g.neighbors(u))
      if (v != parent) dfs(v, u);
  };
  dfs(1, 0);
  std::sort(oracle.begin(), oracle.end());
  CHECK(substituent_atoms(g, 0, 1) == oracle);
  CHECK(oracle.size() == 10);

  MolecularGraph ring;
  for (int i = 0; i < 3; ++i) ring.add_atom({kCarbon, 0, 0});
  ring.add_bond(0, 1);
  ring.add_bond(1, 2);
  ring.add_bond(2, 0);
  CHECK_THROWS_AS(substituent_atoms(ring, 0, 1), TopologyError);
  CHECK_THROWS_AS(substituent_atoms(chain, 0, 2), TopologyError);
}

TEST_CASE("sterimol_LB5: hand-checked single atom and perpendicular hydrogen") {
  MolecularGraph g;
  g.add_atom({kCarbon, 0, 0});
  g.add_atom({kCarbon, 0, 0});
  g.add_bond(0, 1);
  g.set_descriptor_bond({0, 1});
  Coords x(2, 3);
  x << 0, 0, 0, 1.5, 0, 0;
  auto r = sterimol_LB5(g, conformer_of(x));
  CHECK(r.L == doctest::Approx(3.20).epsilon(1e-12));
  CHECK(r.B5 == doctest::Approx(1.70).epsilon(1e-12));
  CHECK(r.substituent_atom_ids == std::vector<int>{1});

  g.add_bond(1, g.add_atom({kHydrogen, 0, 0}));
  Coords y(3, 3);
  y << 0, 0, 0, 1.5, 0, 0, 1.5, 2.0, 0;
  r = sterimol_LB5(g, conformer_of(y));
  CHECK(r.L == doctest::Approx(3.20).epsilon(1e-12));
  CHECK(r.B5 == doctest::Approx(3.20).epsilon(1e-12));

  Coords collapsed = y;
  collapsed.row(1) = collapsed.row(0);
  CHECK_THROWS_AS(sterimol_LB5(g, conformer_of(collapsed)), GeometryError);
  MolecularGraph no_bond = g;
  no_bond.set_descriptor_bond({});
  CHECK_THROWS_AS(sterimol_LB5(no_bond, conformer_of(y)), InvalidArgument);
}

TEST_CASE("sterimol_LB5: agrees with the sphere-sampling oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    auto s = testing::random_substituent(rng, 8);
    const auto r = sterimol_LB5(s.graph, conformer_of(s.coords));
    const auto o = testing::sphere_sampling_oracle(s.graph, s.coords, 0, 1, s.substituent, 100000);
    CHECK(std::abs(r.L - o.L) < 0.02);
    CHECK(std::abs(r.B5 - o.B5) < 0.02);
    // Sampling can only under-estimate the analytic extent.
    CHECK(o.L <= r.L + 1e-12);
    CHECK(o.B5 <= r.B5 + 1e-12);
  }
}

TEST_CASE("sterimol_LB5 properties") {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = testing::random_substituent(rng, 6);
    const Conformer c = conformer_of(s.coords);
    const auto base = sterimol_LB5(s.graph, c);
    CHECK(base.L > 0.0);
    CHECK(base.B5 > 0.0);
    CHECK(base.L >= vdw_radius(kCarbon) + s.coords.row(1).norm() - 1e-9);

    const Coords moved = testing::rigid_motion(s.coords, testing::random_rotation(rng),
                                               Eigen::Vector3d(1.0, -2.0, 3.0));
    const auto m = sterimol_LB5(s.graph, conformer_of(moved));
    CHECK(std::abs(m.L - base.L) < 1e-9);
    CHECK(std::abs(m.B5 - base.B5) < 1e-9);

    // Monotone in the substituent set.
    std::vector<int> partial(s.substituent.begin(), s.substituent.end() - 1);
    const auto fewer = sterimol_LB5(s.graph, s.coords, 0, 1, partial);
    CHECK(fewer.L <= base.L);
    CHECK(fewer.B5 <= base.B5);

    // Uniform scaling about a, radii fixed.
    const auto scaled = sterimol_LB5(s.graph, conformer_of(s.coords * 1.3));
    CHECK(scaled.L >= base.L - 1e-12);
    CHECK(scaled.B5 >= base.B5 - 1e-12);
  }
}
