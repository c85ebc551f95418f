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

#include <cmath>

#include "confq/error.hpp"
#include "confq/geom.hpp"
#include "support.hpp"

using namespace confq;
using testing::random_cloud;
using testing::random_rotation;
using testing::rigid_motion;

TEST_CASE("kabsch: identity and recovery of a known motion") {
  Rng rng(1);
  const Coords p = random_cloud(rng, 7);
  RigidTransform id = kabsch(p, p);
  CHECK((id.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(id.translation.norm() < 1e-12);

  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3d r = random_rotation(rng);
    const Eigen::Vector3d t(0.3 * trial, -1.0, 2.5);
    const Coords q = rigid_motion(p, r, t);
    const RigidTransform found = kabsch(p, q);
    CHECK((found.rotation - r).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((found.translation - t).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(found.rotation.determinant() - 1.0) < 1e-9);
    CHECK((found.rotation.transpose() * found.rotation - Eigen::Matrix3d::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("kabsch: reflection is corrected to a proper rotation") {
  Rng rng(2);
  const Coords p = random_cloud(rng, 6);
  Coords mirrored = p;
  mirrored.col(2) *= -1.0;
  const RigidTransform t = kabsch(p, mirrored);
  CHECK(std::abs(t.rotation.determinant() - 1.0) < 1e-9);
}

TEST_CASE("kabsch: degenerate inputs") {
  Coords two(2, 3);
  two << 0, 0, 0, 1, 0, 0;
  CHECK_THROWS_AS(kabsch(two, two), GeometryError);
  Coords line(4, 3);
  line << 0, 0, 0, 1, 0, 0, 2, 0, 0, 3, 0, 0;
  CHECK_THROWS_AS(kabsch(line, line), GeometryError);
  Coords three(3, 3);
  three << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  CHECK_THROWS_AS(rmsd_aligned(three, line), InvalidArgument);
}

TEST_CASE("kabsch beats a random-rotation search") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Coords p = random_cloud(rng, 10);
    const Coords q = random_cloud(rng, 10);
    const double best = rmsd_aligned(p, q);
    const Coords pc = p.rowwise() - p.colwise().mean();
    const Coords qc = q.rowwise() - q.colwise().mean();
    double oracle = 1e300;
    for (int k = 0; k < 10000; ++k)
      oracle = std::min(oracle, rmsd(pc * random_rotation(rng).transpose(), qc));
    CHECK(best <= oracle + 1e-12);
  }
}

TEST_CASE("rmsd_aligned: fixed 4-point clouds against a brute-force rotation search") {
  Coords p(4, 3), q(4, 3);
  p << 0, 0, 0, 1.5, 0, 0, 0, 1.2, 0, 0.3, 0.4, 1.1;
  q << 0.1, -0.2, 0.05, 1.2, 0.9, -0.1, -0.8, 0.7, 0.3, 0.2, 0.1, 1.4;
  // Frozen from an independent quaternion search (2e5 samples + refinement).
  CHECK(rmsd_aligned(p, q) == doctest::Approx(0.12374762340100291).epsilon(1e-7));
  CHECK(std::abs(rmsd_aligned(p, q) - rmsd_aligned(q, p)) < 1e-9);
  CHECK(rmsd_aligned(p, p) < 1e-12);
}

TEST_CASE("rmsd_aligned properties: rigid invariance and triangle bound") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Coords p = random_cloud(rng, 8);
    const Coords q = random_cloud(rng, 8);
    const Coords r = random_cloud(rng, 8);
    const double base = rmsd_aligned(p, q);
    const Coords moved = rigid_motion(p, random_rotation(rng), Eigen::Vector3d::Random() * 5);
    CHECK(std::abs(rmsd_aligned(moved, q) - base) < 1e-9);
    CHECK(rmsd_aligned(moved, p) < 1e-9);
    CHECK(rmsd_aligned(p, r) <= rmsd_aligned(p, q) + rmsd_aligned(q, r) + 1e-9);
  }
}

namespace {

// 0-1-2-3 chain with hydrogens on both ends of the 1-2 bond.
struct Butane {
  MolecularGraph graph;
  Coords coords;
};

Butane butane(double dihedral_deg) {
  Butane b;
  for (int i = 0; i < 4; ++i) b.graph.add_atom({kCarbon, 0, 0});
  b.graph.add_bond(0, 1);
  b.graph.add_bond(1, 2);
  b.graph.add_bond(2, 3);
  const int h1 = b.graph.add_atom({kHydrogen, 0, 0});
  const int h2 = b.graph.add_atom({kHydrogen, 0, 0});
  b.graph.add_bond(1, h1);
  b.graph.add_bond(2, h2);
  const double t = dihedral_deg * M_PI / 180.0;
  b.coords.resize(6, 3);
  b.coords << 1.0, 1.0, 0.0,            //
      0.0, 0.0, 0.0,                    //
      0.0, 0.0, 1.5,                    //
      std::cos(t), std::sin(t), 1.5 + 1.0,  //
      -1.0, 0.2, -0.3,                  //
      0.4, -0.9, 1.9;
  b.coords.row(3) = Eigen::RowVector3d(std::cos(t + M_PI / 4), std::sin(t + M_PI / 4), 2.5);
  return b;
}

}  // namespace

TEST_CASE("get_torsion: anti and eclipsed chains") {
  Coords anti(4, 3), ecl(4, 3);
  anti << 1, 0, 0, 0, 0, 0, 0, 0, 1.5, -1, 0, 1.5;
  ecl << 1, 0, 0, 0, 0, 0, 0, 0, 1.5, 1, 0, 1.5;
  CHECK(get_torsion(anti, 0, 1, 2, 3) == doctest::Approx(180.0));
  CHECK(get_torsion(ecl, 0, 1, 2, 3) == doctest::Approx(0.0).epsilon(1e-12));
  Coords plus(4, 3);
  plus << 1, 0, 0, 0, 0, 0, 0, 0, 1.5, 0, 1, 1.5;
  // Right-handed about 1->2: x rotates toward y.
  CHECK(get_torsion(plus, 0, 1, 2, 3) == doctest::Approx(90.0));
}

TEST_CASE("set_torsion: inverse of get_torsion and geometry preservation") {
  Butane b = butane(37.0);
  const auto [i, l] = torsion_reference_atoms(b.graph, 1, 2);
  CHECK(i == 0);
  CHECK(l == 3);
  for (double target : {-179.0, 0.0, 60.0, 180.0, 123.4}) {
    const Coords out = set_torsion(b.coords, b.graph, 1, 2, target);
    double got = get_torsion(out, i, 1, 2, l);
    if (target == 180.0 && got < 0) got += 360.0;
    CHECK(std::abs(got - target) < 1e-6);
    // Distances inside each rigid half are unchanged.
    for (const std::vector<int>& side : {std::vector<int>{0, 1, 4}, std::vector<int>{2, 3, 5}})
      for (int x : side)
        for (int y : side)
          CHECK(std::abs((out.row(x) - out.row(y)).norm() -
                         (b.coords.row(x) - b.coords.row(y)).norm()) < 1e-9);
    CHECK(std::abs((out.row(1) - out.row(2)).norm() - 1.5) < 1e-9);
  }
  Coords full = b.coords;
  rotate_about_bond(full, side_of_bond(b.graph, 1, 2), 1, 2, 360.0);
  CHECK((full - b.coords).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("set_torsion: ring bonds are not rotatable") {
  MolecularGraph ring;
  for (int i = 0; i < 4; ++i) ring.add_atom({kCarbon, 0, 0});
  for (int i = 0; i < 4; ++i) ring.add_bond(i, (i + 1) % 4);
  Coords c(4, 3);
  c << 0, 0, 0, 1.5, 0, 0, 1.5, 1.5, 0, 0, 1.5, 0;
  CHECK_THROWS_AS(set_torsion(c, ring, 1, 2, 60.0), TopologyError);
}
