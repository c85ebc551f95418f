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


#include "confq/geom.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <queue>

#include "confq/error.hpp"

namespace confq {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void check_same_shape(const Coords& p, const Coords& q) {
  if (p.rows() != q.rows())
    throw InvalidArgument("point sets differ in size: " + std::to_string(p.rows()) +
                          " vs " + std::to_string(q.rows()));
}

}  // namespace

Coords RigidTransform::apply(const Coords& points) const {
  Coords out = points * rotation.transpose();
  out.rowwise() += translation.transpose();
  return out;
}

RigidTransform kabsch(const Coords& p, const Coords& q) {
  check_same_shape(p, q);
  if (p.rows() < 3) throw GeometryError("superposition needs at least 3 points");
  const Eigen::RowVector3d pc = p.colwise().mean();
  const Eigen::RowVector3d qc = q.colwise().mean();
  const Eigen::Matrix3d h = (p.rowwise() - pc).transpose() * (q.rowwise() - qc);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d s = svd.singularValues();
  if (!(s(0) > 0.0) || s(1) <= 1e-12 * s(0))
    throw GeometryError("degenerate geometry: covariance rank below 2");
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidTransform t;
  t.rotation = v * d * u.transpose();
  t.translation = qc.transpose() - t.rotation * pc.transpose();
  return t;
}

double rmsd(const Coords& p, const Coords& q) {
  check_same_shape(p, q);
  if (p.rows() == 0) return 0.0;
  return std::sqrt((p - q).rowwise().squaredNorm().mean());
}

double rmsd_aligned(const Coords& p, const Coords& q) {
  return rmsd(kabsch(p, q).apply(p), q);
}

Coords select_rows(const Coords& coords, const std::vector<int>& rows) {
  Coords out(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = coords.row(rows[r]);
  return out;
}

double heavy_atom_rmsd(const MolecularGraph& graph, const Conformer& x,
                       const Conformer& y) {
  const auto heavy = graph.heavy_atoms();
  return rmsd_aligned(select_rows(x.coords, heavy), select_rows(y.coords, heavy));
}

double get_torsion(const Coords& c, int i, int j, int k, int l) {
  const Eigen::Vector3d b1 = (c.row(j) - c.row(i)).transpose();
  const Eigen::Vector3d b2 = (c.row(k) - c.row(j)).transpose();
  const Eigen::Vector3d b3 = (c.row(l) - c.row(k)).transpose();
  const Eigen::Vector3d n1 = b1.cross(b2);
  const Eigen::Vector3d n2 = b2.cross(b3);
  const double y = b2.norm() * b1.dot(n2);
  const double x = n1.dot(n2);
  double deg = std::atan2(y, x) / kDeg;
  if (deg <= -180.0) deg += 360.0;
  return deg;
}

std::vector<int> side_of_bond(const MolecularGraph& graph, int from, int to) {
  if (!graph.has_bond(from, to))
    throw TopologyError("atoms " + std::to_string(from) + " and " + std::to_string(to) +
                        " are not bonded");
  std::vector<char> seen(graph.atom_count(), 0);
  std::vector<int> out{to};
  std::queue<int> q;
  q.push(to);
  seen[to] = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : graph.neighbors(u)) {
      if (u == to && v == from) continue;
      if (v == from)
        throw TopologyError("bond (" + std::to_string(from) + "," + std::to_string(to) +
                            ") is part of a ring");
      if (!seen[v]) {
        seen[v] = 1;
        out.push_back(v);
        q.push(v);
      }
    }
  }
  return out;
}

std::pair<int, int> torsion_reference_atoms(const MolecularGraph& graph, int j, int k) {
  auto pick = [&](int center, int exclude) {
    int best = -1;
    for (int n : graph.neighbors(center)) {
      if (n == exclude) continue;
      const bool better = best < 0 || (graph.is_heavy(n) && !graph.is_heavy(best)) ||
                          (graph.is_heavy(n) == graph.is_heavy(best) && n < best);
      if (better) best = n;
    }
    if (best < 0)
      throw TopologyError("torsion about (" + std::to_string(j) + "," + std::to_string(k) +
                          ") is undefined: atom " + std::to_string(center) +
                          " has no other neighbor");
    return best;
  };
  return {pick(j, k), pick(k, j)};
}

void rotate_about_bond(Coords& coords, const std::vector<int>& moving, int j, int k,
                       double delta_deg) {
  const Eigen::Vector3d origin = coords.row(j).transpose();
  Eigen::Vector3d axis = (coords.row(k) - coords.row(j)).transpose();
  const double len = axis.norm();
  if (!(len > 0.0)) throw GeometryError("zero-length rotation axis");
  axis /= len;
  const Eigen::Matrix3d r = Eigen::AngleAxisd(delta_deg * kDeg, axis).toRotationMatrix();
  for (int a : moving) {
    const Eigen::Vector3d p = coords.row(a).transpose() - origin;
    coords.row(a) = (r * p + origin).transpose();
  }
}

Coords set_torsion(const Coords& coords, const MolecularGraph& graph, int j, int k,
                   double angle_deg) {
  const auto moving = side_of_bond(graph, j, k);
  const auto [i, l] = torsion_reference_atoms(graph, j, k);
  const double current = get_torsion(coords, i, j, k, l);
  Coords out = coords;
  rotate_about_bond(out, moving, j, k, angle_deg - current);
  return out;
}

}  // namespace confq
