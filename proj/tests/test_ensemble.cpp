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

#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include "confq/ensemble.hpp"
#include "confq/error.hpp"
#include "confq/geom.hpp"
#include "support.hpp"

using namespace confq;

namespace {

ConformerEnsemble with_energies(std::vector<double> energies) {
  Rng rng(5);
  auto e = testing::random_ensemble(rng, 5, static_cast<int>(energies.size()));
  for (std::size_t k = 0; k < energies.size(); ++k) e.conformers[k].energy = energies[k];
  return e;
}

std::vector<int> ids(const ConformerEnsemble& e) {
  std::vector<int> out;
  for (const auto& c : e.conformers) out.push_back(c.id);
  return out;
}

}  // namespace

TEST_CASE("energy_filter") {
  CHECK(ids(energy_filter(with_energies({0.0, 4.9, 5.1}))) == std::vector<int>{0, 1});
  CHECK(ids(energy_filter(with_energies({2.0}))) == std::vector<int>{0});
  CHECK(ids(energy_filter(with_energies({1.0, 0.0, 3.0}))) == std::vector<int>{0, 1, 2});
  CHECK(ids(energy_filter(with_energies({7.0, 2.0, 12.0, 2.5}))) == std::vector<int>{0, 1, 3});

  auto missing = with_energies({0.0, 1.0});
  missing.conformers[1].energy.reset();
  CHECK_THROWS_AS(energy_filter(missing), InvalidArgument);

  Rng rng(6);
  std::uniform_real_distribution<double> u(-3.0, 12.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> es(8);
    for (double& x : es) x = u(rng);
    const auto once = energy_filter(with_energies(es));
    const auto twice = energy_filter(once);
    CHECK(ids(once) == ids(twice));
    const double lo = *std::min_element(es.begin(), es.end());
    for (const auto& c : once.conformers) CHECK(*c.energy - lo <= 5.0);
    CHECK(std::count_if(es.begin(), es.end(), [&](double x) { return x == lo; }) >= 1);
  }
}

TEST_CASE("boltzmann_weights") {
  auto eq = boltzmann_weights(std::vector<double>{1.0, 1.0, 1.0, 1.0});
  for (double w : eq) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(boltzmann_weights(std::vector<double>{3.0}) == std::vector<double>{1.0});
  // Hand evaluation: kT = 0.0019872041 * 298.15 = 0.592484902415 kcal/mol.
  auto two = boltzmann_weights(std::vector<double>{0.0, 1.0});
  CHECK(std::abs(two[0] - 0.8439355044528392) < 1e-9);
  CHECK(std::abs(two[0] + two[1] - 1.0) < 1e-12);
  CHECK_THROWS_AS(boltzmann_weights(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(boltzmann_weights(std::vector<double>{0.0}, 0.0), InvalidArgument);
  CHECK(boltzmann_average(std::vector<double>{1.0, 3.0}, std::vector<double>{0.25, 0.75}) == 2.5);

  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> es(6), shifted(6);
    for (int i = 0; i < 6; ++i) {
      es[i] = u(rng);
      shifted[i] = es[i] - 17.25;
    }
    const auto w = boltzmann_weights(es);
    const auto ws = boltzmann_weights(shifted);
    CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-12);
    for (int i = 0; i < 6; ++i) {
      CHECK(std::abs(w[i] - ws[i]) < 1e-12);
      for (int j = 0; j < 6; ++j)
        if (es[i] < es[j]) CHECK(w[i] > w[j]);
    }
  }
}

TEST_CASE("aggregate_labels equals an exhaustive scan") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto e = testing::random_ensemble(rng, 7, trial == 0 ? 1 : 6);
    std::shuffle(e.conformers.begin(), e.conformers.end(), rng);
    const auto labels = aggregate_labels(e);
    TargetValues best{1e300, -1e300, 1e300, -1e300};
    std::array<int, 4> best_id{};
    for (const auto& c : e.conformers) {
      const auto r = sterimol_LB5(e.graph, c);
      const double v[4] = {r.L, r.L, r.B5, r.B5};
      for (int t = 0; t < 4; ++t) {
        const bool is_min = t % 2 == 0;
        const bool better = is_min ? v[t] < best[t] : v[t] > best[t];
        const bool tie_lower = v[t] == best[t] && c.id < best_id[t];
        if (better || tie_lower) {
          best[t] = v[t];
          best_id[t] = c.id;
        }
      }
    }
    for (Target t : kAllTargets) {
      CHECK(labels.value(t) == at(best, t));
      CHECK(labels.active_id(t) == best_id[static_cast<int>(t)]);
      const auto r = sterimol_LB5(e.graph, e.by_id(labels.active_id(t)));
      CHECK(labels.value(t) == (t == Target::LMin || t == Target::LMax ? r.L : r.B5));
    }
    CHECK(labels.value(Target::LMin) <= labels.value(Target::LMax));
    CHECK(labels.value(Target::B5Min) <= labels.value(Target::B5Max));
    if (e.conformers.size() == 1) CHECK(labels.value(Target::LMin) == labels.value(Target::LMax));
  }

  // Two conformers with hand-placed L values 3.1 and 3.4.
  MolecularGraph g;
  g.add_atom({kCarbon, 0, 0});
  g.add_atom({kCarbon, 0, 0});
  g.add_bond(0, 1);
  g.set_descriptor_bond({0, 1});
  ConformerEnsemble two{g, {}};
  for (double d : {1.4, 1.7}) {
    Conformer c;
    c.coords = Coords::Zero(2, 3);
    c.coords(1, 0) = d;
    c.id = static_cast<int>(two.conformers.size()) + 10;
    two.conformers.push_back(c);
  }
  const auto l = aggregate_labels(two);
  CHECK(l.value(Target::LMin) == doctest::Approx(3.1));
  CHECK(l.value(Target::LMax) == doctest::Approx(3.4));
  CHECK(l.active_id(Target::LMin) == 10);
  CHECK(l.active_id(Target::LMax) == 11);
  CHECK(l.active_id(Target::B5Min) == 10);  // tie on B5 -> lowest id
}

using testing::reference_butina;

TEST_CASE("butina_from_distances matches the exhaustive reference") {
  Rng rng(9);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int config = 0; config < 60; ++config) {
    const int n = 2 + config % 7;
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) pts.row(i) << u(rng), u(rng);
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d(i, j) = config % 3 == 0 ? std::round((pts.row(i) - pts.row(j)).norm())
                                  : (pts.row(i) - pts.row(j)).norm();
    const double threshold = 0.4 + 0.1 * (config % 10);
    std::vector<unsigned> nbr(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && d(i, j) <= threshold) nbr[i] |= 1u << j;
    std::vector<std::vector<int>> cur;
    std::vector<std::vector<std::vector<int>>> found;
    reference_butina(nbr, 0, cur, found);
    REQUIRE(found.size() == 1);
    const auto clusters = butina_from_distances(d, threshold);
    REQUIRE(clusters.size() == found[0].size());
    std::set<int> seen;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      CHECK(clusters[c].members == found[0][c]);
      CHECK(clusters[c].centroid == found[0][c][0]);
      for (int m : clusters[c].members) {
        CHECK(seen.insert(m).second);
        CHECK(d(clusters[c].centroid, m) <= threshold);
      }
    }
    CHECK(static_cast<int>(seen.size()) == n);
  }
}

namespace {

// Conformers of a 4-carbon chain whose last atom is displaced by `offsets`
// along z; RMSD between members grows with the offset gap.
ConformerEnsemble displaced_series(const std::vector<double>& offsets) {
  MolecularGraph g;
  for (int i = 0; i < 4; ++i) g.add_atom({kCarbon, 0, 0});
  for (int i = 0; i < 3; ++i) g.add_bond(i, i + 1);
  g.set_descriptor_bond({0, 1});
  ConformerEnsemble e{g, {}};
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    Conformer c;
    c.coords.resize(4, 3);
    c.coords << 0, 0, 0, 1.5, 0, 0, 2.0, 1.4, 0, 3.5, 1.4, offsets[k];
    c.id = static_cast<int>(k);
    e.conformers.push_back(c);
  }
  return e;
}

}  // namespace

TEST_CASE("butina_cluster on conformers") {
  auto far = displaced_series({0.0, 3.0, 6.0, 9.0});
  CHECK(butina_cluster(far, 0.2).size() == 4);
  auto same = displaced_series(std::vector<double>(6, 0.0));
  const auto one = butina_cluster(same, 0.2);
  REQUIRE(one.size() == 1);
  CHECK(one[0].centroid == 0);
  CHECK(one[0].members.size() == 6);
}

TEST_CASE("iterative_butina") {
  auto five = displaced_series({0, 1, 2, 3, 4});
  auto r5 = iterative_butina(five);
  CHECK(r5.passes == 1);
  CHECK(r5.centroids.conformers.size() <= 5);

  auto thirty = displaced_series(std::vector<double>(30, 0.0));
  auto r30 = iterative_butina(thirty);
  CHECK(r30.centroids.conformers.size() == 1);

  // 25 evenly spaced conformers: all singletons at the starting threshold.
  std::vector<double> offsets;
  for (int k = 0; k < 25; ++k) offsets.push_back(0.8 * k);
  auto nested = displaced_series(offsets);
  auto r = iterative_butina(nested, 0.20, 0.10, 20);
  CHECK(r.centroids.conformers.size() <= 20);
  CHECK(r.threshold > 0.20);
  CHECK(r.passes > 1);
  CHECK(butina_cluster(nested, 0.20).size() == 25);
  // Direct simulation: the accepted pass is the first with <= 20 clusters.
  for (int pass = 0; pass < r.passes; ++pass) {
    const auto n = butina_cluster(nested, 0.20 + 0.10 * pass).size();
    if (pass + 1 < r.passes) CHECK(n > 20);
    else CHECK(n == r.centroids.conformers.size());
  }
}

TEST_CASE("rotatable_bonds and corrupt") {
  Rng rng(10);
  auto e = testing::random_ensemble(rng, 9, 4);
  for (auto [j, k] : rotatable_bonds(e.graph)) {
    CHECK(e.graph.heavy_degree(j) >= 2);
    CHECK(e.graph.heavy_degree(k) >= 2);
  }

  const auto same = corrupt(e, CorruptionSpec{});
  for (std::size_t k = 0; k < e.conformers.size(); ++k) {
    CHECK(same.conformers[k].coords == e.conformers[k].coords);
    CHECK(same.conformers[k].quality == Quality::Exact);
  }

  const auto spec = CorruptionSpec::for_tier(Quality::Low, 99);
  const auto a = corrupt(e, spec);
  const auto b = corrupt(e, spec);
  for (std::size_t k = 0; k < e.conformers.size(); ++k) {
    CHECK(a.conformers[k].coords == b.conformers[k].coords);
    CHECK(a.conformers[k].quality == Quality::Low);
    CHECK(a.conformers[k].energy == e.conformers[k].energy);
    CHECK(a.conformers[k].coords.rows() == e.conformers[k].coords.rows());
    CHECK(a.conformers[k].coords != e.conformers[k].coords);
  }
  CHECK(a.graph == e.graph);

  // Subset consistency: streams are keyed by conformer id.
  ConformerEnsemble sub{e.graph, {e.conformers[2]}};
  CHECK(corrupt(sub, spec).conformers[0].coords == a.conformers[2].coords);

  CHECK_THROWS_AS(corrupt(e, CorruptionSpec{-1.0, 0.0, 1, Quality::Mid}), InvalidArgument);
  CHECK_THROWS_AS(corrupt(e, CorruptionSpec{0.1, 0.0, 1, Quality::Exact}), InvalidArgument);
}

TEST_CASE("corrupt: jitter magnitude matches the 3D Gaussian norm") {
  Rng rng(11);
  // 10^4 atoms: 100 conformers of 100 atoms, no rotatable bonds.
  MolecularGraph g;
  g.add_atom({kCarbon, 0, 0});
  for (int i = 1; i < 100; ++i) g.add_bond(0, g.add_atom({kHydrogen, 0, 0}));
  ConformerEnsemble e{g, {}};
  for (int k = 0; k < 100; ++k) e.conformers.push_back({testing::random_cloud(rng, 100), {}, Quality::Exact, k});
  const auto out = corrupt(e, CorruptionSpec{0.1, 0.0, 5, Quality::Mid});
  double mean = 0.0;
  for (int k = 0; k < 100; ++k)
    mean += (out.conformers[k].coords - e.conformers[k].coords).rowwise().norm().sum();
  mean /= 1e4;
  // Monte-Carlo estimate of E|N(0, 0.1^2 I_3)| with an independent stream.
  std::mt19937 mc(12345);
  std::normal_distribution<double> n(0.0, 0.1);
  double oracle = 0.0;
  for (int s = 0; s < 200000; ++s) {
    const double x = n(mc), y = n(mc), z = n(mc);
    oracle += std::sqrt(x * x + y * y + z * z);
  }
  oracle /= 200000;
  CHECK(std::abs(oracle - 0.1 * std::sqrt(8.0 / M_PI)) < 0.002);
  CHECK(std::abs(mean - oracle) < 0.05 * oracle);
}

TEST_CASE("presample") {
  Rng rng(12);
  auto one = testing::random_ensemble(rng, 4, 1);
  one.conformers[0].id = 7;
  auto three = presample(one, 3, 1);
  REQUIRE(three.size() == 3);
  for (const auto& c : three) CHECK(c.id == 7);

  auto ten = testing::random_ensemble(rng, 4, 10);
  auto draw = presample(ten, 10, 2);
  std::set<int> distinct;
  for (const auto& c : draw) distinct.insert(c.id);
  CHECK(distinct.size() == 10);

  auto again = presample(ten, 10, 2);
  for (int i = 0; i < 10; ++i) CHECK(draw[i].id == again[i].id);
  CHECK(sample_random_conformer(ten, 3).id == sample_random_conformer(ten, 3).id);

  // Short ensembles: every full pass is a permutation.
  auto four = testing::random_ensemble(rng, 4, 4);
  auto eleven = presample(four, 11, 4);
  for (int pass = 0; pass < 2; ++pass) {
    std::set<int> ids;
    for (int i = 0; i < 4; ++i) ids.insert(eleven[pass * 4 + i].id);
    CHECK(ids.size() == 4);
  }
  CHECK_THROWS_AS(presample(ten, 0, 1), InvalidArgument);
}

TEST_CASE("build_decoy_set") {
  Rng rng(13);
  auto e = testing::random_ensemble(rng, 8, 12);
  const auto labels = aggregate_labels(e);
  const int active = labels.active_id(Target::B5Max);

  const auto mid = CorruptionSpec::for_tier(Quality::Mid, 77);
  auto set = build_decoy_set(e, Target::B5Max, 10, mid, 5);
  REQUIRE(set.conformers.size() == 10);
  CHECK(set.contains_active);
  CHECK_FALSE(set.undersized);
  const Coords corrupted_active = corrupt(e, mid).by_id(active).coords;
  int derived = 0;
  std::set<int> member_ids;
  for (std::size_t p = 0; p < set.conformers.size(); ++p) {
    CHECK(set.conformers[p].quality == Quality::Mid);
    member_ids.insert(set.conformers[p].id);
    if (set.conformers[p].coords == corrupted_active) {
      ++derived;
      CHECK(static_cast<int>(p) == set.active_position);
    }
  }
  CHECK(derived == 1);
  CHECK(member_ids.size() == 10);

  auto single = build_decoy_set(e, Target::B5Max, 1, mid, 5);
  REQUIRE(single.conformers.size() == 1);
  CHECK(single.conformers[0].coords == corrupted_active);

  auto exact = build_decoy_set(e, Target::LMin, 10, CorruptionSpec{}, 6);
  CHECK(exact.conformers[exact.active_position].coords ==
        e.by_id(labels.active_id(Target::LMin)).coords);
  for (const auto& c : exact.conformers) CHECK(c.quality == Quality::Exact);

  auto lone = testing::random_ensemble(rng, 5, 1);
  auto small = build_decoy_set(lone, Target::LMax, 10, CorruptionSpec{}, 1);
  CHECK(small.conformers.size() == 1);
  CHECK(small.undersized);
  CHECK(small.active_position == 0);
}
