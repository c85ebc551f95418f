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

#include <filesystem>
#include <sstream>

#include "confq/error.hpp"
#include "confq/mol_io.hpp"
#include "support.hpp"

using namespace confq;

TEST_CASE("elements: Bondi subset and symbol lookup") {
  CHECK(vdw_radius(kCarbon) == 1.70);
  CHECK(vdw_radius(kHydrogen) == 1.20);
  CHECK(vdw_radius(kBromine) == 1.85);
  CHECK(vdw_radius(15) == kFallbackVdwRadius);
  for (int z = 1; z <= 36; ++z) {
    const ElementInfo* e = find_element(z);
    REQUIRE(e != nullptr);
    CHECK(e->vdw_radius > 0.0);
    CHECK(find_element(e->symbol) == e);
  }
  CHECK(find_element("Xx") == nullptr);
  CHECK_THROWS_AS(element(250), InvalidArgument);
}

TEST_CASE("parse_xyz: minimal, concatenated and error cases") {
  auto one = parse_xyz("1\n\nC 0.0 0.0 0.0");
  REQUIRE(one.size() == 1);
  CHECK(one[0].symbols == std::vector<std::string>{"C"});
  CHECK(one[0].coords.norm() == 0.0);

  auto two = parse_xyz("2\nfirst\nC 0 0 0\nH 1.09 0 0\n2\nsecond\nO 0 0 0\nH 0 0.97 0\n");
  REQUIRE(two.size() == 2);
  CHECK(two[1].comment == "second");
  CHECK(two[1].coords(1, 1) == doctest::Approx(0.97));

  try {
    parse_xyz("1\n\nXx 0 0 0");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()) == "unknown element Xx at line 3");
  }
  CHECK_THROWS_WITH_AS(parse_xyz("x\n\nC 0 0 0"), "malformed atom count 'x' at line 1", ParseError);
  CHECK_THROWS_WITH_AS(parse_xyz("1\n\nC 0 abc 0"), "non-numeric coordinate 'abc' at line 3",
                       ParseError);
  CHECK_THROWS_AS(parse_xyz("3\n\nC 0 0 0\n"), ParseError);
}

namespace {

MolecularGraph ethanol_like() {
  MolecularGraph g;
  g.add_atom({kCarbon, 0, 0});
  g.add_atom({kCarbon, 0, 0});
  g.add_atom({kOxygen, -1, 0});
  g.add_atom({kHydrogen, 0, 0});
  g.add_atom({kNitrogen, 1, 0});
  g.add_bond(0, 1, 1);
  g.add_bond(1, 2, 1);
  g.add_bond(0, 3, 1);
  g.add_bond(0, 4, 2);
  return g;
}

}  // namespace

TEST_CASE("parse_sdf_v2000: minimal molfile and counts mismatch") {
  const char* two_atoms =
      "name\n  prog\n\n  2  1  0  0  0  0  0  0  0  0999 V2000\n"
      "    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0\n"
      "    1.5000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0\n"
      "  1  2  1  0\nM  END\n";
  auto mol = parse_sdf_v2000(two_atoms);
  CHECK(mol.name == "name");
  REQUIRE(mol.graph.bonds().size() == 1);
  CHECK(mol.graph.bonds()[0] == Bond{0, 1, 1});
  CHECK(mol.conformer.coords(1, 0) == 1.5);
  CHECK_FALSE(mol.graph.descriptor_bond().is_set());

  const char* short_block =
      "name\n  prog\n\n  3  1  0  0  0  0  0  0  0  0999 V2000\n"
      "    0.0000    0.0000    0.0000 C   0  0\n"
      "    1.5000    0.0000    0.0000 C   0  0\n"
      "  1  2  1  0\nM  END\n";
  CHECK_THROWS_WITH_AS(parse_sdf_v2000(short_block),
                       "counts line declares 3 atoms but the atom block has 2 at line 7",
                       ParseError);
  CHECK_THROWS_AS(parse_sdf_v2000("a\nb\nc\n  1  0  0  0  0  0  0  0  0  0999 V3000\n"),
                  ParseError);
}

TEST_CASE("sdf and xyz writers round-trip") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    MolecularGraph g = trial == 0 ? ethanol_like() : testing::random_tree(rng, 5);
    Conformer c;
    c.coords = testing::random_cloud(rng, g.atom_count(), 8.0);
    auto back = parse_sdf_v2000(write_sdf_v2000(g, c, "mol"));
    CHECK_FALSE(back.graph.descriptor_bond().is_set());
    back.graph.set_descriptor_bond(g.descriptor_bond());
    CHECK(back.graph == g);
    CHECK((back.conformer.coords - c.coords).cwiseAbs().maxCoeff() <= 0.5e-4 + 1e-12);

    auto blocks = parse_xyz(write_xyz(g, std::vector<Conformer>{c, c}));
    REQUIRE(blocks.size() == 2);
    CHECK((blocks[1].coords - c.coords).cwiseAbs().maxCoeff() <= 0.5e-6 + 1e-12);
    for (int i = 0; i < g.atom_count(); ++i)
      CHECK(find_element(blocks[0].symbols[i])->atomic_number == g.atom(i).atomic_number);
  }
}

namespace {

DatasetRecord small_record(Rng& rng, std::int64_t id) {
  MolecularGraph g = testing::random_tree(rng, 6);
  auto make = [&](Quality q, int n, bool energies) {
    ConformerEnsemble e{g, {}};
    for (int k = 0; k < n; ++k) {
      Conformer c;
      c.coords = testing::random_cloud(rng, g.atom_count());
      quantize6(c.coords);
      if (energies) c.energy = quantize6(0.37 * k);
      c.quality = q;
      c.id = k;
      e.conformers.push_back(std::move(c));
    }
    return e;
  };
  DatasetRecord r;
  r.id = id;
  r.ensemble_exact = make(Quality::Exact, 3, true);
  r.ensemble_mid = make(Quality::Mid, 2, true);
  r.ensemble_low = make(Quality::Low, 4, false);
  r.labels = {3.1234567890123, 4.5, 2.25, 5.0 / 3.0};
  return r;
}

void check_same(const DatasetRecord& x, const DatasetRecord& y) {
  CHECK(x.id == y.id);
  CHECK(x.ensemble_exact.graph == y.ensemble_exact.graph);
  for (Quality q : kAllQualities) {
    const auto& ex = x.ensemble(q);
    const auto& ey = y.ensemble(q);
    REQUIRE(ex.conformers.size() == ey.conformers.size());
    for (std::size_t k = 0; k < ex.conformers.size(); ++k) {
      CHECK(ex.conformers[k].id == ey.conformers[k].id);
      CHECK(ex.conformers[k].quality == ey.conformers[k].quality);
      CHECK(ex.conformers[k].energy.has_value() == ey.conformers[k].energy.has_value());
      if (ex.conformers[k].energy)
        CHECK(std::abs(*ex.conformers[k].energy - *ey.conformers[k].energy) <= 1e-9);
      CHECK((ex.conformers[k].coords - ey.conformers[k].coords).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
  for (Target t : kAllTargets) CHECK(std::abs(at(x.labels, t) - at(y.labels, t)) <= 1e-9);
}

}  // namespace

TEST_CASE("manifest round-trip and schema errors") {
  const auto dir = std::filesystem::temp_directory_path() / "confq_test_manifest";
  std::filesystem::create_directories(dir);

  save_manifest(std::vector<DatasetRecord>{}, dir / "empty.jsonl");
  CHECK(std::filesystem::file_size(dir / "empty.jsonl") == 0);
  CHECK(load_manifest(dir / "empty.jsonl").empty());

  Rng rng(3);
  std::vector<DatasetRecord> records;
  for (int i = 0; i < 4; ++i) records.push_back(small_record(rng, 100 + i));
  save_manifest(records, dir / "four.jsonl");
  auto back = load_manifest(dir / "four.jsonl");
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) check_same(records[i], back[i]);

  std::string line = manifest_line(records[0]);
  auto drop = [&](const std::string& key) {
    std::string s = line;
    const auto pos = s.find("\"" + key + "\"");
    REQUIRE(pos != std::string::npos);
    s.replace(pos, key.size() + 2, "\"zz_" + key + "\"");
    return s;
  };
  CHECK_THROWS_WITH_AS(parse_manifest_line(drop("labels"), 1),
                       "record 100: missing field 'labels'", SchemaError);
  CHECK_THROWS_AS(parse_manifest_line(drop("ensembles"), 1), SchemaError);

  std::string bad_labels = line;
  bad_labels.replace(bad_labels.find("\"B5_max\""), 8, "\"B6_max\"");
  CHECK_THROWS_AS(parse_manifest_line(bad_labels, 1), SchemaError);
  CHECK_THROWS_AS(parse_manifest_line("{not json", 1), ParseError);
  CHECK_THROWS_AS(load_manifest(dir / "missing.jsonl"), IoError);
}
