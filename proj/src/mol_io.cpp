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


#include "confq/mol_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "confq/elements.hpp"
#include "confq/error.hpp"

namespace confq {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string normalize_symbol(std::string_view s) {
  std::string out(s);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<char>(i == 0 ? std::toupper(out[i]) : std::tolower(out[i]));
  return out;
}

std::string at_line(int line) { return " at line " + std::to_string(line); }

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// SDF charge codes: 1..3 -> +3..+1, 5..7 -> -1..-3.
int charge_from_code(int code) { return (code >= 1 && code <= 7 && code != 4) ? 4 - code : 0; }
int code_from_charge(int q) { return (q >= -3 && q <= 3 && q != 0) ? 4 - q : 0; }

}  // namespace

double quantize6(double x) {
  double q = std::round(x * 1e6) / 1e6;
  return q == 0.0 ? 0.0 : q;  // no negative zero
}

void quantize6(Coords& coords) {
  for (Eigen::Index i = 0; i < coords.size(); ++i)
    coords.data()[i] = quantize6(coords.data()[i]);
}

std::vector<XyzBlock> parse_xyz(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<XyzBlock> blocks;
  std::size_t li = 0;
  while (li < lines.size()) {
    if (trim(lines[li]).empty()) {
      ++li;
      continue;
    }
    const int count_line = static_cast<int>(li) + 1;
    long long n = 0;
    if (!parse_number(lines[li], n) || n < 0)
      throw ParseError("malformed atom count '" + std::string(trim(lines[li])) +
                       "'" + at_line(count_line));
    if (li + 1 >= lines.size() && n > 0)
      throw ParseError("missing comment line" + at_line(count_line + 1));
    XyzBlock block;
    block.comment = li + 1 < lines.size() ? std::string(lines[li + 1]) : "";
    block.coords.resize(n, 3);
    li += 2;
    for (long long k = 0; k < n; ++k, ++li) {
      const int line_no = static_cast<int>(li) + 1;
      if (li >= lines.size())
        throw ParseError("expected " + std::to_string(n) + " atoms, input ends" +
                         at_line(line_no));
      auto tok = tokens(lines[li]);
      if (tok.size() < 4)
        throw ParseError("expected element and 3 coordinates" + at_line(line_no));
      std::string sym = normalize_symbol(tok[0]);
      if (find_element(sym) == nullptr)
        throw ParseError("unknown element " + std::string(tok[0]) + at_line(line_no));
      for (int d = 0; d < 3; ++d) {
        double v = 0.0;
        if (!parse_number(tok[1 + d], v) || !std::isfinite(v))
          throw ParseError("non-numeric coordinate '" + std::string(tok[1 + d]) +
                           "'" + at_line(line_no));
        block.coords(k, d) = v;
      }
      block.symbols.push_back(std::move(sym));
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::string write_xyz(const MolecularGraph& graph,
                      std::span<const Conformer> conformers) {
  std::string out;
  for (const Conformer& c : conformers) {
    if (c.coords.rows() != graph.atom_count())
      throw InvalidArgument("conformer atom count does not match graph");
    out += std::to_string(graph.atom_count()) + "\n";
    out += "id=" + std::to_string(c.id) + " quality=" + std::string(to_string(c.quality));
    if (c.energy) out += " energy=" + fmt6(*c.energy);
    out += "\n";
    for (int i = 0; i < graph.atom_count(); ++i) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%-2s %.6f %.6f %.6f\n",
                    std::string(element(graph.atom(i).atomic_number).symbol).c_str(),
                    c.coords(i, 0), c.coords(i, 1), c.coords(i, 2));
      out += buf;
    }
  }
  return out;
}

SdfMolecule parse_sdf_v2000(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.size() < 4) throw ParseError("molfile shorter than its header block");
  SdfMolecule mol;
  mol.name = std::string(trim(lines[0]));
  std::string_view counts = lines[3];
  if (counts.find("V2000") == std::string_view::npos)
    throw ParseError("counts line lacks V2000 tag" + at_line(4));
  int n_atoms = 0, n_bonds = 0;
  if (counts.size() < 6 || !parse_number(counts.substr(0, 3), n_atoms) ||
      !parse_number(counts.substr(3, 3), n_bonds) || n_atoms < 0 || n_bonds < 0)
    throw ParseError("malformed counts line" + at_line(4));

  std::size_t li = 4;
  mol.conformer.coords.resize(n_atoms, 3);
  for (int k = 0; k < n_atoms; ++k, ++li) {
    const int line_no = static_cast<int>(li) + 1;
    auto fail = [&] {
      return ParseError("counts line declares " + std::to_string(n_atoms) +
                        " atoms but the atom block has " + std::to_string(k) +
                        at_line(line_no));
    };
    if (li >= lines.size()) throw fail();
    auto tok = tokens(lines[li]);
    if (tok.size() < 4) throw fail();
    double xyz[3];
    for (int d = 0; d < 3; ++d)
      if (!parse_number(tok[d], xyz[d])) throw fail();
    const ElementInfo* e = find_element(normalize_symbol(tok[3]));
    if (e == nullptr) {
      if (std::isalpha(static_cast<unsigned char>(tok[3].front())))
        throw ParseError("unknown element " + std::string(tok[3]) + at_line(line_no));
      throw fail();
    }
    int code = 0;
    if (tok.size() >= 6) parse_number(tok[5], code);
    mol.graph.add_atom({e->atomic_number, charge_from_code(code), 0});
    for (int d = 0; d < 3; ++d) mol.conformer.coords(k, d) = xyz[d];
  }
  for (int k = 0; k < n_bonds; ++k, ++li) {
    const int line_no = static_cast<int>(li) + 1;
    auto fail = [&] {
      return ParseError("counts line declares " + std::to_string(n_bonds) +
                        " bonds but the bond block has " + std::to_string(k) +
                        at_line(line_no));
    };
    if (li >= lines.size()) throw fail();
    std::string_view line = lines[li];
    int i = 0, j = 0, order = 0;
    if (line.size() < 9 || !parse_number(line.substr(0, 3), i) ||
        !parse_number(line.substr(3, 3), j) || !parse_number(line.substr(6, 3), order))
      throw fail();
    if (i < 1 || j < 1 || i > n_atoms || j > n_atoms)
      throw ParseError("bond references missing atom" + at_line(line_no));
    mol.graph.add_bond(i - 1, j - 1, order);
  }
  // Property block: only charges are interpreted.
  for (; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    if (line.starts_with("M  END")) break;
    if (line.starts_with("M  CHG")) {
      auto tok = tokens(line.substr(6));
      int n = 0;
      if (tok.empty() || !parse_number(tok[0], n) ||
          tok.size() < static_cast<std::size_t>(1 + 2 * n))
        throw ParseError("malformed M  CHG line" + at_line(static_cast<int>(li) + 1));
      for (int p = 0; p < n; ++p) {
        int atom = 0, q = 0;
        if (!parse_number(tok[1 + 2 * p], atom) || !parse_number(tok[2 + 2 * p], q) ||
            atom < 1 || atom > n_atoms)
          throw ParseError("malformed M  CHG entry" + at_line(static_cast<int>(li) + 1));
        mol.graph.set_formal_charge(atom - 1, q);
      }
    }
  }
  return mol;
}

std::string write_sdf_v2000(const MolecularGraph& graph, const Conformer& conformer,
                            std::string_view name) {
  if (conformer.coords.rows() != graph.atom_count())
    throw InvalidArgument("conformer atom count does not match graph");
  if (graph.atom_count() > 999 || graph.bonds().size() > 999)
    throw InvalidArgument("V2000 molfiles hold at most 999 atoms and bonds");
  std::string out(name);
  out += "\n  confq\n\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%3d%3d  0  0  0  0  0  0  0  0999 V2000\n",
                graph.atom_count(), static_cast<int>(graph.bonds().size()));
  out += buf;
  std::string charges;
  int n_charged = 0;
  for (int i = 0; i < graph.atom_count(); ++i) {
    const Atom& a = graph.atom(i);
    std::snprintf(buf, sizeof buf,
                  "%10.4f%10.4f%10.4f %-3s 0%3d  0  0  0  0  0  0  0  0  0  0\n",
                  conformer.coords(i, 0), conformer.coords(i, 1), conformer.coords(i, 2),
                  std::string(element(a.atomic_number).symbol).c_str(),
                  code_from_charge(a.formal_charge));
    out += buf;
    if (a.formal_charge != 0) {
      ++n_charged;
      std::snprintf(buf, sizeof buf, " %3d %3d", i + 1, a.formal_charge);
      charges += buf;
    }
  }
  for (const Bond& b : graph.bonds()) {
    std::snprintf(buf, sizeof buf, "%3d%3d%3d  0\n", b.i + 1, b.j + 1, b.order);
    out += buf;
  }
  // Charges outside +-3 only survive through the property block.
  if (n_charged > 0 && n_charged <= 8) {
    std::snprintf(buf, sizeof buf, "M  CHG%3d", n_charged);
    out += buf + charges + "\n";
  }
  out += "M  END\n";
  return out;
}

// ---------------------------------------------------------------- manifest

namespace {

json conformers_to_json(const ConformerEnsemble& e) {
  json arr = json::array();
  for (const Conformer& c : e.conformers) {
    json coords = json::array();
    for (Eigen::Index i = 0; i < c.coords.rows(); ++i)
      coords.push_back({quantize6(c.coords(i, 0)), quantize6(c.coords(i, 1)),
                        quantize6(c.coords(i, 2))});
    arr.push_back({{"id", c.id},
                   {"energy", c.energy ? json(quantize6(*c.energy)) : json(nullptr)},
                   {"coords", std::move(coords)}});
  }
  return arr;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

ConformerEnsemble ensemble_from_json(const json& arr, const MolecularGraph& graph,
                                     Quality q, const std::string& where) {
  if (!arr.is_array() || arr.empty())
    throw SchemaError(where + ": ensemble '" + std::string(to_string(q)) +
                      "' must be a nonempty array");
  ConformerEnsemble e{graph, {}};
  for (const json& jc : arr) {
    Conformer c;
    c.quality = q;
    c.id = require(jc, "id", where).get<int>();
    const json& je = require(jc, "energy", where);
    if (!je.is_null()) c.energy = je.get<double>();
    const json& coords = require(jc, "coords", where);
    if (static_cast<int>(coords.size()) != graph.atom_count())
      throw SchemaError(where + ": conformer " + std::to_string(c.id) + " has " +
                        std::to_string(coords.size()) + " atoms, graph has " +
                        std::to_string(graph.atom_count()));
    c.coords.resize(graph.atom_count(), 3);
    for (int i = 0; i < graph.atom_count(); ++i) {
      if (coords[i].size() != 3)
        throw SchemaError(where + ": coordinate row must have 3 entries");
      for (int d = 0; d < 3; ++d) c.coords(i, d) = coords[i][d].get<double>();
    }
    e.conformers.push_back(std::move(c));
  }
  try {
    e.validate();
  } catch (const SchemaError& err) {
    throw SchemaError(where + ": " + err.what());
  }
  return e;
}

}  // namespace

std::string manifest_line(const DatasetRecord& r) {
  const MolecularGraph& g = r.ensemble_exact.graph;
  json atoms = json::array(), bonds = json::array(), labels = json::object();
  for (const Atom& a : g.atoms()) atoms.push_back({a.atomic_number, a.formal_charge, a.flags});
  for (const Bond& b : g.bonds()) bonds.push_back({b.i, b.j, b.order});
  for (Target t : kAllTargets) labels[std::string(to_string(t))] = at(r.labels, t);
  json j = {{"schema_version", kManifestSchemaVersion},
            {"id", r.id},
            {"atoms", std::move(atoms)},
            {"bonds", std::move(bonds)},
            {"descriptor_bond", {g.descriptor_bond().a, g.descriptor_bond().b}},
            {"ensembles",
             {{"exact", conformers_to_json(r.ensemble_exact)},
              {"mid", conformers_to_json(r.ensemble_mid)},
              {"low", conformers_to_json(r.ensemble_low)}}},
            {"labels", std::move(labels)}};
  return j.dump();
}

DatasetRecord parse_manifest_line(std::string_view line, int line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError("manifest line " + std::to_string(line_number) + ": " + e.what());
  }
  std::string where = "manifest line " + std::to_string(line_number);
  try {
    if (!j.is_object()) throw SchemaError(where + ": record must be an object");
    DatasetRecord r;
    r.id = require(j, "id", where).get<std::int64_t>();
    where = "record " + std::to_string(r.id);
    int version = require(j, "schema_version", where).get<int>();
    if (version != kManifestSchemaVersion)
      throw SchemaError(where + ": unsupported schema_version " + std::to_string(version));
    MolecularGraph g;
    for (const json& a : require(j, "atoms", where)) {
      if (a.size() != 3) throw SchemaError(where + ": atom entries are [Z, charge, flags]");
      g.add_atom({a[0].get<int>(), a[1].get<int>(), a[2].get<std::uint32_t>()});
    }
    for (const json& b : require(j, "bonds", where)) {
      if (b.size() != 3) throw SchemaError(where + ": bond entries are [i, j, order]");
      g.add_bond(b[0].get<int>(), b[1].get<int>(), b[2].get<int>());
    }
    const json& db = require(j, "descriptor_bond", where);
    if (db.size() != 2) throw SchemaError(where + ": descriptor_bond must be [a, b]");
    g.set_descriptor_bond({db[0].get<int>(), db[1].get<int>()});
    const json& ens = require(j, "ensembles", where);
    r.ensemble_exact = ensemble_from_json(require(ens, "exact", where), g, Quality::Exact, where);
    r.ensemble_mid = ensemble_from_json(require(ens, "mid", where), g, Quality::Mid, where);
    r.ensemble_low = ensemble_from_json(require(ens, "low", where), g, Quality::Low, where);
    const json& labels = require(j, "labels", where);
    if (!labels.is_object() || labels.size() != kAllTargets.size())
      throw SchemaError(where + ": labels must hold exactly " +
                        std::to_string(kAllTargets.size()) + " targets");
    for (Target t : kAllTargets)
      at(r.labels, t) = require(labels, std::string(to_string(t)).c_str(), where).get<double>();
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(where + ": " + e.what());
  } catch (const TopologyError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

void write_manifest(std::span<const DatasetRecord> records, std::ostream& out) {
  for (const DatasetRecord& r : records) out << manifest_line(r) << '\n';
}

std::vector<DatasetRecord> read_manifest(std::istream& in) {
  std::vector<DatasetRecord> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    out.push_back(parse_manifest_line(line, n));
  }
  return out;
}

void save_manifest(std::span<const DatasetRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_manifest(records, out);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<DatasetRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_manifest(in);
}

}  // namespace confq
