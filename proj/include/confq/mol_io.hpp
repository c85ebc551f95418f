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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "confq/molecule.hpp"

namespace confq {

inline constexpr int kManifestSchemaVersion = 1;

struct XyzBlock {
  std::vector<std::string> symbols;
  Coords coords;
  std::string comment;
};

/// Parses one or more concatenated XYZ blocks. Errors name the 1-based line.
std::vector<XyzBlock> parse_xyz(std::string_view text);

/// One block per conformer; comment line carries id, quality and energy.
/// Coordinates are written with 6 decimals.
std::string write_xyz(const MolecularGraph& graph,
                      std::span<const Conformer> conformers);

struct SdfMolecule {
  std::string name;
  MolecularGraph graph;  // descriptor bond left unset
  Conformer conformer;
};

SdfMolecule parse_sdf_v2000(std::string_view text);
std::string write_sdf_v2000(const MolecularGraph& graph,
                            const Conformer& conformer,
                            std::string_view name = "");

/// Rounds to the 6-decimal grid used by the manifest and XYZ writers.
double quantize6(double x);
void quantize6(Coords& coords);

// Line-delimited JSON manifests, one record per line.
std::string manifest_line(const DatasetRecord& record);
DatasetRecord parse_manifest_line(std::string_view line, int line_number = 0);

void write_manifest(std::span<const DatasetRecord> records, std::ostream& out);
std::vector<DatasetRecord> read_manifest(std::istream& in);

void save_manifest(std::span<const DatasetRecord> records,
                   const std::filesystem::path& path);
std::vector<DatasetRecord> load_manifest(const std::filesystem::path& path);

}  // namespace confq
