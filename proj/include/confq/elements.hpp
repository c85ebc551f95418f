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

#include <string_view>

namespace confq {

struct ElementInfo {
  int atomic_number;
  std::string_view symbol;
  double vdw_radius;    // Angstrom
  bool tabulated_radius;  // false when vdw_radius is the fallback value
};

inline constexpr double kFallbackVdwRadius = 1.50;

/// nullptr when the symbol is not a known element. Case-sensitive ("Cl").
const ElementInfo* find_element(std::string_view symbol) noexcept;
const ElementInfo* find_element(int atomic_number) noexcept;

/// Throws InvalidArgument for unknown atomic numbers.
const ElementInfo& element(int atomic_number);

/// Bondi radius; falls back to 1.50 A (with a one-time warning on stderr)
/// for elements outside the Bondi subset.
double vdw_radius(int atomic_number);

inline constexpr int kHydrogen = 1;
inline constexpr int kCarbon = 6;
inline constexpr int kNitrogen = 7;
inline constexpr int kOxygen = 8;
inline constexpr int kFluorine = 9;
inline constexpr int kSulfur = 16;
inline constexpr int kChlorine = 17;
inline constexpr int kBromine = 35;

}  // namespace confq
