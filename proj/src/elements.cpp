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


#include "confq/elements.hpp"

#include <array>
#include <iostream>
#include <mutex>
#include <set>
#include <string>

#include "confq/error.hpp"

namespace confq {
namespace {

constexpr double F = kFallbackVdwRadius;

// Bondi (1964) radii for the Sterimol-relevant subset; fallback elsewhere.
constexpr std::array<ElementInfo, 37> kTable = {{
    {1, "H", 1.20, true},    {2, "He", F, false},     {3, "Li", F, false},
    {4, "Be", F, false},     {5, "B", F, false},      {6, "C", 1.70, true},
    {7, "N", 1.55, true},    {8, "O", 1.52, true},    {9, "F", 1.47, true},
    {10, "Ne", F, false},    {11, "Na", F, false},    {12, "Mg", F, false},
    {13, "Al", F, false},    {14, "Si", F, false},    {15, "P", F, false},
    {16, "S", 1.80, true},   {17, "Cl", 1.75, true},  {18, "Ar", F, false},
    {19, "K", F, false},     {20, "Ca", F, false},    {21, "Sc", F, false},
    {22, "Ti", F, false},    {23, "V", F, false},     {24, "Cr", F, false},
    {25, "Mn", F, false},    {26, "Fe", F, false},    {27, "Co", F, false},
    {28, "Ni", F, false},    {29, "Cu", F, false},    {30, "Zn", F, false},
    {31, "Ga", F, false},    {32, "Ge", F, false},    {33, "As", F, false},
    {34, "Se", F, false},    {35, "Br", 1.85, true},  {36, "Kr", F, false},
    {53, "I", F, false},
}};

std::mutex g_warn_mutex;
std::set<int> g_warned;

}  // namespace

const ElementInfo* find_element(std::string_view symbol) noexcept {
  for (const auto& e : kTable)
    if (e.symbol == symbol) return &e;
  return nullptr;
}

const ElementInfo* find_element(int atomic_number) noexcept {
  for (const auto& e : kTable)
    if (e.atomic_number == atomic_number) return &e;
  return nullptr;
}

const ElementInfo& element(int atomic_number) {
  const ElementInfo* e = find_element(atomic_number);
  if (e == nullptr)
    throw InvalidArgument("unknown atomic number " +
                          std::to_string(atomic_number));
  return *e;
}

double vdw_radius(int atomic_number) {
  const ElementInfo* e = find_element(atomic_number);
  if (e != nullptr && e->tabulated_radius) return e->vdw_radius;
  std::lock_guard lock(g_warn_mutex);
  if (g_warned.insert(atomic_number).second)
    std::cerr << "confq: warning: no tabulated vdW radius for Z="
              << atomic_number << ", using " << kFallbackVdwRadius << " A\n";
  return kFallbackVdwRadius;
}

}  // namespace confq
