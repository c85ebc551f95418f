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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "confq/molecule.hpp"
#include "confq/surrogate.hpp"
#include "confq/synth.hpp"

namespace confq {

struct SplitSizes {
  int train = 500;
  int val = 100;
  int test = 200;

  int total() const { return train + val + test; }
  bool operator==(const SplitSizes&) const = default;
};

struct SplitAssignment {
  int resplit = 0;
  std::vector<std::int64_t> train;  // shuffled; prefixes form the learning-curve subsets
  std::vector<std::int64_t> val;    // ascending
  std::vector<std::int64_t> test;   // ascending
};

/// Independent seeded partitions of `ids`. Throws InvalidArgument when the
/// sizes exceed the number of ids.
std::vector<SplitAssignment> make_splits(const std::vector<std::int64_t>& ids, SplitSizes sizes,
                                         int n_resplits, std::uint64_t seed);

std::vector<std::int64_t> record_ids(std::span<const DatasetRecord> records);

/// MAE of labels aggregated over the `tier` ensemble against the Exact
/// labels, over the records listed in `test_ids`.
TargetValues run_baseline(std::span<const DatasetRecord> records, Quality tier,
                          const std::vector<std::int64_t>& test_ids);

struct BenchSettings {
  SyntheticMoleculeSpec data;
  SplitSizes sizes;
  int resplits = 3;
  std::uint64_t split_seed = 1;
  std::vector<int> models{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  std::vector<Target> targets{kAllTargets.begin(), kAllTargets.end()};
  std::vector<int> curve_sizes{50, 100, 200, 400};
  int curve_model = 9;
  Hyperparams hyper = bench_hyperparams();
  std::uint64_t train_seed = 7;
  std::uint64_t input_seed = 11;
  int jobs = 1;

  /// Defaults used by the benchmark matrix.
  static Hyperparams bench_hyperparams();
  void validate() const;
};

/// Key-value settings text: `key = value` per line, `#` starts a comment.
BenchSettings parse_settings(const std::string& text);
BenchSettings load_settings(const std::filesystem::path& path);
/// Canonical text listing every key; parse_settings inverts it.
std::string settings_text(const BenchSettings& settings);

std::string get_setting(const BenchSettings& settings, const std::string& key);
/// Sets one key as it would appear in settings text; the settings are left
/// untouched when the value or the resulting combination is invalid.
void set_setting(BenchSettings& settings, const std::string& key, const std::string& value);

/// Parses "1-14", "1,4,14" or "1-3,9".
std::vector<int> parse_id_list(const std::string& text);

struct CellKey {
  Target target = Target::LMin;
  int model_id = 1;
  int resplit = 0;
  int train_size = 0;

  std::string name() const;
  bool operator==(const CellKey&) const = default;
};

struct CellResult {
  CellKey key;
  bool ok = false;
  double test_mae = 0.0;
  double val_mae = 0.0;
  int best_epoch = -1;
  int epochs = 0;
  std::string error;

  bool operator==(const CellResult&) const = default;
};

struct BaselineRow {
  Quality tier = Quality::Mid;
  Target target = Target::LMin;
  int resplit = 0;
  double mae = 0.0;

  bool operator==(const BaselineRow&) const = default;
};

struct ExperimentReport {
  SplitSizes sizes;
  std::vector<CellResult> cells;
  std::vector<BaselineRow> baselines;

  bool operator==(const ExperimentReport&) const = default;
};

struct ModelRow {
  Target target;
  int model_id;
  double mae;                 // mean over successful resplits; NaN when none
  double relative_error_pct;  // vs model 1; NaN when unavailable
  int n_ok;
  int n_cells;
};

struct CurvePoint {
  Target target;
  int model_id;
  int train_size;
  double mae;
  int n_ok;
};

struct BaselineSummary {
  Quality tier;
  Target target;
  double mae;
};

std::vector<ModelRow> model_rows(const ExperimentReport& report);
std::vector<CurvePoint> learning_curve(const ExperimentReport& report);
std::vector<BaselineSummary> baseline_summary(const ExperimentReport& report);
bool all_cells_ok(const ExperimentReport& report);

/// Every cell the settings request, in execution order.
std::vector<CellKey> planned_cells(const BenchSettings& settings);

struct MatrixOptions {
  std::filesystem::path cell_dir;  // per-cell result files; empty disables them
  bool resume = false;             // reuse matching cell files
  int jobs = 1;
  std::vector<int> resplits;       // subset of resplit indices; empty runs all
  std::function<void(const CellResult&, bool reused, double seconds)> on_cell;
};

ExperimentReport run_matrix(std::span<const DatasetRecord> records,
                            const std::vector<SplitAssignment>& splits,
                            const BenchSettings& settings, const MatrixOptions& options = {});

/// Model configuration, including the training seed, of one matrix cell.
ModelConfig cell_config(const BenchSettings& settings, const CellKey& key);

struct CellFit {
  CellResult result;
  std::optional<Model> model;  // empty when training failed
};

/// Trains a single matrix cell outside the matrix. Produces the same
/// CellResult the matrix would for that key.
CellFit train_cell(std::span<const DatasetRecord> records, const SplitAssignment& split,
                   const BenchSettings& settings, const CellKey& key);

/// Training data for one (model, target) on one split, as used by the matrix.
struct CellData {
  std::vector<LabeledInput> train, val, test;
};
CellData cell_data(std::span<const DatasetRecord> records, const SplitAssignment& split,
                   const ModelConfig& config, std::uint64_t input_seed, int train_size,
                   TierNoise mid, TierNoise low);

std::string report_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
std::string report_csv(const ExperimentReport& report);
std::string learning_curve_csv(const ExperimentReport& report);
std::string baseline_csv(const ExperimentReport& report);
std::string cells_csv(const ExperimentReport& report);

/// Writes report.json, report.csv, learning_curve.csv, baseline.csv and
/// cells.csv into `dir`.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir);
ExperimentReport load_report(const std::filesystem::path& path);
/// Union of cells and baselines; later reports win on key collisions.
ExperimentReport merge_reports(const std::vector<ExperimentReport>& reports);

struct TrendCheck {
  std::string name;
  bool hard = true;
  bool passed = false;
  std::string detail;
};

/// The qualitative orderings checked on the benchmark, one entry per
/// criterion and target.
std::vector<TrendCheck> evaluate_trends(const ExperimentReport& report, double tie_tolerance = 0.02);

}  // namespace confq
