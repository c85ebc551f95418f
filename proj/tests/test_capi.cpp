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
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "confq/confq.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  confq_string_free(s);
  return out;
}

// Tiny benchmark: 3 models, 1 target, 2 resplits.
confq_settings* tiny() {
  confq_settings* s = nullptr;
  const char* text =
      "data.seed = 5\nsplit.train = 16\nsplit.val = 6\nsplit.test = 6\nsplit.resplits = 2\n"
      "matrix.models = 1,4,14\nmatrix.targets = B5_max\ncurve.sizes = 8\ncurve.model = 4\n"
      "train.hidden = 8\ntrain.max_epochs = 3\ntrain.patience = 2\n";
  REQUIRE(confq_settings_parse(text, &s) == CONFQ_OK);
  return s;
}

std::filesystem::path scratch(const char* name) {
  auto p = std::filesystem::temp_directory_path() / (std::string("confq_capi_") + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

struct Counter {
  int fresh = 0, reused = 0, failed = 0;
};

void count_cell(void* user, const char*, int ok, int reused, double, double, const char*) {
  auto* c = static_cast<Counter*>(user);
  (reused ? c->reused : c->fresh)++;
  if (!ok) c->failed++;
}

}  // namespace

TEST_CASE("status codes and last error") {
  confq_settings* s = nullptr;
  CHECK(confq_settings_parse("split.train = banana\n", &s) == CONFQ_ERR_PARSE);
  CHECK(s == nullptr);
  CHECK(std::string(confq_last_error()) == "line 1: split.train: invalid integer 'banana'");
  CHECK(std::string(confq_status_name(CONFQ_ERR_PARSE)) == "parse error");
  CHECK(confq_settings_create(&s) == CONFQ_OK);
  CHECK(std::string(confq_last_error()).empty());
  CHECK(confq_settings_set(s, "nope", "1") == CONFQ_ERR_INVALID_ARGUMENT);
  CHECK(confq_settings_set(s, "split.test", "50") == CONFQ_OK);
  CHECK(take([&] { char* t = nullptr; confq_settings_text(s, &t); return t; }()).find("split.test = 50\n") !=
        std::string::npos);
  CHECK(confq_settings_load("/nonexistent/x.cfg", nullptr) == CONFQ_ERR_INVALID_ARGUMENT);
  confq_settings* t = nullptr;
  CHECK(confq_settings_load("/nonexistent/x.cfg", &t) == CONFQ_ERR_IO);
  confq_dataset* d = nullptr;
  CHECK(confq_dataset_load("/nonexistent/m.jsonl", &d) == CONFQ_ERR_IO);
  confq_settings_free(s);
  confq_settings_free(nullptr);
  confq_report_free(nullptr);
  confq_dataset_free(nullptr);

  // Errors are per thread.
  std::string other;
  std::thread th([&] {
    confq_settings* x = nullptr;
    confq_settings_parse("bogus = 1\n", &x);
    other = confq_last_error();
  });
  th.join();
  CHECK(other == "line 1: unknown key 'bogus'");
  CHECK(std::string(confq_last_error()) != other);
}

TEST_CASE("dataset round trip, labels and baseline") {
  auto* s = tiny();
  confq_dataset* d = nullptr;
  REQUIRE(confq_dataset_generate(s, &d) == CONFQ_OK);
  size_t n = 0;
  CHECK(confq_dataset_size(d, &n) == CONFQ_OK);
  CHECK(n == 28);

  const auto dir = scratch("data");
  const auto path = (dir / "m.jsonl").string();
  REQUIRE(confq_dataset_save(d, path.c_str()) == CONFQ_OK);
  confq_dataset* back = nullptr;
  REQUIRE(confq_dataset_load(path.c_str(), &back) == CONFQ_OK);

  char* csv = nullptr;
  double worst = -1;
  REQUIRE(confq_dataset_labels_csv(back, 1, &csv, &worst) == CONFQ_OK);
  const auto labels = take(csv);
  CHECK(worst >= 0.0);
  CHECK(worst < 1e-9);
  CHECK(labels.rfind("id,L_min,L_max,B5_min,B5_max,stored_L_min,diff_L_min", 0) == 0);
  CHECK(std::count(labels.begin(), labels.end(), '\n') == 29);

  REQUIRE(confq_baseline_csv(back, s, "exact", &csv) == CONFQ_OK);
  const auto exact = take(csv);
  CHECK(exact == "tier,target,resplit,mae\nexact,B5_max,0,0.000000\nexact,B5_max,1,0.000000\nexact,B5_max,mean,0.000000\n");
  REQUIRE(confq_baseline_csv(back, s, "low", &csv) == CONFQ_OK);
  CHECK(take(csv).find("low,B5_max,mean,") != std::string::npos);
  CHECK(confq_baseline_csv(back, s, "ultra", &csv) == CONFQ_ERR_INVALID_ARGUMENT);

  confq_dataset_free(back);
  confq_dataset_free(d);
  confq_settings_free(s);
  std::filesystem::remove_all(dir);
}

TEST_CASE("train and matrix through the C API") {
  auto* s = tiny();
  confq_dataset* d = nullptr;
  REQUIRE(confq_dataset_generate(s, &d) == CONFQ_OK);
  const auto dir = scratch("matrix");

  confq_cell_result one{};
  const auto ckpt = (dir / "m14.json").string();
  REQUIRE(confq_train(d, s, 14, "B5_max", 1, 0, ckpt.c_str(), &one) == CONFQ_OK);
  CHECK(one.ok == 1);
  CHECK(one.test_mae > 0.0);
  CHECK(std::filesystem::exists(ckpt));
  CHECK(confq_train(d, s, 15, "B5_max", 0, 0, nullptr, &one) == CONFQ_ERR_INVALID_ARGUMENT);
  CHECK(confq_train(d, s, 1, "B5_max", 2, 0, nullptr, &one) == CONFQ_ERR_INVALID_ARGUMENT);

  Counter counter;
  confq_matrix_options o;
  confq_matrix_options_init(&o);
  const auto cells = (dir / "cells").string();
  o.cell_dir = cells.c_str();
  o.on_cell = count_cell;
  o.user = &counter;
  confq_report* r = nullptr;
  REQUIRE(confq_matrix_run(d, s, &o, &r) == CONFQ_OK);
  size_t total = 0, failed = 0;
  confq_report_counts(r, &total, &failed);
  CHECK(total == 8);
  CHECK(failed == 0);
  CHECK(counter.fresh == 8);

  // The matrix cell equals the single-cell run.
  char* json = nullptr;
  REQUIRE(confq_report_json(r, &json) == CONFQ_OK);
  const auto text = take(json);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", one.test_mae);
  CHECK(text.find(buf) != std::string::npos);

  // Resume reuses every cell and yields identical bytes.
  o.resume = 1;
  counter = {};
  confq_report* again = nullptr;
  REQUIRE(confq_matrix_run(d, s, &o, &again) == CONFQ_OK);
  CHECK(counter.reused == 8);
  REQUIRE(confq_report_json(again, &json) == CONFQ_OK);
  CHECK(take(json) == text);

  // Per-resplit runs merge back into the same model rows.
  const int r0[] = {0}, r1[] = {1};
  confq_matrix_options part;
  confq_matrix_options_init(&part);
  part.resplits = r0;
  part.n_resplits = 1;
  confq_report* a = nullptr;
  confq_report* b = nullptr;
  REQUIRE(confq_matrix_run(d, s, &part, &a) == CONFQ_OK);
  part.resplits = r1;
  REQUIRE(confq_matrix_run(d, s, &part, &b) == CONFQ_OK);
  const confq_report* both[] = {a, b};
  confq_report* merged = nullptr;
  REQUIRE(confq_report_merge(both, 2, &merged) == CONFQ_OK);
  char* c1 = nullptr;
  char* c2 = nullptr;
  confq_report_csv(merged, &c1);
  confq_report_csv(r, &c2);
  CHECK(take(c1) == take(c2));

  const auto out = (dir / "out").string();
  REQUIRE(confq_report_emit(merged, out.c_str()) == CONFQ_OK);
  confq_report* loaded = nullptr;
  REQUIRE(confq_report_load((dir / "out" / "report.json").string().c_str(), &loaded) == CONFQ_OK);
  size_t n_loaded = 0;
  confq_report_counts(loaded, &n_loaded, nullptr);
  CHECK(n_loaded == 8);

  char* trends = nullptr;
  int hard = -1;
  REQUIRE(confq_report_trends(loaded, &trends, &hard) == CONFQ_OK);
  CHECK(hard >= 0);
  CHECK(take(trends).find("(a) active beats random [B5_max]") != std::string::npos);

  for (auto* p : {r, again, a, b, merged, loaded}) confq_report_free(p);
  confq_dataset_free(d);
  confq_settings_free(s);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sterimol helper") {
  // Methyl group on a carbon: H atoms at 1.09 A, tetrahedral.
  const double c = 1.09 * std::sqrt(8.0) / 3.0, z = 1.54 + 1.09 / 3.0;
  const int elems[] = {6, 6, 1, 1, 1};
  const double xyz[] = {0, 0, 0, 0, 0, 1.54, c, 0, z, -c / 2, c * std::sqrt(3.0) / 2, z, -c / 2, -c * std::sqrt(3.0) / 2, z};
  const int bonds[] = {0, 1, 1, 2, 1, 3, 1, 4};
  double L = 0, B5 = 0;
  REQUIRE(confq_sterimol(5, elems, xyz, 4, bonds, 0, 1, &L, &B5) == CONFQ_OK);
  // The b carbon sphere (Bondi 1.70) reaches further along the axis than the hydrogens.
  CHECK(L == doctest::Approx(1.54 + 1.70).epsilon(1e-12));
  CHECK(B5 == doctest::Approx(c + 1.20).epsilon(1e-12));
  CHECK(confq_sterimol(5, elems, xyz, 4, bonds, 0, 3, &L, &B5) == CONFQ_ERR_TOPOLOGY);
  const int bad[] = {6, 6, 1, 1, 999};
  CHECK(confq_sterimol(5, bad, xyz, 4, bonds, 0, 1, &L, &B5) == CONFQ_ERR_INVALID_ARGUMENT);
}
