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


#include "confq/confq.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "confq/bench.hpp"
#include "confq/ensemble.hpp"
#include "confq/error.hpp"
#include "confq/mol_io.hpp"
#include "confq/sterimol.hpp"

struct confq_settings {
  confq::BenchSettings s;
};

struct confq_dataset {
  std::vector<confq::DatasetRecord> records;
};

struct confq_report {
  confq::ExperimentReport r;
};

namespace {

thread_local std::string g_last_error;

confq_status fail(confq_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

confq_status map_code(confq::ErrorCode code) {
  switch (code) {
    case confq::ErrorCode::InvalidArgument: return CONFQ_ERR_INVALID_ARGUMENT;
    case confq::ErrorCode::Parse: return CONFQ_ERR_PARSE;
    case confq::ErrorCode::Schema: return CONFQ_ERR_SCHEMA;
    case confq::ErrorCode::Geometry: return CONFQ_ERR_GEOMETRY;
    case confq::ErrorCode::Topology: return CONFQ_ERR_TOPOLOGY;
    case confq::ErrorCode::Numeric: return CONFQ_ERR_NUMERIC;
    case confq::ErrorCode::Io: return CONFQ_ERR_IO;
  }
  return CONFQ_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes and the thread-local message.
template <class F>
confq_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const confq::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CONFQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CONFQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CONFQ_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw confq::InvalidArgument(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::string fmt6(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<confq::SplitAssignment> splits_for(const confq_dataset* d, const confq::BenchSettings& s) {
  return confq::make_splits(confq::record_ids(d->records), s.sizes, s.resplits, s.split_seed);
}

}  // namespace

extern "C" {

const char* confq_last_error(void) { return g_last_error.c_str(); }

const char* confq_status_name(confq_status status) {
  switch (status) {
    case CONFQ_OK: return "ok";
    case CONFQ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CONFQ_ERR_PARSE: return "parse error";
    case CONFQ_ERR_SCHEMA: return "schema error";
    case CONFQ_ERR_GEOMETRY: return "geometry error";
    case CONFQ_ERR_TOPOLOGY: return "topology error";
    case CONFQ_ERR_NUMERIC: return "numeric error";
    case CONFQ_ERR_IO: return "i/o error";
    case CONFQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* confq_version(void) { return "0.1.0"; }

void confq_string_free(char* s) { std::free(s); }

confq_status confq_settings_create(confq_settings** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new confq_settings{};
    return CONFQ_OK;
  });
}

confq_status confq_settings_parse(const char* text, confq_settings** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new confq_settings{confq::parse_settings(text)};
    return CONFQ_OK;
  });
}

confq_status confq_settings_load(const char* path, confq_settings** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new confq_settings{confq::load_settings(path)};
    return CONFQ_OK;
  });
}

confq_status confq_settings_set(confq_settings* settings, const char* key, const char* value) {
  return guarded([&] {
    require(settings && key && value, "null argument");
    confq::set_setting(settings->s, key, value);
    return CONFQ_OK;
  });
}

confq_status confq_settings_get(const confq_settings* settings, const char* key, char** out) {
  return guarded([&] {
    require(settings && key && out, "null argument");
    *out = dup_string(confq::get_setting(settings->s, key));
    return CONFQ_OK;
  });
}

confq_status confq_parse_id_list(const char* text, int* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(text && count && (capacity == 0 || out), "null argument");
    const auto ids = confq::parse_id_list(text);
    for (size_t i = 0; i < ids.size() && i < capacity; ++i) out[i] = ids[i];
    *count = ids.size();
    return CONFQ_OK;
  });
}

confq_status confq_settings_text(const confq_settings* settings, char** out) {
  return guarded([&] {
    require(settings && out, "null argument");
    *out = dup_string(confq::settings_text(settings->s));
    return CONFQ_OK;
  });
}

void confq_settings_free(confq_settings* settings) { delete settings; }

confq_status confq_dataset_generate(const confq_settings* settings, confq_dataset** out) {
  return guarded([&] {
    require(settings && out, "null argument");
    settings->s.validate();
    *out = new confq_dataset{confq::generate_dataset(settings->s.data, settings->s.sizes.total())};
    return CONFQ_OK;
  });
}

confq_status confq_dataset_load(const char* manifest_path, confq_dataset** out) {
  return guarded([&] {
    require(manifest_path && out, "null argument");
    *out = new confq_dataset{confq::load_manifest(manifest_path)};
    return CONFQ_OK;
  });
}

confq_status confq_dataset_save(const confq_dataset* dataset, const char* manifest_path) {
  return guarded([&] {
    require(dataset && manifest_path, "null argument");
    confq::save_manifest(dataset->records, manifest_path);
    return CONFQ_OK;
  });
}

confq_status confq_dataset_size(const confq_dataset* dataset, size_t* out) {
  return guarded([&] {
    require(dataset && out, "null argument");
    *out = dataset->records.size();
    return CONFQ_OK;
  });
}

void confq_dataset_free(confq_dataset* dataset) { delete dataset; }

confq_status confq_dataset_labels_csv(const confq_dataset* dataset, int diff, char** out, double* max_abs_diff) {
  return guarded([&] {
    require(dataset && out, "null argument");
    std::ostringstream csv;
    csv << "id";
    for (auto t : confq::kAllTargets) csv << ',' << confq::to_string(t);
    if (diff)
      for (auto t : confq::kAllTargets) csv << ",stored_" << confq::to_string(t) << ",diff_" << confq::to_string(t);
    csv << '\n';
    double worst = 0.0;
    for (const auto& rec : dataset->records) {
      const auto labels = confq::aggregate_labels(rec.ensemble_exact).values;
      csv << rec.id;
      for (double v : labels) csv << ',' << fmt6(v);
      if (diff)
        for (std::size_t t = 0; t < labels.size(); ++t) {
          const double d = std::abs(labels[t] - rec.labels[t]);
          worst = std::max(worst, d);
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.3e", d);
          csv << ',' << fmt6(rec.labels[t]) << ',' << buf;
        }
      csv << '\n';
    }
    if (max_abs_diff) *max_abs_diff = worst;
    *out = dup_string(csv.str());
    return CONFQ_OK;
  });
}

confq_status confq_baseline_csv(const confq_dataset* dataset, const confq_settings* settings, const char* tier,
                                char** out) {
  return guarded([&] {
    require(dataset && settings && tier && out, "null argument");
    const confq::Quality q = confq::parse_quality(tier);
    const auto& s = settings->s;
    const auto splits = splits_for(dataset, s);
    std::ostringstream csv;
    csv << "tier,target,resplit,mae\n";
    confq::TargetValues sum{};
    for (const auto& split : splits) {
      const auto mae = confq::run_baseline(dataset->records, q, split.test);
      for (auto t : s.targets) {
        csv << confq::to_string(q) << ',' << confq::to_string(t) << ',' << split.resplit << ','
            << fmt6(confq::at(mae, t)) << '\n';
        confq::at(sum, t) += confq::at(mae, t);
      }
    }
    for (auto t : s.targets)
      csv << confq::to_string(q) << ',' << confq::to_string(t) << ",mean,"
          << fmt6(confq::at(sum, t) / static_cast<double>(splits.size())) << '\n';
    *out = dup_string(csv.str());
    return CONFQ_OK;
  });
}

confq_status confq_train(const confq_dataset* dataset, const confq_settings* settings, int model_id,
                         const char* target, int resplit, int train_size, const char* checkpoint_path,
                         confq_cell_result* result) {
  return guarded([&] {
    require(dataset && settings && target && result, "null argument");
    const auto& s = settings->s;
    require(resplit >= 0 && resplit < s.resplits, "resplit out of range");
    require(model_id >= 1 && model_id <= confq::kModelCount, "model id out of range");
    const auto splits = splits_for(dataset, s);
    confq::CellKey key{confq::parse_target(target), model_id, resplit, train_size <= 0 ? s.sizes.train : train_size};
    const auto fit = confq::train_cell(dataset->records, splits[resplit], s, key);
    *result = {fit.result.ok ? 1 : 0, fit.result.test_mae, fit.result.val_mae, fit.result.best_epoch,
               fit.result.epochs};
    if (fit.model && checkpoint_path) confq::save_checkpoint(*fit.model, checkpoint_path);
    if (!fit.result.ok) g_last_error = fit.result.error;
    return CONFQ_OK;
  });
}

void confq_matrix_options_init(confq_matrix_options* options) {
  if (options) *options = confq_matrix_options{nullptr, 0, 0, nullptr, 0, nullptr, nullptr};
}

confq_status confq_matrix_run(const confq_dataset* dataset, const confq_settings* settings,
                              const confq_matrix_options* options, confq_report** out) {
  return guarded([&] {
    require(dataset && settings && out, "null argument");
    confq_matrix_options o;
    confq_matrix_options_init(&o);
    if (options) o = *options;
    require(o.n_resplits == 0 || o.resplits, "resplits is null");
    const auto& s = settings->s;
    confq::MatrixOptions mo;
    if (o.cell_dir) mo.cell_dir = o.cell_dir;
    mo.resume = o.resume != 0;
    mo.jobs = o.jobs > 0 ? o.jobs : s.jobs;
    mo.resplits.assign(o.resplits, o.resplits + o.n_resplits);
    if (o.on_cell) {
      const auto cb = o.on_cell;
      void* user = o.user;
      mo.on_cell = [cb, user](const confq::CellResult& c, bool reused, double seconds) {
        cb(user, c.key.name().c_str(), c.ok ? 1 : 0, reused ? 1 : 0, seconds, c.test_mae, c.error.c_str());
      };
    }
    *out = new confq_report{confq::run_matrix(dataset->records, splits_for(dataset, s), s, mo)};
    return CONFQ_OK;
  });
}

confq_status confq_report_load(const char* path, confq_report** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new confq_report{confq::load_report(path)};
    return CONFQ_OK;
  });
}

confq_status confq_report_merge(const confq_report* const* reports, size_t n, confq_report** out) {
  return guarded([&] {
    require(out && (n == 0 || reports), "null argument");
    std::vector<confq::ExperimentReport> all;
    for (size_t i = 0; i < n; ++i) {
      require(reports[i], "null report");
      all.push_back(reports[i]->r);
    }
    *out = new confq_report{confq::merge_reports(all)};
    return CONFQ_OK;
  });
}

confq_status confq_report_emit(const confq_report* report, const char* dir) {
  return guarded([&] {
    require(report && dir, "null argument");
    confq::emit_report(report->r, dir);
    return CONFQ_OK;
  });
}

confq_status confq_report_json(const confq_report* report, char** out) {
  return guarded([&] {
    require(report && out, "null argument");
    *out = dup_string(confq::report_json(report->r));
    return CONFQ_OK;
  });
}

confq_status confq_report_csv(const confq_report* report, char** out) {
  return guarded([&] {
    require(report && out, "null argument");
    *out = dup_string(confq::report_csv(report->r));
    return CONFQ_OK;
  });
}

confq_status confq_report_counts(const confq_report* report, size_t* cells, size_t* failed) {
  return guarded([&] {
    require(report, "null argument");
    size_t bad = 0;
    for (const auto& c : report->r.cells) bad += c.ok ? 0 : 1;
    if (cells) *cells = report->r.cells.size();
    if (failed) *failed = bad;
    return CONFQ_OK;
  });
}

confq_status confq_report_trends(const confq_report* report, char** out, int* hard_failures) {
  return guarded([&] {
    require(report && out, "null argument");
    std::string text;
    int hard = 0;
    for (const auto& c : confq::evaluate_trends(report->r)) {
      const char* tag = c.passed ? "PASS" : (c.hard ? "FAIL" : "WARN");
      if (!c.passed && c.hard) ++hard;
      text += std::string(tag) + " " + c.name + ": " + c.detail + "\n";
    }
    if (hard_failures) *hard_failures = hard;
    *out = dup_string(text);
    return CONFQ_OK;
  });
}

void confq_report_free(confq_report* report) { delete report; }

confq_status confq_sterimol(size_t n_atoms, const int* atomic_numbers, const double* xyz, size_t n_bonds,
                            const int* bonds, int a, int b, double* L, double* B5) {
  return guarded([&] {
    require(atomic_numbers && xyz && L && B5 && (n_bonds == 0 || bonds), "null argument");
    require(n_atoms >= 2, "need at least two atoms");
    confq::MolecularGraph g;
    confq::Conformer conf;
    conf.coords.resize(static_cast<Eigen::Index>(n_atoms), 3);
    for (size_t i = 0; i < n_atoms; ++i) {
      if (!confq::find_element(atomic_numbers[i]))
        throw confq::InvalidArgument("unsupported atomic number " + std::to_string(atomic_numbers[i]));
      g.add_atom({atomic_numbers[i], 0, 0});
      for (int k = 0; k < 3; ++k) conf.coords(static_cast<Eigen::Index>(i), k) = xyz[3 * i + k];
    }
    for (size_t k = 0; k < n_bonds; ++k) g.add_bond(bonds[2 * k], bonds[2 * k + 1]);
    g.set_descriptor_bond({a, b});
    g.validate();
    const auto res = confq::sterimol_LB5(g, conf);
    *L = res.L;
    *B5 = res.B5;
    return CONFQ_OK;
  });
}

}  // extern "C"
