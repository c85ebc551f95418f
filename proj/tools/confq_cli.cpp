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


// Command-line front end. Everything goes through the C API in libconfq.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "confq/confq.h"

namespace fs = std::filesystem;

namespace {

struct Failure {
  int exit_code;
};

// Exit codes: 0 success, 1 some cell failed or a check did not hold, 2 usage
// or input error.
constexpr int kExitFailedCells = 1;
constexpr int kExitError = 2;

void check(confq_status st, const std::string& what) {
  if (st == CONFQ_OK) return;
  std::cerr << "confq: " << what << ": " << confq_status_name(st) << ": " << confq_last_error() << "\n";
  throw Failure{kExitError};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Settings = std::unique_ptr<confq_settings, Deleter<confq_settings, confq_settings_free>>;
using Dataset = std::unique_ptr<confq_dataset, Deleter<confq_dataset, confq_dataset_free>>;
using Report = std::unique_ptr<confq_report, Deleter<confq_report, confq_report_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  confq_string_free(s);
  return out;
}

fs::path default_out_dir() {
  const char* env = std::getenv("CONFQ_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path("confq-out");
}

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;

  void add_to(CLI::App* app) {
    app->add_option("-c,--config", config, "settings file (key = value lines)")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override one setting, KEY=VALUE (repeatable)");
    app->add_option("-o,--out", out, "output directory (default: $CONFQ_OUTPUT_DIR or ./confq-out)");
  }

  Settings settings() const {
    confq_settings* raw = nullptr;
    if (config.empty())
      check(confq_settings_create(&raw), "settings");
    else
      check(confq_settings_load(config.c_str(), &raw), config);
    Settings s(raw);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "confq: --set expects KEY=VALUE, got '" << kv << "'\n";
        throw Failure{kExitError};
      }
      check(confq_settings_set(s.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set " + kv);
    }
    return s;
  }

  fs::path out_dir() const {
    fs::path dir = out.empty() ? default_out_dir() : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
      std::cerr << "confq: cannot create " << dir << ": " << ec.message() << "\n";
      throw Failure{kExitError};
    }
    return dir;
  }
};

Dataset load_dataset(const std::string& manifest) {
  confq_dataset* raw = nullptr;
  check(confq_dataset_load(manifest.c_str(), &raw), manifest);
  return Dataset(raw);
}

// Either the given manifest or a fresh dataset generated from the settings.
Dataset dataset_for(const std::string& manifest, const confq_settings* s) {
  if (!manifest.empty()) return load_dataset(manifest);
  confq_dataset* raw = nullptr;
  check(confq_dataset_generate(s, &raw), "generate");
  return Dataset(raw);
}

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    std::cerr << "confq: cannot write " << path << "\n";
    throw Failure{kExitError};
  }
}

std::vector<int> id_list(const std::string& text, const std::string& what) {
  size_t n = 0;
  check(confq_parse_id_list(text.c_str(), nullptr, 0, &n), what);
  std::vector<int> ids(n);
  check(confq_parse_id_list(text.c_str(), ids.data(), ids.size(), &n), what);
  return ids;
}

void print_cell(void*, const char* name, int ok, int reused, double seconds, double mae, const char* error) {
  if (reused)
    std::fprintf(stderr, "  %-22s reused  test MAE %.4f\n", name, mae);
  else if (ok)
    std::fprintf(stderr, "  %-22s %6.1fs  test MAE %.4f\n", name, seconds, mae);
  else
    std::fprintf(stderr, "  %-22s FAILED  %s\n", name, error);
}

int finish_report(const confq_report* r, const fs::path& dir, bool trends) {
  check(confq_report_emit(r, dir.string().c_str()), "emit report");
  size_t cells = 0, failed = 0;
  check(confq_report_counts(r, &cells, &failed), "report");
  if (trends) {
    char* text = nullptr;
    int hard = 0;
    check(confq_report_trends(r, &text, &hard), "trends");
    std::cout << take(text);
  }
  std::cerr << cells - failed << "/" << cells << " cells succeeded; report written to " << dir.string() << "\n";
  return failed == 0 ? 0 : kExitFailedCells;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sterimol descriptors over conformer ensembles and surrogate benchmarks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(confq_version()));
  int exit_code = 0;

  // generate
  Common gen_opts;
  std::string gen_manifest;
  auto* gen = app.add_subcommand("generate", "generate a synthetic dataset manifest");
  gen_opts.add_to(gen);
  gen->add_option("-m,--manifest", gen_manifest, "manifest path (default: <out>/manifest.jsonl)");
  gen->callback([&] {
    auto s = gen_opts.settings();
    const std::string path = gen_manifest.empty() ? (gen_opts.out_dir() / "manifest.jsonl").string() : gen_manifest;
    auto d = dataset_for("", s.get());
    check(confq_dataset_save(d.get(), path.c_str()), path);
    size_t n = 0;
    confq_dataset_size(d.get(), &n);
    std::cerr << "wrote " << n << " molecules to " << path << "\n";
  });

  // labels
  std::string lab_manifest, lab_out;
  bool lab_diff = false;
  double lab_tol = 1e-9;
  auto* lab = app.add_subcommand("labels", "recompute labels from the stored Exact ensembles");
  lab->add_option("-m,--manifest", lab_manifest, "manifest path")->required();
  lab->add_flag("--diff", lab_diff, "compare against the stored labels; exit 1 above --tol");
  lab->add_option("--tol", lab_tol, "largest accepted difference in diff mode")->capture_default_str();
  lab->add_option("-o,--output", lab_out, "CSV path (default: stdout)");
  lab->callback([&] {
    auto d = load_dataset(lab_manifest);
    char* csv = nullptr;
    double worst = 0.0;
    check(confq_dataset_labels_csv(d.get(), lab_diff ? 1 : 0, &csv, &worst), "labels");
    write_or_print(take(csv), lab_out);
    if (lab_diff) {
      std::fprintf(stderr, "max |recomputed - stored| = %.3e\n", worst);
      if (!(worst <= lab_tol)) exit_code = kExitFailedCells;
    }
  });

  // baseline
  Common base_opts;
  std::string base_manifest, base_tier = "low", base_csv;
  auto* base = app.add_subcommand("baseline", "MAE of labels computed directly from a cheap ensemble tier");
  base_opts.add_to(base);
  base->add_option("-m,--manifest", base_manifest, "manifest path (default: generate from settings)");
  base->add_option("-t,--tier", base_tier, "mid, low or exact")->capture_default_str();
  base->add_option("--csv", base_csv, "CSV path (default: stdout)");
  base->callback([&] {
    auto s = base_opts.settings();
    auto d = dataset_for(base_manifest, s.get());
    char* csv = nullptr;
    check(confq_baseline_csv(d.get(), s.get(), base_tier.c_str(), &csv), "baseline");
    write_or_print(take(csv), base_csv);
  });

  // train
  Common tr_opts;
  std::string tr_manifest, tr_target = "B5_max", tr_ckpt;
  int tr_model = 1, tr_resplit = 0, tr_size = 0;
  auto* tr = app.add_subcommand("train", "train a single model configuration");
  tr_opts.add_to(tr);
  tr->add_option("-m,--manifest", tr_manifest, "manifest path (default: generate from settings)");
  tr->add_option("--model", tr_model, "model id 1-14")->capture_default_str();
  tr->add_option("--target", tr_target, "L_min, L_max, B5_min or B5_max")->capture_default_str();
  tr->add_option("--resplit", tr_resplit, "resplit index")->capture_default_str();
  tr->add_option("--train-size", tr_size, "training molecules (default: whole training split)");
  tr->add_option("--checkpoint", tr_ckpt, "checkpoint path (default: <out>/model-<id>-<target>.json)");
  tr->callback([&] {
    auto s = tr_opts.settings();
    auto d = dataset_for(tr_manifest, s.get());
    const std::string ckpt = !tr_ckpt.empty() ? tr_ckpt
                                              : (tr_opts.out_dir() / ("model-" + std::to_string(tr_model) + "-" +
                                                                      tr_target + ".json"))
                                                    .string();
    confq_cell_result res{};
    check(confq_train(d.get(), s.get(), tr_model, tr_target.c_str(), tr_resplit, tr_size, ckpt.c_str(), &res),
          "train");
    if (!res.ok) {
      std::cerr << "training failed: " << confq_last_error() << "\n";
      exit_code = kExitFailedCells;
      return;
    }
    std::printf("model %d %s resplit %d: test MAE %.6f, val MAE %.6f, best epoch %d of %d\n", tr_model,
                tr_target.c_str(), tr_resplit, res.test_mae, res.val_mae, res.best_epoch, res.epochs);
    std::cerr << "checkpoint written to " << ckpt << "\n";
  });

  // matrix
  Common mx_opts;
  std::string mx_manifest, mx_configs, mx_seeds;
  bool mx_resume = false, mx_trends = false;
  int mx_jobs = 0;
  auto* mx = app.add_subcommand("matrix", "run the model x target x resplit benchmark");
  mx_opts.add_to(mx);
  mx->add_option("-m,--manifest", mx_manifest, "manifest path (default: generate and save to <out>)");
  mx->add_flag("--resume", mx_resume, "reuse finished cells in <out>/cells");
  mx->add_option("--configs", mx_configs, "model ids, e.g. 1-3,14 (default: matrix.models)");
  mx->add_option("--seeds", mx_seeds, "resplit indices to run, e.g. 0 or 0-2 (default: all)");
  mx->add_option("-j,--jobs", mx_jobs, "worker threads (default: jobs setting)");
  mx->add_flag("--trends", mx_trends, "print the trend checks after the run");
  mx->callback([&] {
    auto s = mx_opts.settings();
    if (!mx_configs.empty()) {
      check(confq_settings_set(s.get(), "matrix.models", mx_configs.c_str()), "--configs");
      // The learning curve only runs when its model was requested.
      const auto models = id_list(mx_configs, "--configs");
      char* curve = nullptr;
      check(confq_settings_get(s.get(), "curve.model", &curve), "settings");
      const int curve_model = std::stoi(take(curve));
      if (std::find(models.begin(), models.end(), curve_model) == models.end())
        check(confq_settings_set(s.get(), "curve.sizes", ""), "curve.sizes");
    }
    const fs::path dir = mx_opts.out_dir();
    Dataset d = dataset_for(mx_manifest, s.get());
    if (mx_manifest.empty())
      check(confq_dataset_save(d.get(), (dir / "manifest.jsonl").string().c_str()), "save manifest");

    std::vector<int> resplits;
    if (!mx_seeds.empty()) resplits = id_list(mx_seeds, "--seeds");
    confq_matrix_options o;
    confq_matrix_options_init(&o);
    const std::string cells = (dir / "cells").string();
    o.cell_dir = cells.c_str();
    o.resume = mx_resume ? 1 : 0;
    o.jobs = mx_jobs;
    o.resplits = resplits.empty() ? nullptr : resplits.data();
    o.n_resplits = resplits.size();
    o.on_cell = print_cell;
    confq_report* raw = nullptr;
    check(confq_matrix_run(d.get(), s.get(), &o, &raw), "matrix");
    Report r(raw);
    exit_code = finish_report(r.get(), dir, mx_trends);
  });

  // report
  Common rep_opts;
  std::vector<std::string> rep_inputs;
  bool rep_trends = false;
  auto* rep = app.add_subcommand("report", "merge report.json files and emit tables");
  rep->add_option("inputs", rep_inputs, "report.json files")->required()->check(CLI::ExistingFile);
  rep->add_option("-o,--out", rep_opts.out, "output directory (default: $CONFQ_OUTPUT_DIR or ./confq-out)");
  rep->add_flag("--trends", rep_trends, "print the trend checks");
  rep->callback([&] {
    std::vector<Report> owned;
    std::vector<const confq_report*> views;
    for (const auto& path : rep_inputs) {
      confq_report* raw = nullptr;
      check(confq_report_load(path.c_str(), &raw), path);
      owned.emplace_back(raw);
      views.push_back(raw);
    }
    confq_report* merged = nullptr;
    check(confq_report_merge(views.data(), views.size(), &merged), "merge");
    Report r(merged);
    exit_code = finish_report(r.get(), rep_opts.out_dir(), rep_trends);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return exit_code;
}
