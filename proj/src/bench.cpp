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


#include "confq/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "confq/ensemble.hpp"
#include "confq/error.hpp"

namespace confq {
namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Identifies the inputs a cell result depends on.
std::string fingerprint(const BenchSettings& s) {
  BenchSettings norm = s;
  norm.models = {1};
  norm.targets = {Target::LMin};
  norm.curve_sizes = {};
  norm.jobs = 1;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(settings_text(norm))));
  return buf;
}

std::string cell_file_json(const CellResult& c, const std::string& fp) {
  nlohmann::json j;
  j["fingerprint"] = fp;
  j["target"] = std::string(to_string(c.key.target));
  j["model_id"] = c.key.model_id;
  j["resplit"] = c.key.resplit;
  j["train_size"] = c.key.train_size;
  j["ok"] = c.ok;
  j["test_mae"] = c.test_mae;
  j["val_mae"] = c.val_mae;
  j["best_epoch"] = c.best_epoch;
  j["epochs"] = c.epochs;
  j["error"] = c.error;
  return j.dump();
}

std::optional<CellResult> read_cell_file(const std::filesystem::path& path, const CellKey& key,
                                         const std::string& fp) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("fingerprint").get<std::string>() != fp) return std::nullopt;
    CellResult c;
    c.key = {parse_target(j.at("target").get<std::string>()), j.at("model_id").get<int>(),
             j.at("resplit").get<int>(), j.at("train_size").get<int>()};
    if (!(c.key == key)) return std::nullopt;
    c.ok = j.at("ok").get<bool>();
    if (!c.ok) return std::nullopt;  // failed cells are retried
    c.test_mae = j.at("test_mae").get<double>();
    c.val_mae = j.at("val_mae").get<double>();
    c.best_epoch = j.at("best_epoch").get<int>();
    c.epochs = j.at("epochs").get<int>();
    c.error = j.at("error").get<std::string>();
    return c;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp);
    out << text << '\n';
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + ": " + ec.message());
}

std::vector<LabeledInput> labeled(const std::vector<std::int64_t>& ids,
                                  const std::unordered_map<std::int64_t, const DatasetRecord*>& by_id,
                                  const std::unordered_map<std::int64_t, ModelInput>& inputs,
                                  Target target) {
  std::vector<LabeledInput> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back({id, inputs.at(id), at(by_id.at(id)->labels, target)});
  return out;
}

}  // namespace

std::vector<std::int64_t> record_ids(std::span<const DatasetRecord> records) {
  std::vector<std::int64_t> ids;
  for (const auto& r : records) ids.push_back(r.id);
  return ids;
}

std::vector<SplitAssignment> make_splits(const std::vector<std::int64_t>& ids, SplitSizes sizes,
                                         int n_resplits, std::uint64_t seed) {
  if (sizes.train < 1 || sizes.val < 1 || sizes.test < 1)
    throw InvalidArgument("split sizes must be positive");
  if (n_resplits < 1) throw InvalidArgument("need at least one resplit");
  if (static_cast<std::size_t>(sizes.total()) > ids.size())
    throw InvalidArgument("split sizes need " + std::to_string(sizes.total()) + " records but only " +
                          std::to_string(ids.size()) + " are available");
  std::vector<std::int64_t> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgument("record ids must be unique");
  std::vector<SplitAssignment> out;
  for (int r = 0; r < n_resplits; ++r) {
    std::vector<std::int64_t> order = sorted;
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    std::shuffle(order.begin(), order.end(), rng);
    SplitAssignment s;
    s.resplit = r;
    s.train.assign(order.begin(), order.begin() + sizes.train);
    s.val.assign(order.begin() + sizes.train, order.begin() + sizes.train + sizes.val);
    s.test.assign(order.begin() + sizes.train + sizes.val, order.begin() + sizes.total());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    out.push_back(std::move(s));
  }
  return out;
}

TargetValues run_baseline(std::span<const DatasetRecord> records, Quality tier,
                          const std::vector<std::int64_t>& test_ids) {
  if (test_ids.empty()) throw InvalidArgument("baseline needs at least one test record");
  std::unordered_map<std::int64_t, const DatasetRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  TargetValues sum{};
  for (auto id : test_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw InvalidArgument("test id " + std::to_string(id) + " not in dataset");
    const auto& rec = *it->second;
    const TargetValues pred = aggregate_labels(rec.ensemble(tier)).values;
    for (std::size_t t = 0; t < 4; ++t) sum[t] += std::abs(pred[t] - rec.labels[t]);
  }
  for (double& v : sum) v /= static_cast<double>(test_ids.size());
  return sum;
}

std::string CellKey::name() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s-m%02d-r%d-n%d", std::string(to_string(target)).c_str(), model_id,
                resplit, train_size);
  return buf;
}

std::vector<CellKey> planned_cells(const BenchSettings& s) {
  std::vector<CellKey> out;
  std::set<int> model_set(s.models.begin(), s.models.end());
  std::vector<int> group_models(model_set.begin(), model_set.end());
  const bool curve = !s.curve_sizes.empty();
  if (curve && !model_set.count(s.curve_model)) {
    group_models.push_back(s.curve_model);
    std::sort(group_models.begin(), group_models.end());
  }
  for (Target t : s.targets)
    for (int m : group_models)
      for (int r = 0; r < s.resplits; ++r) {
        if (curve && m == s.curve_model) {
          std::set<int> sizes(s.curve_sizes.begin(), s.curve_sizes.end());
          for (int n : sizes)
            if (n < s.sizes.train) out.push_back({t, m, r, n});
        }
        out.push_back({t, m, r, s.sizes.train});
      }
  return out;
}

CellData cell_data(std::span<const DatasetRecord> records, const SplitAssignment& split,
                   const ModelConfig& config, std::uint64_t input_seed, int train_size,
                   TierNoise mid, TierNoise low) {
  if (train_size < 1 || train_size > static_cast<int>(split.train.size()))
    throw InvalidArgument("train size " + std::to_string(train_size) + " outside 1.." +
                          std::to_string(split.train.size()));
  std::unordered_map<std::int64_t, const DatasetRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::unordered_map<std::int64_t, ModelInput> inputs;
  const std::vector<std::int64_t> train_ids(split.train.begin(), split.train.begin() + train_size);
  for (const auto* ids : {&train_ids, &split.val, &split.test})
    for (auto id : *ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw InvalidArgument("split id " + std::to_string(id) + " not in dataset");
      inputs.emplace(id, build_model_input(*it->second, config, input_seed, mid, low));
    }
  return {labeled(train_ids, by_id, inputs, config.target), labeled(split.val, by_id, inputs, config.target),
          labeled(split.test, by_id, inputs, config.target)};
}

ModelConfig cell_config(const BenchSettings& settings, const CellKey& key) {
  return ModelConfig::from_id(key.model_id, key.target,
                              derive_seed(settings.train_seed, {static_cast<std::uint64_t>(key.target),
                                                                static_cast<std::uint64_t>(key.model_id),
                                                                static_cast<std::uint64_t>(key.resplit),
                                                                static_cast<std::uint64_t>(key.train_size)}));
}

CellFit train_cell(std::span<const DatasetRecord> records, const SplitAssignment& split,
                   const BenchSettings& settings, const CellKey& key) {
  settings.validate();
  if (key.resplit != split.resplit) throw InvalidArgument("cell resplit does not match the split");
  const ModelConfig config = cell_config(settings, key);
  const CellData d = cell_data(records, split, config, settings.input_seed, key.train_size,
                               settings.data.mid_noise, settings.data.low_noise);
  CellFit out;
  out.result.key = key;
  try {
    TrainResult fit = train(config, d.train, d.val, settings.hyper);
    out.result.test_mae = mean_absolute_error(fit.model, d.test);
    out.result.val_mae = fit.log.best_val_mae;
    out.result.best_epoch = fit.log.best_epoch;
    out.result.epochs = static_cast<int>(fit.log.epochs.size());
    out.result.ok = std::isfinite(out.result.test_mae);
    if (!out.result.ok) out.result.error = "non-finite test MAE";
    out.model = std::move(fit.model);
  } catch (const NumericError& e) {
    out.result.error = e.what();
  }
  return out;
}

ExperimentReport run_matrix(std::span<const DatasetRecord> records,
                            const std::vector<SplitAssignment>& splits,
                            const BenchSettings& settings, const MatrixOptions& options) {
  settings.validate();
  if (static_cast<int>(splits.size()) < settings.resplits)
    throw InvalidArgument("fewer splits than requested resplits");
  std::unordered_map<std::int64_t, const DatasetRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  for (const auto& s : splits) {
    if (static_cast<int>(s.train.size()) != settings.sizes.train ||
        static_cast<int>(s.val.size()) != settings.sizes.val ||
        static_cast<int>(s.test.size()) != settings.sizes.test)
      throw InvalidArgument("split sizes do not match the settings");
    std::set<std::int64_t> seen;
    for (const auto* part : {&s.train, &s.val, &s.test})
      for (auto id : *part) {
        if (!by_id.count(id)) throw InvalidArgument("split id " + std::to_string(id) + " not in dataset");
        if (!seen.insert(id).second)
          throw InvalidArgument("record " + std::to_string(id) + " appears in two split parts");
      }
  }
  if (!options.cell_dir.empty()) std::filesystem::create_directories(options.cell_dir);

  ExperimentReport report;
  report.sizes = settings.sizes;
  auto wanted = [&](int r) {
    return options.resplits.empty() ||
           std::find(options.resplits.begin(), options.resplits.end(), r) != options.resplits.end();
  };
  for (int r : options.resplits)
    if (r < 0 || r >= settings.resplits) throw InvalidArgument("resplit " + std::to_string(r) + " out of range");
  for (Quality tier : {Quality::Mid, Quality::Low})
    for (int r = 0; r < settings.resplits; ++r) {
      if (!wanted(r)) continue;
      const TargetValues mae = run_baseline(records, tier, splits[r].test);
      for (Target t : settings.targets) report.baselines.push_back({tier, t, r, at(mae, t)});
    }

  std::vector<CellKey> keys;
  for (const auto& k : planned_cells(settings))
    if (wanted(k.resplit)) keys.push_back(k);
  report.cells.resize(keys.size());
  // Cells sharing (target, model) share their model inputs.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j].target == keys[i].target && keys[j].model_id == keys[i].model_id) ++j;
    groups.push_back({i, j});
    i = j;
  }
  const std::string fp = fingerprint(settings);
  const auto mid = settings.data.mid_noise, low = settings.data.low_noise;
  std::mutex callback_mutex;

  auto run_group = [&](std::size_t g) {
    const auto [lo, hi] = groups[g];
    std::unordered_map<std::int64_t, ModelInput> inputs;
    bool inputs_ready = false;
    std::string input_error;
    for (std::size_t i = lo; i < hi; ++i) {
      const CellKey& key = keys[i];
      const auto cell_path = options.cell_dir.empty() ? std::filesystem::path{}
                                                      : options.cell_dir / (key.name() + ".json");
      if (options.resume && !cell_path.empty()) {
        if (auto done = read_cell_file(cell_path, key, fp)) {
          report.cells[i] = *done;
          if (options.on_cell) {
            std::lock_guard lock(callback_mutex);
            options.on_cell(*done, true, 0.0);
          }
          continue;
        }
      }
      const auto start = std::chrono::steady_clock::now();
      CellResult res;
      res.key = key;
      try {
        const ModelConfig config = cell_config(settings, key);
        if (!inputs_ready) {
          inputs_ready = true;
          try {
            for (const auto& rec : records)
              inputs.emplace(rec.id, build_model_input(rec, config, settings.input_seed, mid, low));
          } catch (const std::exception& e) {
            input_error = e.what();
          }
        }
        if (!input_error.empty()) throw InvalidArgument("building model inputs failed: " + input_error);
        const SplitAssignment& split = splits[key.resplit];
        const std::vector<std::int64_t> train_ids(split.train.begin(), split.train.begin() + key.train_size);
        const auto tr = labeled(train_ids, by_id, inputs, key.target);
        const auto va = labeled(split.val, by_id, inputs, key.target);
        const auto te = labeled(split.test, by_id, inputs, key.target);
        const TrainResult fit = train(config, tr, va, settings.hyper);
        res.test_mae = mean_absolute_error(fit.model, te);
        res.val_mae = fit.log.best_val_mae;
        res.best_epoch = fit.log.best_epoch;
        res.epochs = static_cast<int>(fit.log.epochs.size());
        res.ok = std::isfinite(res.test_mae);
        if (!res.ok) res.error = "non-finite test MAE";
      } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
      }
      if (!cell_path.empty()) write_text_atomic(cell_path, cell_file_json(res, fp));
      report.cells[i] = res;
      if (options.on_cell) {
        std::lock_guard lock(callback_mutex);
        options.on_cell(res, false,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(groups.size())));
  if (jobs == 1) {
    for (std::size_t g = 0; g < groups.size(); ++g) run_group(g);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (std::size_t g; (g = next.fetch_add(1)) < groups.size();) {
          try {
            run_group(g);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  return report;
}

std::vector<TrendCheck> evaluate_trends(const ExperimentReport& report, double tol) {
  std::map<std::pair<Target, int>, double> mae;
  for (const auto& r : model_rows(report))
    if (r.n_ok == r.n_cells && r.n_ok > 0) mae[{r.target, r.model_id}] = r.mae;
  std::set<Target> targets;
  for (const auto& c : report.cells) targets.insert(c.key.target);
  std::vector<TrendCheck> out;
  char buf[256];
  auto get = [&](Target t, int m) -> std::optional<double> {
    auto it = mae.find({t, m});
    return it == mae.end() ? std::nullopt : std::optional<double>(it->second);
  };
  for (Target t : targets) {
    const std::string tn(to_string(t));
    const auto m1 = get(t, 1), m2 = get(t, 2), m3 = get(t, 3), m4 = get(t, 4), m5 = get(t, 5),
               m6 = get(t, 6), m8 = get(t, 8), m9 = get(t, 9), m14 = get(t, 14);
    if (m1 && m4) {
      std::snprintf(buf, sizeof buf, "#1 %.4f < #4 %.4f", *m1, *m4);
      out.push_back({"(a) active beats random [" + tn + "]", true, *m1 < *m4, buf});
    }
    if (m1 && m2 && m3) {
      int ties = 0;
      bool ok = true;
      for (auto [lhs, rhs] : {std::pair{*m1, *m2}, std::pair{*m2, *m3}}) {
        if (lhs <= rhs) continue;
        if (lhs <= rhs * (1.0 + tol)) ++ties;
        else ok = false;
      }
      ok = ok && ties <= 1;
      std::snprintf(buf, sizeof buf, "#1 %.4f <= #2 %.4f <= #3 %.4f (ties %d)", *m1, *m2, *m3, ties);
      out.push_back({"(b) corrupted active degrades [" + tn + "]", true, ok, buf});
    }
    if (m1 && m4 && m14) {
      std::snprintf(buf, sizeof buf, "#1 %.4f <= #14 %.4f <= #4 %.4f", *m1, *m14, *m4);
      out.push_back({"(c) decoy set between active and random [" + tn + "]", true,
                     *m1 <= *m14 && *m14 <= *m4, buf});
    }
    // (d): cheap-ensemble baselines against learning-curve points with <= 200 training molecules.
    double worst_baseline = -1.0;
    for (const auto& b : baseline_summary(report))
      if (b.target == t) worst_baseline = std::max(worst_baseline, b.mae);
    double best_small = std::numeric_limits<double>::infinity();
    int n_small = 0;
    for (const auto& p : learning_curve(report))
      if (p.target == t && p.train_size <= 200 && p.n_ok > 0) {
        best_small = std::min(best_small, p.mae);
        ++n_small;
      }
    if (worst_baseline >= 0.0 && n_small > 0) {
      std::snprintf(buf, sizeof buf, "baseline %.4f < best surrogate %.4f (%d points)", worst_baseline,
                    best_small, n_small);
      out.push_back({"(d) cheap-ensemble baseline beats small-data surrogates [" + tn + "]", false,
                     worst_baseline < best_small, buf});
    }
    if (m5 && m6 && m8 && m9) {
      std::snprintf(buf, sizeof buf, "#8 %.4f vs #5 %.4f, #9 %.4f vs #6 %.4f", *m8, *m5, *m9, *m6);
      out.push_back({"(e) augmentation does not hurt [" + tn + "]", false,
                     *m8 <= *m5 * (1.0 + tol) && *m9 <= *m6 * (1.0 + tol), buf});
    }
  }
  return out;
}

}  // namespace confq
