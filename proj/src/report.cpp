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


#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <sstream>

#include "confq/bench.hpp"
#include "confq/error.hpp"

namespace confq {
namespace {

using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

json num_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double num_from(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

int target_rank(Target t) { return static_cast<int>(t); }

}  // namespace

std::vector<ModelRow> model_rows(const ExperimentReport& report) {
  struct Acc {
    double sum = 0.0;
    int ok = 0, n = 0;
  };
  std::map<std::pair<int, int>, Acc> acc;
  for (const auto& c : report.cells) {
    if (c.key.train_size != report.sizes.train) continue;
    auto& a = acc[{target_rank(c.key.target), c.key.model_id}];
    ++a.n;
    if (c.ok) {
      a.sum += c.test_mae;
      ++a.ok;
    }
  }
  std::vector<ModelRow> rows;
  for (const auto& [k, a] : acc)
    rows.push_back({static_cast<Target>(k.first), k.second, a.ok ? a.sum / a.ok : kNaN, kNaN, a.ok, a.n});
  for (auto& r : rows) {
    for (const auto& ref : rows)
      if (ref.target == r.target && ref.model_id == 1 && std::isfinite(ref.mae) && ref.mae > 0.0 &&
          std::isfinite(r.mae))
        r.relative_error_pct = 100.0 * (r.mae - ref.mae) / ref.mae;
    if (r.model_id == 1 && std::isfinite(r.mae)) r.relative_error_pct = 0.0;
  }
  return rows;
}

std::vector<CurvePoint> learning_curve(const ExperimentReport& report) {
  // Models trained at more than one size form curves.
  std::map<std::pair<int, int>, std::map<int, std::pair<double, int>>> acc;
  for (const auto& c : report.cells) {
    auto& p = acc[{target_rank(c.key.target), c.key.model_id}][c.key.train_size];
    if (c.ok) {
      p.first += c.test_mae;
      ++p.second;
    }
  }
  std::vector<CurvePoint> out;
  for (const auto& [k, sizes] : acc) {
    if (sizes.size() < 2) continue;
    for (const auto& [n, p] : sizes)
      out.push_back({static_cast<Target>(k.first), k.second, n, p.second ? p.first / p.second : kNaN, p.second});
  }
  return out;
}

std::vector<BaselineSummary> baseline_summary(const ExperimentReport& report) {
  std::map<std::pair<int, int>, std::pair<double, int>> acc;
  for (const auto& b : report.baselines) {
    auto& a = acc[{static_cast<int>(b.tier), target_rank(b.target)}];
    a.first += b.mae;
    ++a.second;
  }
  std::vector<BaselineSummary> out;
  for (const auto& [k, a] : acc)
    out.push_back({static_cast<Quality>(k.first), static_cast<Target>(k.second), a.first / a.second});
  return out;
}

bool all_cells_ok(const ExperimentReport& report) {
  for (const auto& c : report.cells)
    if (!c.ok) return false;
  return true;
}

std::string report_json(const ExperimentReport& report) {
  json j;
  j["schema_version"] = 1;
  j["sizes"] = {{"train", report.sizes.train}, {"val", report.sizes.val}, {"test", report.sizes.test}};
  // Informational; ignored when reading back.
  j["scale"] = {{"reference_sizes", {4056, 500, 1000}},
                {"train_ratio", std::round(1e4 * report.sizes.train / 4056.0) / 1e4},
                {"curve_grid", "desk-scale stand-in"}};
  j["cells"] = json::array();
  for (const auto& c : report.cells)
    j["cells"].push_back({{"target", std::string(to_string(c.key.target))},
                          {"model_id", c.key.model_id},
                          {"resplit", c.key.resplit},
                          {"train_size", c.key.train_size},
                          {"ok", c.ok},
                          {"test_mae", num_json(c.test_mae)},
                          {"val_mae", num_json(c.val_mae)},
                          {"best_epoch", c.best_epoch},
                          {"epochs", c.epochs},
                          {"error", c.error}});
  j["baselines"] = json::array();
  for (const auto& b : report.baselines)
    j["baselines"].push_back({{"tier", std::string(to_string(b.tier))},
                              {"target", std::string(to_string(b.target))},
                              {"resplit", b.resplit},
                              {"mae", num_json(b.mae)}});
  return j.dump(1);
}

ExperimentReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != 1) throw SchemaError("unsupported report schema_version");
    ExperimentReport r;
    r.sizes = {j.at("sizes").at("train").get<int>(), j.at("sizes").at("val").get<int>(),
               j.at("sizes").at("test").get<int>()};
    for (const auto& c : j.at("cells")) {
      CellResult x;
      x.key = {parse_target(c.at("target").get<std::string>()), c.at("model_id").get<int>(),
               c.at("resplit").get<int>(), c.at("train_size").get<int>()};
      x.ok = c.at("ok").get<bool>();
      x.test_mae = num_from(c.at("test_mae"));
      x.val_mae = num_from(c.at("val_mae"));
      x.best_epoch = c.at("best_epoch").get<int>();
      x.epochs = c.at("epochs").get<int>();
      x.error = c.at("error").get<std::string>();
      r.cells.push_back(std::move(x));
    }
    for (const auto& b : j.at("baselines"))
      r.baselines.push_back({parse_quality(b.at("tier").get<std::string>()),
                             parse_target(b.at("target").get<std::string>()), b.at("resplit").get<int>(),
                             num_from(b.at("mae"))});
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed report: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("malformed report: ") + e.what());
  }
}

std::string report_csv(const ExperimentReport& report) {
  std::string out = "target,model_id,input_kind,quality,n_c,metric,value\n";
  for (const auto& r : model_rows(report)) {
    const auto c = ModelConfig::from_id(r.model_id, r.target);
    const std::string prefix = std::string(to_string(r.target)) + "," + std::to_string(r.model_id) + "," +
                               to_string(c.input_kind) + "," + std::string(to_string(c.quality)) + "," +
                               std::to_string(c.n_c) + ",";
    out += prefix + "test_mae," + num(r.mae) + "\n";
    out += prefix + "relative_error_pct," + num(r.relative_error_pct) + "\n";
  }
  return out;
}

std::string learning_curve_csv(const ExperimentReport& report) {
  std::string out = "target,model_id,train_size,test_mae,n_ok\n";
  for (const auto& p : learning_curve(report))
    out += std::string(to_string(p.target)) + "," + std::to_string(p.model_id) + "," +
           std::to_string(p.train_size) + "," + num(p.mae) + "," + std::to_string(p.n_ok) + "\n";
  return out;
}

std::string baseline_csv(const ExperimentReport& report) {
  std::string out = "tier,target,test_mae\n";
  for (const auto& b : baseline_summary(report))
    out += std::string(to_string(b.tier)) + "," + std::string(to_string(b.target)) + "," + num(b.mae) + "\n";
  return out;
}

std::string cells_csv(const ExperimentReport& report) {
  std::string out = "target,model_id,resplit,train_size,status,test_mae,val_mae,best_epoch,epochs,error\n";
  for (const auto& c : report.cells) {
    std::string err = c.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    out += std::string(to_string(c.key.target)) + "," + std::to_string(c.key.model_id) + "," +
           std::to_string(c.key.resplit) + "," + std::to_string(c.key.train_size) + "," +
           (c.ok ? "ok" : "failed") + "," + (c.ok ? num(c.test_mae) : "NA") + "," +
           (c.ok ? num(c.val_mae) : "NA") + "," + std::to_string(c.best_epoch) + "," +
           std::to_string(c.epochs) + "," + err + "\n";
  }
  return out;
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "report.json", report_json(report) + "\n");
  write_file(dir / "report.csv", report_csv(report));
  write_file(dir / "learning_curve.csv", learning_curve_csv(report));
  write_file(dir / "baseline.csv", baseline_csv(report));
  write_file(dir / "cells.csv", cells_csv(report));
}

ExperimentReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

ExperimentReport merge_reports(const std::vector<ExperimentReport>& reports) {
  ExperimentReport out;
  if (reports.empty()) return out;
  out.sizes = reports.front().sizes;
  std::map<std::tuple<int, int, int, int>, CellResult> cells;
  std::map<std::tuple<int, int, int>, BaselineRow> baselines;
  for (const auto& r : reports) {
    if (!(r.sizes == out.sizes)) throw InvalidArgument("cannot merge reports with different split sizes");
    for (const auto& c : r.cells)
      cells[{target_rank(c.key.target), c.key.model_id, c.key.resplit, c.key.train_size}] = c;
    for (const auto& b : r.baselines)
      baselines[{static_cast<int>(b.tier), target_rank(b.target), b.resplit}] = b;
  }
  for (auto& [k, c] : cells) out.cells.push_back(c);
  for (auto& [k, b] : baselines) out.baselines.push_back(b);
  return out;
}

}  // namespace confq
