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


#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "confq/bench.hpp"
#include "confq/elements.hpp"
#include "confq/error.hpp"

namespace confq {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long to_int(const std::string& v) {
  long long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw InvalidArgument("invalid integer '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw InvalidArgument("invalid unsigned integer '" + v + "'");
  return x;
}

double to_double(const std::string& v) {
  double x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw InvalidArgument("invalid number '" + v + "'");
  return x;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& xs, std::function<std::string(const T&)> f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + f(xs[i]);
  return out;
}

struct Field {
  const char* key;
  std::function<std::string(const BenchSettings&)> get;
  std::function<void(BenchSettings&, const std::string&)> set;
};

#define CONFQ_INT(name, expr) \
  Field{name, [](const BenchSettings& s) { return std::to_string(s.expr); }, \
        [](BenchSettings& s, const std::string& v) { s.expr = static_cast<int>(to_int(v)); }}
#define CONFQ_U64(name, expr) \
  Field{name, [](const BenchSettings& s) { return std::to_string(s.expr); }, \
        [](BenchSettings& s, const std::string& v) { s.expr = to_u64(v); }}
#define CONFQ_DBL(name, expr) \
  Field{name, [](const BenchSettings& s) { return fmt(s.expr); }, \
        [](BenchSettings& s, const std::string& v) { s.expr = to_double(v); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      CONFQ_U64("data.seed", data.seed),
      CONFQ_INT("data.min_chain", data.min_chain),
      CONFQ_INT("data.max_chain", data.max_chain),
      CONFQ_DBL("data.branch_probability", data.branch_probability),
      Field{"data.palette",
            [](const BenchSettings& s) {
              return join<int>(s.data.palette, [](const int& z) { return std::string(element(z).symbol); });
            },
            [](BenchSettings& s, const std::string& v) {
              s.data.palette.clear();
              for (const auto& sym : split_list(v)) {
                const auto* e = find_element(sym);
                if (!e) throw InvalidArgument("unknown element '" + sym + "'");
                s.data.palette.push_back(e->atomic_number);
              }
            }},
      CONFQ_INT("data.max_rotatable", data.max_rotatable),
      CONFQ_DBL("data.v1", data.torsion.v1),
      CONFQ_DBL("data.v2", data.torsion.v2),
      CONFQ_DBL("data.v3", data.torsion.v3),
      CONFQ_DBL("data.coefficient_spread", data.coefficient_spread),
      CONFQ_DBL("data.clash_k", data.clash.k),
      CONFQ_DBL("data.clash_d0", data.clash.d0),
      CONFQ_INT("data.clash_min_separation", data.clash.min_separation),
      CONFQ_DBL("data.mid_perturbation", data.mid_perturbation),
      CONFQ_DBL("data.low_perturbation", data.low_perturbation),
      CONFQ_INT("data.max_retries", data.max_retries),
      CONFQ_DBL("noise.mid_jitter", data.mid_noise.jitter_sigma),
      CONFQ_DBL("noise.mid_torsion", data.mid_noise.torsion_sigma),
      CONFQ_DBL("noise.low_jitter", data.low_noise.jitter_sigma),
      CONFQ_DBL("noise.low_torsion", data.low_noise.torsion_sigma),
      CONFQ_INT("split.train", sizes.train),
      CONFQ_INT("split.val", sizes.val),
      CONFQ_INT("split.test", sizes.test),
      CONFQ_INT("split.resplits", resplits),
      CONFQ_U64("split.seed", split_seed),
      Field{"matrix.models",
            [](const BenchSettings& s) { return join<int>(s.models, [](const int& m) { return std::to_string(m); }); },
            [](BenchSettings& s, const std::string& v) { s.models = parse_id_list(v); }},
      Field{"matrix.targets",
            [](const BenchSettings& s) {
              return join<Target>(s.targets, [](const Target& t) { return std::string(to_string(t)); });
            },
            [](BenchSettings& s, const std::string& v) {
              s.targets.clear();
              for (const auto& t : split_list(v)) s.targets.push_back(parse_target(t));
            }},
      Field{"curve.sizes",
            [](const BenchSettings& s) {
              return join<int>(s.curve_sizes, [](const int& n) { return std::to_string(n); });
            },
            [](BenchSettings& s, const std::string& v) {
              s.curve_sizes.clear();
              for (const auto& n : split_list(v)) s.curve_sizes.push_back(static_cast<int>(to_int(n)));
            }},
      CONFQ_INT("curve.model", curve_model),
      CONFQ_INT("train.hidden", hyper.hidden),
      CONFQ_INT("train.perm_layers", hyper.perm_layers),
      CONFQ_INT("train.bond_layers", hyper.bond_layers),
      CONFQ_INT("train.gate_layers", hyper.gate_layers),
      CONFQ_DBL("train.learning_rate", hyper.learning_rate),
      CONFQ_DBL("train.beta1", hyper.beta1),
      CONFQ_DBL("train.beta2", hyper.beta2),
      CONFQ_DBL("train.epsilon", hyper.epsilon),
      CONFQ_INT("train.batch_size", hyper.batch_size),
      CONFQ_INT("train.max_epochs", hyper.max_epochs),
      CONFQ_INT("train.patience", hyper.patience),
      CONFQ_U64("train.seed", train_seed),
      CONFQ_U64("input.seed", input_seed),
      CONFQ_INT("jobs", jobs),
  };
  return f;
}

#undef CONFQ_INT
#undef CONFQ_U64
#undef CONFQ_DBL

}  // namespace

Hyperparams BenchSettings::bench_hyperparams() {
  Hyperparams h;
  h.learning_rate = 1e-3;
  h.max_epochs = 60;
  h.patience = 15;
  return h;
}

void BenchSettings::validate() const {
  data.validate();
  hyper.validate();
  if (sizes.train < 1 || sizes.val < 1 || sizes.test < 1) throw InvalidArgument("split sizes must be positive");
  if (resplits < 1) throw InvalidArgument("split.resplits must be at least 1");
  if (models.empty()) throw InvalidArgument("matrix.models is empty");
  for (int m : models)
    if (m < 1 || m > kModelCount) throw InvalidArgument("model id " + std::to_string(m) + " out of range");
  if (targets.empty()) throw InvalidArgument("matrix.targets is empty");
  if (std::set<Target>(targets.begin(), targets.end()).size() != targets.size())
    throw InvalidArgument("matrix.targets lists a target twice");
  if (curve_model < 1 || curve_model > kModelCount) throw InvalidArgument("curve.model out of range");
  for (int n : curve_sizes)
    if (n < 1) throw InvalidArgument("curve sizes must be positive");
  if (jobs < 1) throw InvalidArgument("jobs must be at least 1");
  for (const auto& t : {data.mid_noise, data.low_noise})
    if (!(t.jitter_sigma >= 0.0) || !(t.torsion_sigma >= 0.0)) throw InvalidArgument("tier noise must be non-negative");
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(static_cast<int>(to_int(item)));
      continue;
    }
    const int lo = static_cast<int>(to_int(trim(item.substr(0, dash))));
    const int hi = static_cast<int>(to_int(trim(item.substr(dash + 1))));
    if (hi < lo) throw InvalidArgument("descending range '" + item + "'");
    for (int i = lo; i <= hi; ++i) out.push_back(i);
  }
  if (out.empty()) throw InvalidArgument("empty id list");
  std::set<int> uniq(out.begin(), out.end());
  return {uniq.begin(), uniq.end()};
}

BenchSettings parse_settings(const std::string& text) {
  BenchSettings s;
  std::istringstream in(text);
  std::set<std::string> seen;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& f : fields())
      if (key == f.key) field = &f;
    if (!field) throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    try {
      field->set(s, value);
    } catch (const InvalidArgument& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + key + ": " + e.what());
    }
  }
  s.validate();
  return s;
}

std::string get_setting(const BenchSettings& settings, const std::string& key) {
  for (const auto& f : fields())
    if (key == f.key) return f.get(settings);
  throw InvalidArgument("unknown key '" + key + "'");
}

void set_setting(BenchSettings& settings, const std::string& key, const std::string& value) {
  for (const auto& f : fields())
    if (key == f.key) {
      BenchSettings copy = settings;
      try {
        f.set(copy, trim(value));
      } catch (const InvalidArgument& e) {
        throw InvalidArgument(key + ": " + e.what());
      }
      copy.validate();
      settings = std::move(copy);
      return;
    }
  throw InvalidArgument("unknown key '" + key + "'");
}

BenchSettings load_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_settings(ss.str());
}

std::string settings_text(const BenchSettings& s) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(s) + "\n";
  return out;
}

}  // namespace confq
