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


#include <fstream>
#include <json.hpp>
#include <sstream>

#include "confq/error.hpp"
#include "confq/surrogate.hpp"

namespace confq {
namespace {

using nlohmann::json;

json row_json(const Eigen::RowVectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::RowVectorXd row_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mlp_json(const Mlp& mlp) {
  json layers = json::array();
  for (const auto& l : mlp.layers) {
    json w = json::array();
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) w.push_back(row_json(l.weight.row(r)));
    layers.push_back({{"weight", w}, {"bias", row_json(l.bias)}});
  }
  return layers;
}

Mlp mlp_from(const json& j) {
  Mlp m;
  for (const auto& l : j) {
    const auto& w = l.at("weight");
    DenseLayer d;
    d.bias = row_from(l.at("bias"));
    d.weight.resize(static_cast<Eigen::Index>(w.size()), d.bias.size());
    for (std::size_t r = 0; r < w.size(); ++r) {
      const Eigen::RowVectorXd row = row_from(w[r]);
      if (row.size() != d.bias.size()) throw SchemaError("checkpoint weight row has the wrong length");
      d.weight.row(static_cast<Eigen::Index>(r)) = row;
    }
    m.layers.push_back(std::move(d));
  }
  return m;
}

}  // namespace

std::string checkpoint_json(const Model& model) {
  const ModelConfig& c = model.config;
  const Hyperparams& h = model.hyper;
  json j;
  j["schema_version"] = kCheckpointVersion;
  j["config"] = {{"model_id", c.model_id},       {"input_kind", to_string(c.input_kind)},
                 {"quality", std::string(to_string(c.quality))}, {"n_c", c.n_c},
                 {"target", std::string(to_string(c.target))},   {"seed", c.seed}};
  j["hyperparams"] = {{"hidden", h.hidden},           {"perm_layers", h.perm_layers},
                      {"bond_layers", h.bond_layers}, {"gate_layers", h.gate_layers},
                      {"learning_rate", h.learning_rate}, {"beta1", h.beta1},
                      {"beta2", h.beta2},             {"epsilon", h.epsilon},
                      {"batch_size", h.batch_size},   {"max_epochs", h.max_epochs},
                      {"patience", h.patience}};
  j["scaler"] = {{"atom_mean", row_json(model.scaler.atom_mean)},
                 {"atom_scale", row_json(model.scaler.atom_scale)},
                 {"pooled_mean", row_json(model.scaler.pooled_mean)},
                 {"pooled_scale", row_json(model.scaler.pooled_scale)}};
  j["f_perm"] = mlp_json(model.params.f_perm);
  j["f_bond"] = mlp_json(model.params.f_bond);
  j["f_gate"] = mlp_json(model.params.f_gate);
  return j.dump();
}

Model model_from_checkpoint(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kCheckpointVersion)
      throw SchemaError("unsupported checkpoint schema_version " + j.at("schema_version").dump());
    Model m;
    const json& c = j.at("config");
    m.config.model_id = c.at("model_id").get<int>();
    m.config.input_kind = parse_input_kind(c.at("input_kind").get<std::string>());
    m.config.quality = parse_quality(c.at("quality").get<std::string>());
    m.config.n_c = c.at("n_c").get<int>();
    m.config.target = parse_target(c.at("target").get<std::string>());
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.validate();
    const json& h = j.at("hyperparams");
    m.hyper.hidden = h.at("hidden").get<int>();
    m.hyper.perm_layers = h.at("perm_layers").get<int>();
    m.hyper.bond_layers = h.at("bond_layers").get<int>();
    m.hyper.gate_layers = h.at("gate_layers").get<int>();
    m.hyper.learning_rate = h.at("learning_rate").get<double>();
    m.hyper.beta1 = h.at("beta1").get<double>();
    m.hyper.beta2 = h.at("beta2").get<double>();
    m.hyper.epsilon = h.at("epsilon").get<double>();
    m.hyper.batch_size = h.at("batch_size").get<int>();
    m.hyper.max_epochs = h.at("max_epochs").get<int>();
    m.hyper.patience = h.at("patience").get<int>();
    const json& s = j.at("scaler");
    m.scaler.atom_mean = row_from(s.at("atom_mean"));
    m.scaler.atom_scale = row_from(s.at("atom_scale"));
    m.scaler.pooled_mean = row_from(s.at("pooled_mean"));
    m.scaler.pooled_scale = row_from(s.at("pooled_scale"));
    m.params.f_perm = mlp_from(j.at("f_perm"));
    m.params.f_bond = mlp_from(j.at("f_bond"));
    m.params.f_gate = mlp_from(j.at("f_gate"));
    m.params.validate();
    if (m.params.has_gate() != m.config.uses_gate())
      throw SchemaError("checkpoint gate network does not match the model kind");
    if (m.scaler.atom_mean.size() != m.params.atom_dim() ||
        m.scaler.pooled_mean.size() != m.params.bond_dim() - m.params.perm_dim())
      throw SchemaError("checkpoint scaler does not match the encoder dimensions");
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed checkpoint: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("invalid checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << checkpoint_json(model) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_checkpoint(ss.str());
}

}  // namespace confq
