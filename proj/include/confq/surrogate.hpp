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

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "confq/ensemble.hpp"
#include "confq/featurizer.hpp"
#include "confq/mlp.hpp"
#include "confq/molecule.hpp"

namespace confq {

enum class InputKind { Active, Random, RandomAugmented, Set, DecoySet };

std::string to_string(InputKind k);
InputKind parse_input_kind(const std::string& s);

inline constexpr int kModelCount = 14;
inline constexpr int kSetSize = 10;

struct ModelConfig {
  int model_id = 1;
  InputKind input_kind = InputKind::Active;
  Quality quality = Quality::Exact;
  int n_c = 1;
  Target target = Target::LMin;
  std::uint64_t seed = 0;

  /// Row `model_id` (1..14) of the model taxonomy.
  static ModelConfig from_id(int model_id, Target target, std::uint64_t seed = 0);
  bool uses_gate() const {
    return input_kind == InputKind::Set || input_kind == InputKind::DecoySet;
  }
  /// Throws InvalidArgument unless kind, tier and n_c agree with the taxonomy row.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct Hyperparams {
  int hidden = 64;
  int perm_layers = 2;
  int bond_layers = 3;
  int gate_layers = 3;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 32;
  int max_epochs = 2000;
  int patience = 300;

  void validate() const;
  bool operator==(const Hyperparams&) const = default;
};

struct EncoderParams {
  Mlp f_perm;  // (h_a, h_b) -> h_perm
  Mlp f_bond;  // h_bond or h_ensemble -> y
  Mlp f_gate;  // h_bond -> logit; empty for single-conformer models

  bool has_gate() const { return !f_gate.empty(); }
  int atom_dim() const { return f_perm.in_dim() / 2; }
  int perm_dim() const { return f_perm.out_dim(); }
  int bond_dim() const { return f_bond.in_dim(); }
  std::vector<double> flatten() const;
  void assign(const std::vector<double>& flat);
  Eigen::Index parameter_count() const;
  void validate() const;
};

EncoderParams make_encoder(int atom_dim, int pooled_dim, const Hyperparams& hp, bool gate, Rng& rng);
EncoderParams zeros_like(const EncoderParams& like);

/// Standardized encoder inputs of one conformer.
struct EncodedConformer {
  Eigen::RowVectorXd h_a;
  Eigen::RowVectorXd h_b;
  Eigen::RowVectorXd pooled;
};
using EncodedSet = std::vector<EncodedConformer>;

Eigen::RowVectorXd encode_perm(const EncoderParams& p, const Eigen::RowVectorXd& h_a,
                               const Eigen::RowVectorXd& h_b);
/// h_bond = (f_perm(h_a, h_b) + f_perm(h_b, h_a), pooled).
Eigen::RowVectorXd encode_bond(const EncoderParams& p, const EncodedConformer& x);
/// Same, from per-atom rows: h_a = rows a, h_b = row b, pooled = column sums.
Eigen::RowVectorXd encode_bond(const EncoderParams& p, const Eigen::MatrixXd& h_atoms, int a, int b);

struct SetEncoding {
  Eigen::RowVectorXd h_ensemble;
  Eigen::VectorXd alpha;
};

/// Softmax-gated combination of bond encodings.
SetEncoding encode_set(const EncoderParams& p, const std::vector<Eigen::RowVectorXd>& h_bonds);

/// y for one input set: gated when the encoder has a gate, otherwise the
/// set must hold exactly one conformer.
double forward(const EncoderParams& p, const EncodedSet& input);

struct TrainingExample {
  const EncodedSet* input = nullptr;
  double target = 0.0;
};

/// Batch-mean squared error and its gradient, accumulated into `grad`
/// (which must match `p` in shape). Throws NumericError naming the first
/// non-finite parameter or activation.
double loss_and_gradients(const EncoderParams& p, std::span<const TrainingExample> batch,
                          EncoderParams& grad);

/// Train-split feature statistics; zero spread maps to unit scale.
struct FeatureScaler {
  Eigen::RowVectorXd atom_mean, atom_scale;
  Eigen::RowVectorXd pooled_mean, pooled_scale;

  static FeatureScaler identity(int atom_dim, int pooled_dim);
  static FeatureScaler fit(const std::vector<const BondFeatures*>& samples);
  EncodedConformer apply(const BondFeatures& f) const;
};

/// Views of one molecule. Active/Random: one view of one conformer.
/// RandomAugmented: n_c single-conformer views. Set/DecoySet: one view of
/// n_c conformers.
struct ModelInput {
  std::vector<std::vector<BondFeatures>> views;
};

/// Builds the encoder input a model of `config` sees for `record`; all
/// sampling and corruption streams derive from (data_seed, record.id).
ModelInput build_model_input(const DatasetRecord& record, const ModelConfig& config,
                             std::uint64_t data_seed, TierNoise mid = kMidTierNoise,
                             TierNoise low = kLowTierNoise);
/// Throws InvalidArgument when the view layout does not fit the input kind.
void check_input_shape(const ModelConfig& config, const ModelInput& input);

struct Model {
  ModelConfig config;
  Hyperparams hyper;
  FeatureScaler scaler;
  EncoderParams params;
};

/// Mean prediction over the input's views.
double predict(const Model& model, const ModelInput& input);

struct LabeledInput {
  std::int64_t id = 0;
  ModelInput input;
  double target = 0.0;
};

struct EpochLog {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mae = 0.0;
  bool operator==(const EpochLog&) const = default;
};

struct TrainingLog {
  std::vector<EpochLog> epochs;
  int best_epoch = -1;
  double best_val_mae = 0.0;
  bool early_stopped = false;
};

struct TrainResult {
  Model model;
  TrainingLog log;
};

/// Adam on minibatches; returns the parameters of the epoch with the lowest
/// validation MAE. RandomAugmented inputs cycle one view per epoch.
TrainResult train(const ModelConfig& config, const std::vector<LabeledInput>& train_set,
                  const std::vector<LabeledInput>& val_set, const Hyperparams& hp);

double mean_absolute_error(const Model& model, const std::vector<LabeledInput>& data);

inline constexpr int kCheckpointVersion = 1;

std::string checkpoint_json(const Model& model);
Model model_from_checkpoint(const std::string& json_text);
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

}  // namespace confq
