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


#include "confq/surrogate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "confq/ensemble.hpp"
#include "confq/error.hpp"

namespace confq {
namespace {

struct TaxonomyRow {
  InputKind kind;
  Quality quality;
  int n_c;
};

constexpr std::array<TaxonomyRow, kModelCount> kTaxonomy{{
    {InputKind::Active, Quality::Exact, 1},
    {InputKind::Active, Quality::Mid, 1},
    {InputKind::Active, Quality::Low, 1},
    {InputKind::Random, Quality::Exact, 1},
    {InputKind::Random, Quality::Mid, 1},
    {InputKind::Random, Quality::Low, 1},
    {InputKind::RandomAugmented, Quality::Exact, kSetSize},
    {InputKind::RandomAugmented, Quality::Mid, kSetSize},
    {InputKind::RandomAugmented, Quality::Low, kSetSize},
    {InputKind::Set, Quality::Mid, kSetSize},
    {InputKind::Set, Quality::Low, kSetSize},
    {InputKind::DecoySet, Quality::Low, kSetSize},
    {InputKind::DecoySet, Quality::Mid, kSetSize},
    {InputKind::DecoySet, Quality::Exact, kSetSize},
}};

void require_finite(const Eigen::MatrixXd& m, const EncoderParams& p, const char* where) {
  if (m.allFinite()) return;
  for (auto [mlp, name] : {std::pair{&p.f_perm, "f_perm"}, std::pair{&p.f_gate, "f_gate"},
                           std::pair{&p.f_bond, "f_bond"}}) {
    const std::string bad = first_nonfinite(*mlp, name);
    if (!bad.empty()) throw NumericError("non-finite parameter in " + bad);
  }
  throw NumericError(std::string("non-finite activation in ") + where);
}

// Batched forward state over all conformers of all sets in a batch.
struct BatchCache {
  std::vector<int> offsets;  // set s owns rows [offsets[s], offsets[s + 1])
  MlpTape perm_ab, perm_ba, gate, bond;
  Eigen::MatrixXd h_bond;  // conformers x bond_dim
  Eigen::VectorXd alpha;
  Eigen::VectorXd y;
};

void batch_forward(const EncoderParams& p, std::span<const EncodedSet* const> sets,
                   BatchCache& c) {
  c.offsets.assign(1, 0);
  for (const EncodedSet* s : sets) {
    if (s->empty()) throw InvalidArgument("empty conformer set");
    if (!p.has_gate() && s->size() != 1)
      throw InvalidArgument("a single-conformer model received a set of " +
                            std::to_string(s->size()));
    c.offsets.push_back(c.offsets.back() + static_cast<int>(s->size()));
  }
  const int m = c.offsets.back();
  const int da = p.atom_dim();
  const int dp = p.perm_dim();
  const int dpool = p.bond_dim() - dp;
  Eigen::MatrixXd x_ab(m, 2 * da), x_ba(m, 2 * da), pooled(m, dpool);
  int r = 0;
  for (const EncodedSet* s : sets) {
    for (const auto& x : *s) {
      if (x.h_a.size() != da || x.h_b.size() != da || x.pooled.size() != dpool)
        throw InvalidArgument("encoded conformer does not match the encoder dimensions");
      x_ab.row(r) << x.h_a, x.h_b;
      x_ba.row(r) << x.h_b, x.h_a;
      pooled.row(r) = x.pooled;
      ++r;
    }
  }
  c.h_bond.resize(m, dp + dpool);
  c.h_bond.leftCols(dp) = mlp_forward(p.f_perm, x_ab, &c.perm_ab) + mlp_forward(p.f_perm, x_ba, &c.perm_ba);
  c.h_bond.rightCols(dpool) = pooled;
  require_finite(c.h_bond, p, "f_perm output");

  const auto n = static_cast<Eigen::Index>(sets.size());
  Eigen::MatrixXd e;
  if (p.has_gate()) {
    const Eigen::VectorXd logits = mlp_forward(p.f_gate, c.h_bond, &c.gate).col(0);
    require_finite(logits, p, "f_gate output");
    c.alpha.resize(m);
    e = Eigen::MatrixXd::Zero(n, c.h_bond.cols());
    for (Eigen::Index s = 0; s < n; ++s) {
      const int lo = c.offsets[s], len = c.offsets[s + 1] - lo;
      const double top = logits.segment(lo, len).maxCoeff();
      double z = 0.0;
      for (int i = lo; i < lo + len; ++i) z += (c.alpha[i] = std::exp(logits[i] - top));
      for (int i = lo; i < lo + len; ++i) {
        c.alpha[i] /= z;
        e.row(s) += c.alpha[i] * c.h_bond.row(i);
      }
    }
  } else {
    e = c.h_bond;
  }
  c.y = mlp_forward(p.f_bond, e, &c.bond).col(0);
  require_finite(c.y, p, "f_bond output");
}

}  // namespace

std::string to_string(InputKind k) {
  switch (k) {
    case InputKind::Active: return "active";
    case InputKind::Random: return "random";
    case InputKind::RandomAugmented: return "random_augmented";
    case InputKind::Set: return "set";
    case InputKind::DecoySet: return "decoy_set";
  }
  return "?";
}

InputKind parse_input_kind(const std::string& s) {
  for (InputKind k : {InputKind::Active, InputKind::Random, InputKind::RandomAugmented,
                      InputKind::Set, InputKind::DecoySet})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown input kind '" + s + "'");
}

ModelConfig ModelConfig::from_id(int model_id, Target target, std::uint64_t seed) {
  if (model_id < 1 || model_id > kModelCount)
    throw InvalidArgument("model id must be in 1.." + std::to_string(kModelCount));
  const TaxonomyRow& row = kTaxonomy[model_id - 1];
  return {model_id, row.kind, row.quality, row.n_c, target, seed};
}

void ModelConfig::validate() const {
  const ModelConfig ref = from_id(model_id, target, seed);
  if (ref.input_kind != input_kind || ref.quality != quality || ref.n_c != n_c)
    throw InvalidArgument("model " + std::to_string(model_id) + " must be " +
                          to_string(ref.input_kind) + "/" + std::string(to_string(ref.quality)) +
                          " with n_c=" + std::to_string(ref.n_c));
}

void Hyperparams::validate() const {
  if (hidden < 1 || perm_layers < 1 || bond_layers < 1 || gate_layers < 1)
    throw InvalidArgument("layer sizes and counts must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw InvalidArgument("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0))
    throw InvalidArgument("invalid Adam moments");
  if (batch_size < 1 || max_epochs < 1 || patience < 1)
    throw InvalidArgument("batch size, epochs and patience must be positive");
}

std::vector<double> EncoderParams::flatten() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(parameter_count()));
  append_parameters(f_perm, out);
  append_parameters(f_bond, out);
  append_parameters(f_gate, out);
  return out;
}

void EncoderParams::assign(const std::vector<double>& flat) {
  if (static_cast<Eigen::Index>(flat.size()) != parameter_count())
    throw InvalidArgument("flat parameter vector has the wrong length");
  std::size_t off = assign_parameters(f_perm, flat, 0);
  off = assign_parameters(f_bond, flat, off);
  assign_parameters(f_gate, flat, off);
}

Eigen::Index EncoderParams::parameter_count() const {
  return f_perm.parameter_count() + f_bond.parameter_count() + f_gate.parameter_count();
}

void EncoderParams::validate() const {
  f_perm.validate("f_perm");
  f_bond.validate("f_bond");
  f_gate.validate("f_gate");
  if (f_perm.empty() || f_bond.empty()) throw InvalidArgument("f_perm and f_bond are required");
  if (f_perm.in_dim() % 2 != 0) throw InvalidArgument("f_perm input must hold two atoms");
  if (f_bond.out_dim() != 1) throw InvalidArgument("f_bond must output a scalar");
  if (f_bond.in_dim() <= perm_dim()) throw InvalidArgument("f_bond input lacks the pooled part");
  if (has_gate() && (f_gate.in_dim() != f_bond.in_dim() || f_gate.out_dim() != 1))
    throw InvalidArgument("f_gate must map h_bond to a scalar");
}

EncoderParams make_encoder(int atom_dim, int pooled_dim, const Hyperparams& hp, bool gate,
                           Rng& rng) {
  hp.validate();
  auto dims = [&](int in, int layers, int out) {
    std::vector<int> d{in};
    for (int i = 1; i < layers; ++i) d.push_back(hp.hidden);
    d.push_back(out);
    return d;
  };
  EncoderParams p;
  p.f_perm = make_mlp(dims(2 * atom_dim, hp.perm_layers, hp.hidden), rng);
  const int bond_dim = hp.hidden + pooled_dim;
  p.f_bond = make_mlp(dims(bond_dim, hp.bond_layers, 1), rng);
  if (gate) p.f_gate = make_mlp(dims(bond_dim, hp.gate_layers, 1), rng);
  return p;
}

EncoderParams zeros_like(const EncoderParams& like) {
  return {zeros_like(like.f_perm), zeros_like(like.f_bond), zeros_like(like.f_gate)};
}

Eigen::RowVectorXd encode_perm(const EncoderParams& p, const Eigen::RowVectorXd& h_a,
                               const Eigen::RowVectorXd& h_b) {
  if (h_a.size() != p.atom_dim() || h_b.size() != p.atom_dim())
    throw InvalidArgument("atom feature dimension mismatch");
  Eigen::MatrixXd x(2, 2 * p.atom_dim());
  x.row(0) << h_a, h_b;
  x.row(1) << h_b, h_a;
  const Eigen::MatrixXd out = mlp_forward(p.f_perm, x);
  return out.row(0) + out.row(1);
}

Eigen::RowVectorXd encode_bond(const EncoderParams& p, const EncodedConformer& x) {
  if (x.pooled.size() != p.bond_dim() - p.perm_dim())
    throw InvalidArgument("pooled feature dimension mismatch");
  Eigen::RowVectorXd out(p.bond_dim());
  out << encode_perm(p, x.h_a, x.h_b), x.pooled;
  return out;
}

Eigen::RowVectorXd encode_bond(const EncoderParams& p, const Eigen::MatrixXd& h_atoms, int a,
                               int b) {
  if (a < 0 || b < 0 || a >= h_atoms.rows() || b >= h_atoms.rows())
    throw InvalidArgument("bond atom out of range");
  return encode_bond(p, EncodedConformer{h_atoms.row(a), h_atoms.row(b), h_atoms.colwise().sum()});
}

SetEncoding encode_set(const EncoderParams& p, const std::vector<Eigen::RowVectorXd>& h_bonds) {
  if (h_bonds.empty()) throw InvalidArgument("encode_set needs at least one conformer");
  if (!p.has_gate()) throw InvalidArgument("encode_set requires a gate network");
  const auto n = static_cast<Eigen::Index>(h_bonds.size());
  Eigen::MatrixXd h(n, p.bond_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (h_bonds[i].size() != p.bond_dim()) throw InvalidArgument("h_bond dimension mismatch");
    h.row(i) = h_bonds[i];
  }
  const Eigen::VectorXd logits = mlp_forward(p.f_gate, h).col(0);
  SetEncoding out;
  out.alpha = (logits.array() - logits.maxCoeff()).exp();
  out.alpha /= out.alpha.sum();
  out.h_ensemble = out.alpha.transpose() * h;
  return out;
}

double forward(const EncoderParams& p, const EncodedSet& input) {
  BatchCache c;
  const EncodedSet* one = &input;
  batch_forward(p, std::span<const EncodedSet* const>(&one, 1), c);
  return c.y[0];
}

double loss_and_gradients(const EncoderParams& p, std::span<const TrainingExample> batch,
                          EncoderParams& grad) {
  if (batch.empty()) throw InvalidArgument("empty batch");
  std::vector<const EncodedSet*> sets;
  Eigen::VectorXd t(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sets.push_back(batch[i].input);
    t[static_cast<Eigen::Index>(i)] = batch[i].target;
  }
  BatchCache c;
  batch_forward(p, sets, c);
  const auto n = static_cast<double>(batch.size());
  const Eigen::VectorXd r = c.y - t;
  const double loss = r.squaredNorm() / n;
  if (!std::isfinite(loss)) throw NumericError("non-finite loss");

  const Eigen::MatrixXd d_e = mlp_backward(p.f_bond, c.bond, Eigen::MatrixXd(2.0 * r / n), grad.f_bond);
  Eigen::MatrixXd d_h;
  if (p.has_gate()) {
    d_h.resize(c.h_bond.rows(), c.h_bond.cols());
    Eigen::MatrixXd d_logit(c.h_bond.rows(), 1);
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const int lo = c.offsets[s], hi = c.offsets[s + 1];
      double mean = 0.0;
      for (int i = lo; i < hi; ++i) {
        d_h.row(i) = c.alpha[i] * d_e.row(static_cast<Eigen::Index>(s));
        d_logit(i, 0) = d_e.row(static_cast<Eigen::Index>(s)).dot(c.h_bond.row(i));
        mean += c.alpha[i] * d_logit(i, 0);
      }
      for (int i = lo; i < hi; ++i) d_logit(i, 0) = c.alpha[i] * (d_logit(i, 0) - mean);
    }
    d_h += mlp_backward(p.f_gate, c.gate, d_logit, grad.f_gate);
  } else {
    d_h = d_e;
  }
  const Eigen::MatrixXd d_perm = d_h.leftCols(p.perm_dim());
  mlp_backward(p.f_perm, c.perm_ab, d_perm, grad.f_perm);
  mlp_backward(p.f_perm, c.perm_ba, d_perm, grad.f_perm);
  return loss;
}

FeatureScaler FeatureScaler::identity(int atom_dim, int pooled_dim) {
  return {Eigen::RowVectorXd::Zero(atom_dim), Eigen::RowVectorXd::Ones(atom_dim),
          Eigen::RowVectorXd::Zero(pooled_dim), Eigen::RowVectorXd::Ones(pooled_dim)};
}

FeatureScaler FeatureScaler::fit(const std::vector<const BondFeatures*>& samples) {
  if (samples.empty()) throw InvalidArgument("cannot fit a scaler on no samples");
  const auto da = samples.front()->h_a.size();
  const auto dp = samples.front()->pooled.size();
  Eigen::MatrixXd atoms(2 * samples.size(), da), pooled(samples.size(), dp);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i]->h_a.size() != da || samples[i]->h_b.size() != da || samples[i]->pooled.size() != dp)
      throw InvalidArgument("inconsistent feature dimensions");
    atoms.row(2 * i) = samples[i]->h_a;
    atoms.row(2 * i + 1) = samples[i]->h_b;
    pooled.row(i) = samples[i]->pooled;
  }
  auto stats = [](const Eigen::MatrixXd& x, Eigen::RowVectorXd& mean, Eigen::RowVectorXd& scale) {
    mean = x.colwise().mean();
    scale = ((x.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(x.rows()))
                .sqrt()
                .matrix();
    for (Eigen::Index j = 0; j < scale.size(); ++j)
      if (scale[j] < 1e-12) scale[j] = 1.0;
  };
  FeatureScaler s;
  stats(atoms, s.atom_mean, s.atom_scale);
  stats(pooled, s.pooled_mean, s.pooled_scale);
  return s;
}

EncodedConformer FeatureScaler::apply(const BondFeatures& f) const {
  if (f.h_a.size() != atom_mean.size() || f.h_b.size() != atom_mean.size() ||
      f.pooled.size() != pooled_mean.size())
    throw InvalidArgument("feature dimension does not match the scaler");
  return {(f.h_a - atom_mean).cwiseQuotient(atom_scale),
          (f.h_b - atom_mean).cwiseQuotient(atom_scale),
          (f.pooled - pooled_mean).cwiseQuotient(pooled_scale)};
}

ModelInput build_model_input(const DatasetRecord& record, const ModelConfig& config,
                             std::uint64_t data_seed, TierNoise mid, TierNoise low) {
  config.validate();
  const auto rid = static_cast<std::uint64_t>(record.id);
  const ConformerEnsemble& exact = record.ensemble_exact;
  const MolecularGraph& g = exact.graph;
  auto features = [&](const Conformer& c) { return bond_features(g, c.coords); };
  auto spec = [&](std::uint64_t stream) {
    return CorruptionSpec::for_tier(config.quality, derive_seed(data_seed, {rid, stream}), mid, low);
  };
  ModelInput in;
  switch (config.input_kind) {
    case InputKind::Active: {
      const int active = aggregate_labels(exact).active_id(config.target);
      const ConformerEnsemble one{g, {exact.by_id(active)}};
      in.views.push_back({features(corrupt(one, spec(1)).conformers.front())});
      break;
    }
    case InputKind::Random:
      in.views.push_back({features(sample_random_conformer(record.ensemble(config.quality),
                                                           derive_seed(data_seed, {rid, 2})))});
      break;
    case InputKind::RandomAugmented:
      for (const auto& c : presample(record.ensemble(config.quality), config.n_c,
                                     derive_seed(data_seed, {rid, 3})))
        in.views.push_back({features(c)});
      break;
    case InputKind::Set: {
      std::vector<BondFeatures> view;
      for (const auto& c : presample(record.ensemble(config.quality), config.n_c,
                                     derive_seed(data_seed, {rid, 4})))
        view.push_back(features(c));
      in.views.push_back(std::move(view));
      break;
    }
    case InputKind::DecoySet: {
      const DecoySet d = build_decoy_set(exact, config.target, config.n_c, spec(5),
                                         derive_seed(data_seed, {rid, 6}));
      std::vector<BondFeatures> view;
      for (const auto& c : d.conformers) view.push_back(features(c));
      in.views.push_back(std::move(view));
      break;
    }
  }
  return in;
}

void check_input_shape(const ModelConfig& config, const ModelInput& input) {
  if (input.views.empty()) throw InvalidArgument("model input has no views");
  for (const auto& v : input.views)
    if (v.empty()) throw InvalidArgument("model input has an empty view");
  const bool single_view = input.views.size() == 1;
  switch (config.input_kind) {
    case InputKind::Active:
    case InputKind::Random:
      if (!single_view || input.views[0].size() != 1)
        throw InvalidArgument(to_string(config.input_kind) + " models take one conformer");
      break;
    case InputKind::RandomAugmented:
      for (const auto& v : input.views)
        if (v.size() != 1) throw InvalidArgument("augmented views hold one conformer each");
      break;
    case InputKind::Set:
    case InputKind::DecoySet:
      if (!single_view) throw InvalidArgument("set models take a single view");
      break;
  }
}

double predict(const Model& model, const ModelInput& input) {
  check_input_shape(model.config, input);
  double sum = 0.0;
  for (const auto& view : input.views) {
    EncodedSet set;
    for (const auto& f : view) set.push_back(model.scaler.apply(f));
    sum += forward(model.params, set);
  }
  return sum / static_cast<double>(input.views.size());
}

}  // namespace confq
