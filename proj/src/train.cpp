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


#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "confq/error.hpp"
#include "confq/surrogate.hpp"

namespace confq {
namespace {

using EncodedViews = std::vector<EncodedSet>;

std::vector<EncodedViews> encode_all(const FeatureScaler& scaler,
                                     const std::vector<LabeledInput>& data) {
  std::vector<EncodedViews> out;
  out.reserve(data.size());
  for (const auto& d : data) {
    EncodedViews views;
    for (const auto& v : d.input.views) {
      EncodedSet set;
      for (const auto& f : v) set.push_back(scaler.apply(f));
      views.push_back(std::move(set));
    }
    out.push_back(std::move(views));
  }
  return out;
}

double encoded_mae(const EncoderParams& p, const std::vector<EncodedViews>& x,
                   const std::vector<LabeledInput>& data) {
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double y = 0.0;
    for (const auto& v : x[i]) y += forward(p, v);
    err += std::abs(y / static_cast<double>(x[i].size()) - data[i].target);
  }
  return err / static_cast<double>(x.size());
}

}  // namespace

TrainResult train(const ModelConfig& config, const std::vector<LabeledInput>& train_set,
                  const std::vector<LabeledInput>& val_set, const Hyperparams& hp) {
  config.validate();
  hp.validate();
  if (train_set.empty()) throw InvalidArgument("empty training split");
  if (val_set.empty()) throw InvalidArgument("empty validation split");
  std::unordered_set<std::int64_t> train_ids;
  for (const auto& d : train_set) {
    check_input_shape(config, d.input);
    train_ids.insert(d.id);
  }
  for (const auto& d : val_set) {
    check_input_shape(config, d.input);
    if (train_ids.count(d.id))
      throw InvalidArgument("record " + std::to_string(d.id) + " is in both training and validation splits");
  }

  std::vector<const BondFeatures*> feats;
  for (const auto& d : train_set)
    for (const auto& v : d.input.views)
      for (const auto& f : v) feats.push_back(&f);

  Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(config.model_id),
                                    static_cast<std::uint64_t>(config.target)}));
  TrainResult result;
  Model& model = result.model;
  model.config = config;
  model.hyper = hp;
  model.scaler = FeatureScaler::fit(feats);
  model.params = make_encoder(static_cast<int>(feats.front()->h_a.size()),
                              static_cast<int>(feats.front()->pooled.size()), hp,
                              config.uses_gate(), rng);
  double target_mean = 0.0;
  for (const auto& d : train_set) target_mean += d.target;
  // Start from the constant mean predictor.
  model.params.f_bond.layers.back().weight.setZero();
  model.params.f_bond.layers.back().bias[0] = target_mean / static_cast<double>(train_set.size());

  const auto x_train = encode_all(model.scaler, train_set);
  const auto x_val = encode_all(model.scaler, val_set);

  std::vector<double> theta = model.params.flatten();
  std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0);
  std::vector<double> best = theta;
  double best_mae = std::numeric_limits<double>::infinity();
  int since_best = 0;
  long step = 0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<TrainingExample> batch;

  for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      const std::size_t stop = std::min(order.size(), start + hp.batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) {
        const auto& views = x_train[order[k]];
        batch.push_back({&views[static_cast<std::size_t>(epoch) % views.size()],
                         train_set[order[k]].target});
      }
      EncoderParams grad = zeros_like(model.params);
      double loss;
      try {
        loss = loss_and_gradients(model.params, batch, grad);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
      }
      loss_sum += loss * static_cast<double>(batch.size());
      const std::vector<double> g = grad.flatten();
      ++step;
      const double c1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = hp.beta1 * m[i] + (1.0 - hp.beta1) * g[i];
        v[i] = hp.beta2 * v[i] + (1.0 - hp.beta2) * g[i] * g[i];
        theta[i] -= hp.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + hp.epsilon);
      }
      model.params.assign(theta);
    }
    double val_mae;
    try {
      val_mae = encoded_mae(model.params, x_val, val_set);
    } catch (const NumericError& e) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    result.log.epochs.push_back({epoch, loss_sum / static_cast<double>(order.size()), val_mae});
    if (val_mae < best_mae) {
      best_mae = val_mae;
      best = theta;
      result.log.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= hp.patience) {
      result.log.early_stopped = true;
      break;
    }
  }
  result.log.best_val_mae = best_mae;
  model.params.assign(best);
  return result;
}

double mean_absolute_error(const Model& model, const std::vector<LabeledInput>& data) {
  if (data.empty()) throw InvalidArgument("mean absolute error of an empty split");
  double err = 0.0;
  for (const auto& d : data) err += std::abs(predict(model, d.input) - d.target);
  return err / static_cast<double>(data.size());
}

}  // namespace confq
