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
#include <cmath>
#include <string>
#include <vector>

#include "confq/rng.hpp"

namespace confq {

struct DenseLayer {
  Eigen::MatrixXd weight;  // in x out
  Eigen::RowVectorXd bias;  // 1 x out
};

/// Dense layers with swish between them and a linear output layer.
struct Mlp {
  std::vector<DenseLayer> layers;

  bool empty() const noexcept { return layers.empty(); }
  int in_dim() const;
  int out_dim() const;
  Eigen::Index parameter_count() const;
  /// Throws InvalidArgument when consecutive layers do not chain.
  void validate(const std::string& name) const;
};

/// Glorot-uniform weights and zero biases; `dims` lists in, hidden..., out.
Mlp make_mlp(const std::vector<int>& dims, Rng& rng);
/// Same shapes as `like`, all entries zero.
Mlp zeros_like(const Mlp& like);

inline double swish(double x) { return x / (1.0 + std::exp(-x)); }
inline double swish_grad(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 + x * (1.0 - s));
}

/// Activations retained for the backward pass.
struct MlpTape {
  std::vector<Eigen::MatrixXd> inputs;  // input to each layer
  std::vector<Eigen::MatrixXd> pre;     // pre-activation of each hidden layer
};

/// Row-batched forward pass.
Eigen::MatrixXd mlp_forward(const Mlp& mlp, const Eigen::MatrixXd& x, MlpTape* tape = nullptr);

/// Accumulates parameter gradients into `grad` and returns d(loss)/d(input).
Eigen::MatrixXd mlp_backward(const Mlp& mlp, const MlpTape& tape, const Eigen::MatrixXd& d_out,
                             Mlp& grad);

/// Flat parameter view in layer order: weight (column-major) then bias.
void append_parameters(const Mlp& mlp, std::vector<double>& out);
std::size_t assign_parameters(Mlp& mlp, const std::vector<double>& flat, std::size_t offset);

/// Name of the tensor holding a non-finite entry, or empty.
std::string first_nonfinite(const Mlp& mlp, const std::string& name);

}  // namespace confq
