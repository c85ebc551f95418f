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


#include "confq/mlp.hpp"

#include <cmath>

#include "confq/error.hpp"

namespace confq {

int Mlp::in_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.rows()); }
int Mlp::out_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.cols()); }

Eigen::Index Mlp::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

void Mlp::validate(const std::string& name) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].bias.size() != layers[i].weight.cols())
      throw InvalidArgument(name + " layer " + std::to_string(i) + ": bias size mismatch");
    if (i > 0 && layers[i].weight.rows() != layers[i - 1].weight.cols())
      throw InvalidArgument(name + " layer " + std::to_string(i) + ": input dimension mismatch");
  }
}

Mlp make_mlp(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) throw InvalidArgument("an MLP needs at least one layer");
  Mlp m;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i + 1] < 1) throw InvalidArgument("MLP dimensions must be positive");
    const double limit = std::sqrt(6.0 / (dims[i] + dims[i + 1]));
    std::uniform_real_distribution<double> u(-limit, limit);
    DenseLayer l{Eigen::MatrixXd(dims[i], dims[i + 1]), Eigen::RowVectorXd::Zero(dims[i + 1])};
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = u(rng);
    m.layers.push_back(std::move(l));
  }
  return m;
}

Mlp zeros_like(const Mlp& like) {
  Mlp m;
  for (const auto& l : like.layers)
    m.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::RowVectorXd::Zero(l.bias.size())});
  return m;
}

Eigen::MatrixXd mlp_forward(const Mlp& mlp, const Eigen::MatrixXd& x, MlpTape* tape) {
  if (x.cols() != mlp.in_dim()) throw InvalidArgument("MLP input dimension mismatch");
  if (tape) {
    tape->inputs.clear();
    tape->pre.clear();
  }
  Eigen::MatrixXd h = x;
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    const auto& l = mlp.layers[i];
    if (tape) tape->inputs.push_back(h);
    Eigen::MatrixXd z = h * l.weight;
    z.rowwise() += l.bias;
    if (i + 1 == mlp.layers.size()) return z;
    if (tape) tape->pre.push_back(z);
    h = z.unaryExpr([](double v) { return swish(v); });
  }
  return h;
}

Eigen::MatrixXd mlp_backward(const Mlp& mlp, const MlpTape& tape, const Eigen::MatrixXd& d_out,
                             Mlp& grad) {
  Eigen::MatrixXd d = d_out;
  for (std::size_t k = mlp.layers.size(); k-- > 0;) {
    if (k + 1 < mlp.layers.size())
      d = d.cwiseProduct(tape.pre[k].unaryExpr([](double v) { return swish_grad(v); }));
    grad.layers[k].weight.noalias() += tape.inputs[k].transpose() * d;
    grad.layers[k].bias += d.colwise().sum();
    d = d * mlp.layers[k].weight.transpose();
  }
  return d;
}

void append_parameters(const Mlp& mlp, std::vector<double>& out) {
  for (const auto& l : mlp.layers) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
}

std::size_t assign_parameters(Mlp& mlp, const std::vector<double>& flat, std::size_t offset) {
  for (auto& l : mlp.layers) {
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = flat.at(offset++);
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias.data()[i] = flat.at(offset++);
  }
  return offset;
}

std::string first_nonfinite(const Mlp& mlp, const std::string& name) {
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    if (!mlp.layers[i].weight.allFinite()) return name + ".layers[" + std::to_string(i) + "].weight";
    if (!mlp.layers[i].bias.allFinite()) return name + ".layers[" + std::to_string(i) + "].bias";
  }
  return {};
}

}  // namespace confq
