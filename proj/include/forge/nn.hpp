// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FORGE__NN_HPP_
#define FORGE__NN_HPP_

#include "forge/random.hpp"

#include <string>
#include <vector>

namespace forge
{

/// Fully connected layer, weights row-major (out x in).
struct Dense
{
  int in{0};
  int out{0};
  std::vector<double> w;
  std::vector<double> b;
};

/// Activations kept from a forward pass for the backward pass.
struct MlpCache
{
  std::vector<std::vector<double>> inputs;  ///< input of each layer (post-activation)
  std::vector<std::vector<double>> pre;     ///< pre-activation of each layer
};

/// Same shapes as the network; accumulates gradients.
struct MlpGrad
{
  std::vector<std::vector<double>> dw;
  std::vector<std::vector<double>> db;

  void zero();
  void scale(double s);
  void add(const MlpGrad & other);
};

/// Rectifier MLP with a linear output layer.
class Mlp
{
public:
  Mlp() = default;
  /// widths = {in, hidden..., out}; He-normal weights, zero biases.
  Mlp(const std::vector<int> & widths, Rng & rng);

  int input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
  int output_size() const { return layers_.empty() ? 0 : layers_.back().out; }
  std::size_t num_params() const;

  std::vector<double> forward(const std::vector<double> & x, MlpCache * cache = nullptr) const;
  /// Adds dLoss/dparams into grad; returns dLoss/dinput.
  std::vector<double> backward(
    const MlpCache & cache, const std::vector<double> & grad_out, MlpGrad & grad) const;

  MlpGrad zero_grad() const;
  /// params -= lr * grad
  void step(const MlpGrad & grad, double lr);
  bool all_finite() const;

  std::vector<Dense> & layers() { return layers_; }
  const std::vector<Dense> & layers() const { return layers_; }
  /// Pointers to every parameter in a fixed order (weights then bias, per layer).
  std::vector<double *> parameters();
  std::vector<const double *> gradient_slots(const MlpGrad & grad) const;

private:
  std::vector<Dense> layers_;
};

/// Draws from N(0, 1) by Box-Muller on the project RNG.
double normal(Rng & rng);

/// Binary cross-entropy on a logit; writes dL/dz.
double bce_with_logits(double z, double target, double weight, double * dz);
/// Smooth-L1 (beta = 1) summed over components; writes dL/dpred.
double smooth_l1(
  const std::vector<double> & pred, const std::vector<double> & target, std::vector<double> * d);
/// Numerically stable softmax.
std::vector<double> softmax(const std::vector<double> & logits);
/// Cross-entropy of softmax(logits) against label; writes dL/dlogits.
double softmax_cross_entropy(
  const std::vector<double> & logits, int label, std::vector<double> * d);

}  // namespace forge

#endif  // FORGE__NN_HPP_
