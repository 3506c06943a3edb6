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

#include "forge/nn.hpp"

#include "forge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forge
{

void MlpGrad::zero()
{
  for (auto & v : dw) std::fill(v.begin(), v.end(), 0.0);
  for (auto & v : db) std::fill(v.begin(), v.end(), 0.0);
}

void MlpGrad::scale(double s)
{
  for (auto & v : dw) for (auto & x : v) x *= s;
  for (auto & v : db) for (auto & x : v) x *= s;
}

void MlpGrad::add(const MlpGrad & other)
{
  for (std::size_t l = 0; l < dw.size(); ++l) {
    for (std::size_t i = 0; i < dw[l].size(); ++i) dw[l][i] += other.dw[l][i];
    for (std::size_t i = 0; i < db[l].size(); ++i) db[l][i] += other.db[l][i];
  }
}

double normal(Rng & rng)
{
  double u1 = rng.uniform();
  while (u1 <= 0.0) {
    u1 = rng.uniform();
  }
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Mlp::Mlp(const std::vector<int> & widths, Rng & rng)
{
  if (widths.size() < 2) {
    throw std::invalid_argument("Mlp needs at least input and output widths");
  }
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Dense d;
    d.in = widths[i];
    d.out = widths[i + 1];
    d.w.resize(static_cast<std::size_t>(d.in * d.out));
    d.b.assign(static_cast<std::size_t>(d.out), 0.0);
    const double scale = std::sqrt(2.0 / d.in);
    for (auto & x : d.w) {
      x = scale * normal(rng);
    }
    layers_.push_back(std::move(d));
  }
}

std::size_t Mlp::num_params() const
{
  std::size_t n = 0;
  for (const auto & l : layers_) n += l.w.size() + l.b.size();
  return n;
}

std::vector<double> Mlp::forward(const std::vector<double> & x, MlpCache * cache) const
{
  if (static_cast<int>(x.size()) != input_size()) {
    throw std::invalid_argument("Mlp::forward: input size mismatch");
  }
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  std::vector<double> h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Dense & d = layers_[l];
    std::vector<double> z(static_cast<std::size_t>(d.out));
    for (int o = 0; o < d.out; ++o) {
      const double * row = d.w.data() + static_cast<std::size_t>(o) * d.in;
      double acc = d.b[static_cast<std::size_t>(o)];
      for (int i = 0; i < d.in; ++i) {
        acc += row[i] * h[static_cast<std::size_t>(i)];
      }
      z[static_cast<std::size_t>(o)] = acc;
    }
    if (cache) {
      cache->inputs.push_back(h);
      cache->pre.push_back(z);
    }
    if (l + 1 < layers_.size()) {
      for (auto & v : z) v = v > 0.0 ? v : 0.0;
    }
    h = std::move(z);
  }
  return h;
}

std::vector<double> Mlp::backward(
  const MlpCache & cache, const std::vector<double> & grad_out, MlpGrad & grad) const
{
  std::vector<double> g = grad_out;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const Dense & d = layers_[li];
    if (li + 1 < layers_.size()) {
      const auto & z = cache.pre[li];
      for (std::size_t o = 0; o < g.size(); ++o) {
        if (z[o] <= 0.0) g[o] = 0.0;
      }
    }
    const auto & x = cache.inputs[li];
    auto & dw = grad.dw[li];
    auto & db = grad.db[li];
    std::vector<double> gin(static_cast<std::size_t>(d.in), 0.0);
    for (int o = 0; o < d.out; ++o) {
      const double go = g[static_cast<std::size_t>(o)];
      if (go == 0.0) continue;
      db[static_cast<std::size_t>(o)] += go;
      const std::size_t base = static_cast<std::size_t>(o) * d.in;
      for (int i = 0; i < d.in; ++i) {
        dw[base + i] += go * x[static_cast<std::size_t>(i)];
        gin[static_cast<std::size_t>(i)] += go * d.w[base + i];
      }
    }
    g = std::move(gin);
  }
  return g;
}

MlpGrad Mlp::zero_grad() const
{
  MlpGrad g;
  for (const auto & l : layers_) {
    g.dw.emplace_back(l.w.size(), 0.0);
    g.db.emplace_back(l.b.size(), 0.0);
  }
  return g;
}

void Mlp::step(const MlpGrad & grad, double lr)
{
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (std::size_t i = 0; i < layers_[l].w.size(); ++i) layers_[l].w[i] -= lr * grad.dw[l][i];
    for (std::size_t i = 0; i < layers_[l].b.size(); ++i) layers_[l].b[i] -= lr * grad.db[l][i];
  }
}

bool Mlp::all_finite() const
{
  for (const auto & l : layers_) {
    for (double x : l.w) if (!std::isfinite(x)) return false;
    for (double x : l.b) if (!std::isfinite(x)) return false;
  }
  return true;
}

std::vector<double *> Mlp::parameters()
{
  std::vector<double *> out;
  for (auto & l : layers_) {
    for (auto & x : l.w) out.push_back(&x);
    for (auto & x : l.b) out.push_back(&x);
  }
  return out;
}

std::vector<const double *> Mlp::gradient_slots(const MlpGrad & grad) const
{
  std::vector<const double *> out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (const auto & x : grad.dw[l]) out.push_back(&x);
    for (const auto & x : grad.db[l]) out.push_back(&x);
  }
  return out;
}

double bce_with_logits(double z, double target, double weight, double * dz)
{
  // log(1 + exp(-|z|)) form avoids overflow
  const double loss = std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
  if (dz) {
    const double sig = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    *dz = weight * (sig - target);
  }
  return weight * loss;
}

double smooth_l1(
  const std::vector<double> & pred, const std::vector<double> & target, std::vector<double> * d)
{
  double loss = 0.0;
  if (d) d->assign(pred.size(), 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    if (std::abs(e) < 1.0) {
      loss += 0.5 * e * e;
      if (d) (*d)[i] = e;
    } else {
      loss += std::abs(e) - 0.5;
      if (d) (*d)[i] = e > 0.0 ? 1.0 : -1.0;
    }
  }
  return loss;
}

std::vector<double> softmax(const std::vector<double> & logits)
{
  if (logits.empty()) {
    return {};
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (auto & x : p) x /= sum;
  return p;
}

double softmax_cross_entropy(const std::vector<double> & logits, int label, std::vector<double> * d)
{
  const auto p = softmax(logits);
  if (d) {
    *d = p;
    (*d)[static_cast<std::size_t>(label)] -= 1.0;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  return -(logits[static_cast<std::size_t>(label)] - mx - std::log(sum));
}

}  // namespace forge
