// Copyright 2026 The tempent Authors.
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

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tempent {

// Row-major |rows| x |cols| view over externally owned storage.
template <typename Real>
struct MatrixView {
  Real *data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<Real> row(std::size_t r) const {
    return {data + r * cols, cols};
  }
};

template <typename Real>
Real sigmoid(Real x) {
  if (x >= 0) return Real(1) / (Real(1) + std::exp(-x));
  const Real e = std::exp(x);
  return e / (Real(1) + e);
}

// log(1 + exp(x)) without overflow.
template <typename Real>
Real softplus(Real x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// Loss and gradient of one CBOW negative-sampling example:
//   h = mean of the context input rows
//   L = -log sigmoid(u_target . h) - sum_n log sigmoid(-u_n . h)
// The gradient is kept in factored form: dL/du_j = out_coef[j] * h for the
// output rows listed in out_rows (target first), and every context row gets
// hidden_grad / |context|.
template <typename Real>
struct CbowGradient {
  Real loss = 0;
  std::vector<Real> hidden;
  std::vector<Real> hidden_grad;
  std::vector<std::uint32_t> out_rows;
  std::vector<Real> out_coef;
};

template <typename Real>
void cbow_gradient(MatrixView<const Real> input, MatrixView<const Real> output,
                   std::span<const std::uint32_t> context,
                   std::uint32_t target,
                   std::span<const std::uint32_t> negatives,
                   CbowGradient<Real> &g) {
  const std::size_t dim = input.cols;
  g.hidden.assign(dim, Real(0));
  g.hidden_grad.assign(dim, Real(0));
  g.out_rows.clear();
  g.out_coef.clear();
  g.loss = 0;

  for (auto c : context) {
    auto r = input.row(c);
    for (std::size_t d = 0; d < dim; ++d) g.hidden[d] += r[d];
  }
  const Real inv = Real(1) / static_cast<Real>(context.size());
  for (auto &v : g.hidden) v *= inv;

  auto score = [&](std::uint32_t row) {
    auto u = output.row(row);
    Real x = 0;
    for (std::size_t d = 0; d < dim; ++d) x += u[d] * g.hidden[d];
    return x;
  };
  // Every coefficient is computed from pre-update parameters.
  {
    const Real x = score(target);
    g.loss += softplus(-x);
    g.out_rows.push_back(target);
    g.out_coef.push_back(sigmoid(x) - Real(1));
  }
  for (auto n : negatives) {
    const Real x = score(n);
    g.loss += softplus(x);
    g.out_rows.push_back(n);
    g.out_coef.push_back(sigmoid(x));
  }
  for (std::size_t j = 0; j < g.out_rows.size(); ++j) {
    auto u = output.row(g.out_rows[j]);
    for (std::size_t d = 0; d < dim; ++d) g.hidden_grad[d] += g.out_coef[j] * u[d];
  }
}

// Plain SGD step with the gradient from cbow_gradient().
template <typename Real>
void apply_cbow_gradient(MatrixView<Real> input, MatrixView<Real> output,
                         std::span<const std::uint32_t> context,
                         const CbowGradient<Real> &g, Real lr) {
  if (lr == Real(0)) return;
  const std::size_t dim = input.cols;
  for (std::size_t j = 0; j < g.out_rows.size(); ++j) {
    auto u = output.row(g.out_rows[j]);
    const Real step = lr * g.out_coef[j];
    for (std::size_t d = 0; d < dim; ++d) u[d] -= step * g.hidden[d];
  }
  const Real share = lr / static_cast<Real>(context.size());
  for (auto c : context) {
    auto r = input.row(c);
    for (std::size_t d = 0; d < dim; ++d) r[d] -= share * g.hidden_grad[d];
  }
}

}  // namespace tempent
