// Copyright 2026 The Passage Authors
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

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "passage/common.hpp"
#include "passage/evolution.hpp"
#include "passage/hamiltonian.hpp"
#include "passage/trajectory.hpp"

namespace passage {

/// Reference propagators built on matrix exponentials instead of
/// Runge-Kutta stepping. They share no integrator code with evolution.hpp,
/// which makes them a second route for cross-checking trajectories. They
/// are slow by design and capped to small problems.

inline constexpr int kMaxExpmStateDim = 100;
inline constexpr int kMaxExpmDensityDim = 16;

/// Exact step for a piecewise-constant Hamiltonian frozen at each step
/// midpoint: psi -> exp(-i H(t + dt/2) dt) psi. Returns the final state.
inline Vector propagate_expm_schrodinger(const HamiltonianModel& model,
                                         const Vector& psi0, const TimeGrid& grid) {
  grid.validate();
  const int dim = model.space().dim();
  if (dim > kMaxExpmStateDim)
    throw ValidationError("expm reference propagator capped at dim <= 100");
  if (psi0.size() != dim) throw ValidationError("initial state dimension mismatch");

  const double dt = grid.dt();
  const complexd mi(0.0, -1.0);
  Vector psi = psi0;
  Matrix h(dim, dim);
  for (int step = 0; step < grid.n_steps; ++step) {
    const double t_mid = grid.t_start + (step + 0.5) * dt;
    model.assemble_into(t_mid, h);
    psi = ((mi * dt) * h).exp() * psi;
  }
  return psi;
}

/// Generator of the vectorized master equation, column-major convention
/// vec(A X B) = (B^T kron A) vec(X):
///
///   L = -i (I kron H - H^T kron I)
///     + sum_c r_c ( conj(A_c) kron A_c
///                   - (I kron A_c^dag A_c + (A_c^dag A_c)^T kron I) / 2 )
inline Matrix liouvillian(const Matrix& h, std::span<const Matrix> ops,
                          std::span<const double> rates) {
  if (ops.size() != rates.size())
    throw ValidationError("liouvillian: operator/rate count mismatch");
  const auto dim = h.rows();
  const Matrix eye = Matrix::Identity(dim, dim);
  const complexd mi(0.0, -1.0);
  Matrix lv = mi * (kroneckerProduct(eye, h) - kroneckerProduct(h.transpose(), eye));
  for (std::size_t c = 0; c < ops.size(); ++c) {
    const Matrix& a = ops[c];
    const Matrix ada = a.adjoint() * a;
    lv.noalias() += rates[c] * kroneckerProduct(a.conjugate(), a);
    lv.noalias() -= (0.5 * rates[c]) *
                    (kroneckerProduct(eye, ada) + kroneckerProduct(ada.transpose(), eye)).eval();
  }
  return lv;
}

/// Midpoint-frozen exponential stepping of the vectorized master equation.
/// Returns the final density matrix.
inline Matrix propagate_expm_lindblad(const HamiltonianModel& model, const Matrix& rho0,
                                      std::span<const CollapseChannel> channels,
                                      const TimeGrid& grid) {
  grid.validate();
  const int dim = model.space().dim();
  if (dim > kMaxExpmDensityDim)
    throw ValidationError("expm reference propagator capped at density dim <= 16");
  if (rho0.rows() != dim || rho0.cols() != dim)
    throw ValidationError("initial density matrix dimension mismatch");
  validate_channels(model.space(), channels);

  std::vector<Matrix> ops;
  std::vector<double> rates;
  for (const CollapseChannel& c : channels) {
    if (c.rate == 0.0) continue;
    ops.push_back(channel_operator(model.space(), c));
    rates.push_back(c.rate);
  }

  const double dt = grid.dt();
  Vector rho_vec = Eigen::Map<const Vector>(rho0.data(), dim * dim);
  Matrix h(dim, dim);
  for (int step = 0; step < grid.n_steps; ++step) {
    const double t_mid = grid.t_start + (step + 0.5) * dt;
    model.assemble_into(t_mid, h);
    const Matrix lv = liouvillian(h, ops, rates);
    rho_vec = (dt * lv).exp() * rho_vec;
  }
  return Eigen::Map<const Matrix>(rho_vec.data(), dim, dim);
}

}  // namespace passage
