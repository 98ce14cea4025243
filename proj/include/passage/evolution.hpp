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

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "passage/common.hpp"
#include "passage/hamiltonian.hpp"
#include "passage/statespace.hpp"
#include "passage/trajectory.hpp"

namespace passage {

// Integrator guard rails. A run that trips these is reported as broken
// rather than silently renormalized.
inline constexpr double kMaxNormDrift = 1e-6;
inline constexpr double kMaxTraceDrift = 1e-6;
inline constexpr double kMinEigenvalueFloor = -1e-5;

/// The five dissipation channels of the model: photon loss from the cavity
/// and, per qubit, relaxation |1> -> |e> -> |0> plus dephasing of |1> and
/// |e> (projector-type collapse operators).
enum class ChannelKind {
  CavityDecay,
  RelaxOneToExcited,
  RelaxExcitedToZero,
  DephaseOne,
  DephaseExcited,
};

inline std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::CavityDecay: return "cavity-decay";
    case ChannelKind::RelaxOneToExcited: return "relax-1e";
    case ChannelKind::RelaxExcitedToZero: return "relax-e0";
    case ChannelKind::DephaseOne: return "dephase-1";
    case ChannelKind::DephaseExcited: return "dephase-e";
  }
  return "?";
}

struct CollapseChannel {
  ChannelKind kind = ChannelKind::CavityDecay;
  int qubit = 0;       // ignored for CavityDecay
  double rate = 0.0;   // angular, rad/us

  bool operator==(const CollapseChannel&) const = default;
};

/// Collapse operator A for one channel, on the full space. The master
/// equation term it generates is rate * (A rho A^dag - {A^dag A, rho}/2),
/// twice the half-rate Lindblad bracket form.
inline Matrix channel_operator(const StateSpace& space, const CollapseChannel& channel) {
  switch (channel.kind) {
    case ChannelKind::CavityDecay:
      return space.cavity_annihilation();
    case ChannelKind::RelaxOneToExcited:
      return space.qubit_transition(channel.qubit, Level::Excited, Level::One);
    case ChannelKind::RelaxExcitedToZero:
      return space.qubit_transition(channel.qubit, Level::Zero, Level::Excited);
    case ChannelKind::DephaseOne:
      return space.qubit_projection(channel.qubit, Level::One);
    case ChannelKind::DephaseExcited:
      return space.qubit_projection(channel.qubit, Level::Excited);
  }
  throw ValidationError("unknown channel kind");
}

/// Standard rate family used throughout: one photon-loss rate kappa for the
/// cavity, and per qubit the hierarchy
///   relax |1>->|e| : gamma      dephase |1> : gamma / 2
///   relax |e>->|0| : gamma / 2  dephase |e> : gamma / 4
/// reflecting the weaker anharmonic-level coherences. Rates are angular.
inline std::vector<CollapseChannel> decoherence_preset(int n_qubits, double kappa,
                                                       double gamma) {
  if (kappa < 0.0 || gamma < 0.0)
    throw ValidationError("decoherence rates must be >= 0");
  std::vector<CollapseChannel> channels;
  channels.push_back({ChannelKind::CavityDecay, 0, kappa});
  for (int q = 0; q < n_qubits; ++q) {
    channels.push_back({ChannelKind::RelaxOneToExcited, q, gamma});
    channels.push_back({ChannelKind::RelaxExcitedToZero, q, gamma / 2.0});
    channels.push_back({ChannelKind::DephaseOne, q, gamma / 2.0});
    channels.push_back({ChannelKind::DephaseExcited, q, gamma / 4.0});
  }
  return channels;
}

inline void validate_channels(const StateSpace& space,
                              std::span<const CollapseChannel> channels) {
  for (const CollapseChannel& c : channels) {
    if (!(c.rate >= 0.0) || !std::isfinite(c.rate))
      throw ValidationError("collapse rate must be finite and >= 0");
    if (c.kind != ChannelKind::CavityDecay &&
        (c.qubit < 0 || c.qubit >= space.n_qubits()))
      throw ValidationError("collapse channel qubit index out of range");
  }
}

/// Checks that rho is a physical density matrix: Hermitian, unit trace,
/// no eigenvalue below the floor. Throws ValidationError otherwise.
inline void validate_density(const Matrix& rho, double trace_tol = 1e-9,
                             double herm_tol = 1e-9) {
  if (rho.rows() != rho.cols()) throw ValidationError("density matrix must be square");
  if (!rho.allFinite()) throw ValidationError("density matrix has non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
    throw ValidationError("density matrix is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol)
    throw ValidationError("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kMinEigenvalueFloor)
    throw ValidationError("density matrix has a significantly negative eigenvalue");
}

namespace detail {

inline void check_state_health(double norm_or_trace, bool finite, double t,
                               const char* what, double tol) {
  if (!finite)
    throw IntegrationError(std::string(what) + " became non-finite at t = " +
                           std::to_string(t) + " us");
  if (std::abs(norm_or_trace - 1.0) > tol)
    throw IntegrationError(std::string(what) + " drift " +
                           std::to_string(std::abs(norm_or_trace - 1.0)) +
                           " exceeded " + std::to_string(tol) + " at t = " +
                           std::to_string(t) + " us");
}

}  // namespace detail

/// Closed-system evolution i d|psi>/dt = H(t) |psi> with the classical
/// fourth-order Runge-Kutta rule on the fixed grid. No renormalization is
/// applied at any point; the recorded norms are the honest integrator
/// output, and a norm drift beyond kMaxNormDrift aborts the run.
inline TrajectoryRecord evolve_schrodinger(const HamiltonianModel& model,
                                           const Vector& psi0, const TimeGrid& grid) {
  grid.validate();
  const int dim = model.space().dim();
  if (psi0.size() != dim) throw ValidationError("initial state dimension mismatch");
  if (!psi0.allFinite()) throw ValidationError("initial state has non-finite entries");
  if (std::abs(psi0.norm() - 1.0) > 1e-9)
    throw ValidationError("initial state must be normalized");

  const double dt = grid.dt();
  const complexd mi(0.0, -1.0);

  TrajectoryRecord record;
  record.times.reserve(grid.n_records());
  record.pure_states.reserve(grid.n_records());
  record.norm_or_trace.reserve(grid.n_records());

  Vector psi = psi0;
  Matrix h_a(dim, dim), h_m(dim, dim), h_b(dim, dim);
  Vector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  auto record_point = [&](int step) {
    const double t = grid.t_start + step * dt;
    const double norm = psi.norm();
    detail::check_state_health(norm, psi.allFinite(), t, "state norm", kMaxNormDrift);
    record.times.push_back(t);
    record.pure_states.push_back(psi);
    record.norm_or_trace.push_back(norm);
  };

  record_point(0);
  for (int step = 0; step < grid.n_steps; ++step) {
    const double t = grid.t_start + step * dt;
    model.assemble_into(t, h_a);
    model.assemble_into(t + 0.5 * dt, h_m);
    model.assemble_into(t + dt, h_b);

    k1.noalias() = mi * (h_a * psi);
    tmp = psi + (0.5 * dt) * k1;
    k2.noalias() = mi * (h_m * tmp);
    tmp = psi + (0.5 * dt) * k2;
    k3.noalias() = mi * (h_m * tmp);
    tmp = psi + dt * k3;
    k4.noalias() = mi * (h_b * tmp);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (grid.is_record_step(step + 1)) record_point(step + 1);
  }
  return record;
}

/// Open-system evolution of the master equation
///
///   d rho/dt = -i [H(t), rho]
///            + sum_c r_c ( A_c rho A_c^dag - {A_c^dag A_c, rho} / 2 )
///
/// with the same fixed-grid RK4 rule. Channels with zero rate are dropped;
/// the anticommutator part is folded into one precomputed sink operator
/// K = sum_c (r_c/2) A_c^dag A_c, so each right-hand side costs
/// 2 + 2*n_channels + 2 dense multiplies.
inline TrajectoryRecord evolve_lindblad(const HamiltonianModel& model, const Matrix& rho0,
                                        std::span<const CollapseChannel> channels,
                                        const TimeGrid& grid) {
  grid.validate();
  const int dim = model.space().dim();
  if (rho0.rows() != dim || rho0.cols() != dim)
    throw ValidationError("initial density matrix dimension mismatch");
  validate_density(rho0);
  validate_channels(model.space(), channels);

  std::vector<Matrix> ops;
  std::vector<double> rates;
  Matrix sink = Matrix::Zero(dim, dim);  // K = sum (r/2) A^dag A
  for (const CollapseChannel& c : channels) {
    if (c.rate == 0.0) continue;
    Matrix a = channel_operator(model.space(), c);
    sink.noalias() += (0.5 * c.rate) * (a.adjoint() * a);
    ops.push_back(std::move(a));
    rates.push_back(c.rate);
  }

  const double dt = grid.dt();
  const complexd mi(0.0, -1.0);

  TrajectoryRecord record;
  record.times.reserve(grid.n_records());
  record.density_states.reserve(grid.n_records());
  record.norm_or_trace.reserve(grid.n_records());

  Matrix rho = rho0;
  Matrix h(dim, dim);
  Matrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim);
  Matrix stage(dim, dim), jump(dim, dim);

  auto rhs = [&](double t, const Matrix& r, Matrix& out) {
    model.assemble_into(t, h);
    out.noalias() = mi * (h * r);
    out.noalias() -= mi * (r * h);
    for (std::size_t c = 0; c < ops.size(); ++c) {
      jump.noalias() = ops[c] * r;
      out.noalias() += rates[c] * (jump * ops[c].adjoint());
    }
    out.noalias() -= sink * r;
    out.noalias() -= r * sink;
  };

  auto record_point = [&](int step) {
    const double t = grid.t_start + step * dt;
    const double trace = rho.trace().real();
    detail::check_state_health(trace, rho.allFinite(), t, "density trace", kMaxTraceDrift);
    record.times.push_back(t);
    record.density_states.push_back(rho);
    record.norm_or_trace.push_back(trace);
  };

  record_point(0);
  for (int step = 0; step < grid.n_steps; ++step) {
    const double t = grid.t_start + step * dt;
    rhs(t, rho, k1);
    stage = rho + (0.5 * dt) * k1;
    rhs(t + 0.5 * dt, stage, k2);
    stage = rho + (0.5 * dt) * k2;
    rhs(t + 0.5 * dt, stage, k3);
    stage = rho + dt * k3;
    rhs(t + dt, stage, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (grid.is_record_step(step + 1)) record_point(step + 1);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kMinEigenvalueFloor)
    throw IntegrationError("final density matrix lost positivity");
  return record;
}

}  // namespace passage
