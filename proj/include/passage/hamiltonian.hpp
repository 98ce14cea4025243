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
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "passage/common.hpp"
#include "passage/pulses.hpp"
#include "passage/statespace.hpp"

namespace passage {

/// Cavity-qubit coupling strengths g_l, angular (rad/us), one per qubit.
struct CouplingSet {
  std::vector<double> g;

  int n_qubits() const { return static_cast<int>(g.size()); }
};

/// Interaction-picture Hamiltonian on resonance (hbar = 1):
///
///   H = sum_l g_l (a |e>_l<0| + a^dag |0>_l<e|)
///     + sum_l Omega_l (|1>_l<e| + |e>_l<1|)
///
/// with the instantaneous Rabi rates Omega_l passed in directly.
inline Matrix hamiltonian_at(const StateSpace& space, const CouplingSet& couplings,
                             std::span<const double> rabi) {
  if (couplings.n_qubits() != space.n_qubits())
    throw ValidationError("coupling count does not match qubit count");
  if (static_cast<int>(rabi.size()) != space.n_qubits())
    throw ValidationError("Rabi rate count does not match qubit count");
  const Matrix a = space.cavity_annihilation();
  Matrix h = Matrix::Zero(space.dim(), space.dim());
  for (int l = 0; l < space.n_qubits(); ++l) {
    const Matrix swap = a * space.qubit_transition(l, Level::Excited, Level::Zero);
    h.noalias() += couplings.g[l] * (swap + swap.adjoint().eval());
    const Matrix drive = space.qubit_transition(l, Level::One, Level::Excited);
    h.noalias() += rabi[l] * (drive + drive.adjoint().eval());
  }
  return h;
}

/// Time-dependent Hamiltonian H(t) for a coupling set plus pulse schedule.
/// The static cavity part and the per-qubit drive generators are built once;
/// each evaluation is a cached-matrix sum scaled by the envelopes.
class HamiltonianModel {
 public:
  HamiltonianModel(StateSpace space, CouplingSet couplings, PulseSchedule schedule)
      : space_(std::move(space)),
        couplings_(std::move(couplings)),
        schedule_(std::move(schedule)) {
    if (couplings_.n_qubits() != space_.n_qubits())
      throw ValidationError("coupling count does not match qubit count");
    if (schedule_.n_qubits() != space_.n_qubits())
      throw ValidationError("schedule qubit count does not match qubit count");
    const Matrix a = space_.cavity_annihilation();
    static_part_ = Matrix::Zero(space_.dim(), space_.dim());
    drive_generators_.reserve(space_.n_qubits());
    for (int l = 0; l < space_.n_qubits(); ++l) {
      const Matrix swap = a * space_.qubit_transition(l, Level::Excited, Level::Zero);
      static_part_.noalias() += couplings_.g[l] * (swap + swap.adjoint().eval());
      const Matrix drive = space_.qubit_transition(l, Level::One, Level::Excited);
      drive_generators_.push_back(drive + drive.adjoint().eval());
    }
  }

  const StateSpace& space() const { return space_; }
  const CouplingSet& couplings() const { return couplings_; }
  const PulseSchedule& schedule() const { return schedule_; }

  void assemble_into(double t, Matrix& out) const {
    out = static_part_;
    for (int l = 0; l < space_.n_qubits(); ++l) {
      const double omega = schedule_.envelope(l, t);
      if (omega != 0.0) out.noalias() += omega * drive_generators_[l];
    }
  }

  Matrix assemble(double t) const {
    Matrix h(space_.dim(), space_.dim());
    assemble_into(t, h);
    return h;
  }

 private:
  StateSpace space_;
  CouplingSet couplings_;
  PulseSchedule schedule_;
  Matrix static_part_;
  std::vector<Matrix> drive_generators_;
};

/// Instantaneous dark state of the single-excitation block:
///
///   |D> ~ sum_l c_l |phi_l>  -  (prod_j Omega_j) |phi_cav>,
///   c_l = g_l * prod_{j != l} Omega_j
///
/// where |phi_l> is "qubit l in |1>, no photon" and |phi_cav> is the
/// one-photon state. It carries no |e> weight and is annihilated by the
/// Hamiltonian exactly. With a single Omega_l = 0 the expression collapses
/// to the bare state |phi_l>; with two or more zero rates every coefficient
/// vanishes and there is no well-defined direction, so that is an error.
inline Vector dark_state(const StateSpace& space, const CouplingSet& couplings,
                         std::span<const double> rabi) {
  const int n = space.n_qubits();
  if (couplings.n_qubits() != n)
    throw ValidationError("coupling count does not match qubit count");
  if (static_cast<int>(rabi.size()) != n)
    throw ValidationError("Rabi rate count does not match qubit count");
  for (int l = 0; l < n; ++l)
    if (couplings.g[l] == 0.0)
      throw ValidationError("dark state undefined with a zero coupling");

  std::vector<double> coeff(n + 1, 0.0);
  for (int l = 0; l < n; ++l) {
    double c = couplings.g[l];
    for (int j = 0; j < n; ++j)
      if (j != l) c *= rabi[j];
    coeff[l] = c;
  }
  double photon_coeff = -1.0;
  for (int j = 0; j < n; ++j) photon_coeff *= rabi[j];
  coeff[n] = photon_coeff;

  double scale = 0.0;
  for (double c : coeff) scale = std::max(scale, std::abs(c));
  if (scale == 0.0)
    throw ValidationError("dark state undefined: two or more Rabi rates are zero");
  double norm_sq = 0.0;
  for (double& c : coeff) {
    c /= scale;  // keeps the single-term case exact and the products tame
    norm_sq += c * c;
  }
  const double norm = std::sqrt(norm_sq);

  const auto basis = space.single_excitation_basis();
  Vector state = Vector::Zero(space.dim());
  for (int k = 0; k <= n; ++k)
    state(space.basis_index(basis[k])) = coeff[k] / norm;
  return state;
}

/// All qubits in |0>, cavity empty: the stationary zero-excitation corner.
inline Vector zero_excitation_state(const StateSpace& space) {
  return space.basis_vector(BasisLabel{0, std::vector<Level>(space.n_qubits(), Level::Zero)});
}

}  // namespace passage
