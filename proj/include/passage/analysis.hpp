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

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "passage/common.hpp"
#include "passage/hamiltonian.hpp"
#include "passage/statespace.hpp"
#include "passage/trajectory.hpp"

namespace passage {

/// A pure target state with the label it was requested under.
struct TargetState {
  std::string label;
  Vector state;
};

/// Equal-weight single-excitation superposition across all qubits,
/// (1/sqrt(N)) sum_l |0...1_l...0>, cavity empty.
inline Vector w_state(const StateSpace& space) {
  const auto basis = space.single_excitation_basis();
  Vector state = Vector::Zero(space.dim());
  const double amp = 1.0 / std::sqrt(double(space.n_qubits()));
  for (int l = 0; l < space.n_qubits(); ++l)
    state(space.basis_index(basis[l])) = amp;
  return state;
}

/// Resolves a state label:
///   "phiK"        K-th single-excitation basis state, K = 1 .. 2N+1
///   "w-state"     the equal-weight W state
///   "ground"      all qubits |0>, cavity empty
///   "c:n|q:xyz"   explicit product basis state
inline TargetState state_from_label(const StateSpace& space, const std::string& label) {
  if (label == "w-state") return {label, w_state(space)};
  if (label == "ground") return {label, zero_excitation_state(space)};
  if (label.rfind("phi", 0) == 0) {
    const std::string num = label.substr(3);
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
      throw ValidationError("bad single-excitation state label: " + label);
    const int k = std::stoi(num);
    const auto basis = space.single_excitation_basis();
    if (k < 1 || k > static_cast<int>(basis.size()))
      throw ValidationError("single-excitation index out of range in label: " + label);
    return {label, space.basis_vector(basis[k - 1])};
  }
  return {label, space.basis_vector(basis_label_from_string(label))};
}

namespace detail {

/// Hermitian PSD square root with a small tolerance for the slightly
/// negative eigenvalues an integrator can produce. Anything clearly
/// negative is a real input error.
inline Matrix psd_sqrt(const Matrix& rho, double negativity_tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  if (es.info() != Eigen::Success)
    throw ValidationError("eigendecomposition failed in matrix square root");
  Eigen::VectorXd vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -negativity_tol)
      throw ValidationError("matrix square root of a non-PSD matrix");
    vals(i) = std::sqrt(std::max(0.0, vals(i)));
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Squared-overlap fidelity of two pure states, |<a|b>|^2.
inline double fidelity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ValidationError("fidelity: dimension mismatch");
  return std::norm(a.dot(b));
}

/// Fidelity of a density matrix against a pure state, <psi|rho|psi>.
inline double fidelity(const Matrix& rho, const Vector& psi) {
  if (rho.rows() != psi.size()) throw ValidationError("fidelity: dimension mismatch");
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

/// Uhlmann fidelity of two density matrices,
///   F(rho, sigma) = ( Tr sqrt( sqrt(rho) sigma sqrt(rho) ) )^2.
/// Reduces to the pure-state overlaps when either argument is rank one.
inline double fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows()) throw ValidationError("fidelity: dimension mismatch");
  const Matrix root = detail::psd_sqrt(rho);
  const Matrix inner = root * sigma * root;
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
  double trace_root = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    trace_root += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return trace_root * trace_root;
}

/// Population of one basis state in a pure or mixed state.
inline double population(const Vector& psi, int basis_index) {
  return std::norm(psi(basis_index));
}

inline double population(const Matrix& rho, int basis_index) {
  return rho(basis_index, basis_index).real();
}

/// Populations of a list of labeled states, in label order. Labels may name
/// superpositions, in which case the squared overlap is reported.
inline std::vector<double> populations(const StateSpace& space, const Vector& psi,
                                       const std::vector<std::string>& labels) {
  std::vector<double> out;
  out.reserve(labels.size());
  for (const std::string& label : labels)
    out.push_back(fidelity(psi, state_from_label(space, label).state));
  return out;
}

inline std::vector<double> populations(const StateSpace& space, const Matrix& rho,
                                       const std::vector<std::string>& labels) {
  std::vector<double> out;
  out.reserve(labels.size());
  for (const std::string& label : labels)
    out.push_back(fidelity(rho, state_from_label(space, label).state));
  return out;
}

/// <N_e>: photons plus qubits outside |0>. Diagonal, so only populations
/// enter.
inline double excitation_expectation(const StateSpace& space, const Vector& psi) {
  double total = 0.0;
  for (int i = 0; i < space.dim(); ++i)
    total += space.excitation_number(space.label_of(i)) * std::norm(psi(i));
  return total;
}

inline double excitation_expectation(const StateSpace& space, const Matrix& rho) {
  double total = 0.0;
  for (int i = 0; i < space.dim(); ++i)
    total += space.excitation_number(space.label_of(i)) * rho(i, i).real();
  return total;
}

/// Default per-run tracked populations: the full single-excitation ladder.
/// Spaces without a cavity excitation have no such ladder; nothing is tracked.
inline std::vector<std::string> default_tracked_labels(const StateSpace& space) {
  std::vector<std::string> labels;
  if (space.photon_cutoff() < 1) return labels;
  const auto basis = space.single_excitation_basis();
  labels.reserve(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    labels.push_back("phi" + std::to_string(k + 1));
  return labels;
}

/// Fills the derived series of a record: tracked-state populations, target
/// fidelity, and <N_e> at every record point.
inline void annotate(TrajectoryRecord& record, const StateSpace& space,
                     const TargetState& target,
                     const std::vector<std::string>& tracked_labels) {
  const int n_rec = record.n_records();
  record.tracked_labels = tracked_labels;
  record.populations.resize(static_cast<Eigen::Index>(tracked_labels.size()), n_rec);
  record.fidelity.resize(n_rec);
  record.ne_expectation.resize(n_rec);

  std::vector<Vector> tracked_states;
  tracked_states.reserve(tracked_labels.size());
  for (const std::string& label : tracked_labels)
    tracked_states.push_back(state_from_label(space, label).state);

  for (int r = 0; r < n_rec; ++r) {
    if (record.is_density()) {
      const Matrix& rho = record.density_states[r];
      for (std::size_t k = 0; k < tracked_states.size(); ++k)
        record.populations(static_cast<Eigen::Index>(k), r) = fidelity(rho, tracked_states[k]);
      record.fidelity[r] = fidelity(rho, target.state);
      record.ne_expectation[r] = excitation_expectation(space, rho);
    } else {
      const Vector& psi = record.pure_states[r];
      for (std::size_t k = 0; k < tracked_states.size(); ++k)
        record.populations(static_cast<Eigen::Index>(k), r) = fidelity(psi, tracked_states[k]);
      record.fidelity[r] = fidelity(psi, target.state);
      record.ne_expectation[r] = excitation_expectation(space, psi);
    }
  }
}

/// First record time at which the target fidelity reaches `threshold`, if any.
inline std::optional<double> time_first_above(const TrajectoryRecord& record,
                                              double threshold) {
  for (int r = 0; r < record.n_records(); ++r)
    if (record.fidelity[r] >= threshold) return record.times[r];
  return std::nullopt;
}

/// Headline numbers for one evolution.
struct RunSummary {
  std::string scenario;
  std::string target_label;
  double final_fidelity = 0.0;
  double max_fidelity = 0.0;
  double t_of_max_us = 0.0;
  double final_drift = 0.0;    // |norm - 1| or |trace - 1| at t_end
  double max_drift = 0.0;
  double ne_final = 0.0;
  double ne_max_deviation = 0.0;  // max |<N_e>(t) - <N_e>(0)|, closed-system conservation probe
  double t_end_us = 0.0;
  double dt_ns = 0.0;
  int n_steps = 0;
};

inline RunSummary summarize(const TrajectoryRecord& record, const std::string& scenario_name,
                            const std::string& target_label, const TimeGrid& grid) {
  if (record.fidelity.empty())
    throw ValidationError("summarize needs an annotated record");
  RunSummary s;
  s.scenario = scenario_name;
  s.target_label = target_label;
  s.final_fidelity = record.fidelity.back();
  const auto max_it = std::max_element(record.fidelity.begin(), record.fidelity.end());
  s.max_fidelity = *max_it;
  s.t_of_max_us = record.times[static_cast<std::size_t>(max_it - record.fidelity.begin())];
  s.final_drift = record.final_drift();
  s.max_drift = record.max_drift();
  s.ne_final = record.ne_expectation.back();
  double ne0 = record.ne_expectation.front();
  for (double ne : record.ne_expectation)
    s.ne_max_deviation = std::max(s.ne_max_deviation, std::abs(ne - ne0));
  s.t_end_us = grid.t_end;
  s.dt_ns = ns_from_us(grid.dt());
  s.n_steps = grid.n_steps;
  return s;
}

}  // namespace passage
