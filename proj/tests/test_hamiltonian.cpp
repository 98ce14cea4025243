// Copyright 2026 The Passage Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include <passage/hamiltonian.hpp>

using namespace passage;

namespace {

// Independent construction straight from the matrix-element rules: walk every
// basis label, apply each coupling term to it, and collect amplitudes.
Matrix hamiltonian_by_rules(const StateSpace& space, const std::vector<double>& g,
                            const std::vector<double>& rabi) {
  Matrix h = Matrix::Zero(space.dim(), space.dim());
  for (int j = 0; j < space.dim(); ++j) {
    const BasisLabel from = space.label_of(j);
    for (int l = 0; l < space.n_qubits(); ++l) {
      if (from.qubit_levels[l] == Level::Zero && from.photon >= 1) {
        BasisLabel to = from;
        to.photon -= 1;
        to.qubit_levels[l] = Level::Excited;
        h(space.basis_index(to), j) += g[l] * std::sqrt(double(from.photon));
      }
      if (from.qubit_levels[l] == Level::Excited &&
          from.photon + 1 <= space.photon_cutoff()) {
        BasisLabel to = from;
        to.photon += 1;
        to.qubit_levels[l] = Level::Zero;
        h(space.basis_index(to), j) += g[l] * std::sqrt(double(from.photon + 1));
      }
      if (from.qubit_levels[l] == Level::Excited) {
        BasisLabel to = from;
        to.qubit_levels[l] = Level::One;
        h(space.basis_index(to), j) += rabi[l];
      }
      if (from.qubit_levels[l] == Level::One) {
        BasisLabel to = from;
        to.qubit_levels[l] = Level::Excited;
        h(space.basis_index(to), j) += rabi[l];
      }
    }
  }
  return h;
}

}  // namespace

TEST_CASE("assembled Hamiltonian matches the matrix-element rules",
          "[hamiltonian]") {
  StateSpace space(3, 2);
  const std::vector<double> g{1.1, 0.9, 1.4};
  const std::vector<double> rabi{0.3, 0.0, 2.2};
  const Matrix h = hamiltonian_at(space, CouplingSet{g}, rabi);
  const Matrix ref = hamiltonian_by_rules(space, g, rabi);
  CHECK((h - ref).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((h - h.adjoint()).norm() == 0.0);
}

TEST_CASE("Hamiltonian commutes with the excitation operator",
          "[hamiltonian]") {
  StateSpace space(3, 2);
  const std::vector<double> g{2.0, 1.0, 1.5};
  const std::vector<double> rabi{0.7, 1.3, 0.2};
  const Matrix h = hamiltonian_at(space, CouplingSet{g}, rabi);
  const Matrix n_op = space.excitation_operator();
  const Matrix comm = h * n_op - n_op * h;
  CHECK(comm.norm() <= 1e-13 * h.norm() * n_op.norm());
}

TEST_CASE("argument count mismatches are rejected", "[hamiltonian]") {
  StateSpace space(3, 1);
  CHECK_THROWS_AS(
      hamiltonian_at(space, CouplingSet{{1.0, 2.0}}, std::vector<double>{1, 2, 3}),
      ValidationError);
  CHECK_THROWS_AS(hamiltonian_at(space, CouplingSet{{1.0, 2.0, 3.0}},
                                 std::vector<double>{1, 2}),
                  ValidationError);
}

TEST_CASE("model assembly equals direct assembly at sampled times",
          "[hamiltonian]") {
  StateSpace space(3, 1);
  CouplingSet cpl{{angular_from_mhz(180.0), angular_from_mhz(200.0),
                   angular_from_mhz(160.0)}};
  const PulseSchedule sched = builtin_schedule("qst-fig2");
  HamiltonianModel model(space, cpl, sched);
  for (double t : {0.0, 0.21, 0.35, 0.52, 0.85}) {
    std::vector<double> rabi;
    for (int q = 0; q < 3; ++q) rabi.push_back(sched.envelope(q, t));
    const Matrix direct = hamiltonian_at(space, cpl, rabi);
    CHECK((model.assemble(t) - direct).norm() == 0.0);
  }
  Matrix buf;
  model.assemble_into(0.4, buf);
  CHECK((buf - model.assemble(0.4)).norm() == 0.0);

  PulseSchedule two_qubit;
  two_qubit.terms.resize(2);
  CHECK_THROWS_AS(HamiltonianModel(space, cpl, two_qubit), ValidationError);
  CHECK_THROWS_AS(HamiltonianModel(space, CouplingSet{{1.0}}, sched),
                  ValidationError);
}

TEST_CASE("dark state is annihilated and carries no excited weight",
          "[hamiltonian]") {
  StateSpace space(3, 1);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.05, 4.0);
  for (int draw = 0; draw < 25; ++draw) {
    std::vector<double> g(3), rabi(3);
    for (int l = 0; l < 3; ++l) {
      g[l] = dist(rng);
      rabi[l] = dist(rng);
    }
    const CouplingSet cpl{g};
    const Vector d = dark_state(space, cpl, rabi);
    CHECK(std::abs(d.norm() - 1.0) < 1e-14);
    const Matrix h = hamiltonian_at(space, cpl, rabi);
    CHECK((h * d).norm() <= 1e-12 * h.norm());
    for (int l = 0; l < 3; ++l) {
      BasisLabel e_state{0, std::vector<Level>(3, Level::Zero)};
      e_state.qubit_levels[l] = Level::Excited;
      CHECK(d(space.basis_index(e_state)) == complexd(0.0));
    }
  }
}

TEST_CASE("dark state collapses exactly when one drive vanishes",
          "[hamiltonian]") {
  StateSpace space(3, 1);
  const CouplingSet cpl{{1.3, 0.7, 2.1}};
  const std::vector<double> rabi{0.0, 1.7, 0.4};
  const Vector d = dark_state(space, cpl, rabi);
  BasisLabel phi1{0, {Level::One, Level::Zero, Level::Zero}};
  CHECK(d(space.basis_index(phi1)) == complexd(1.0));
  CHECK(std::abs(d.norm() - 1.0) == 0.0);
}

TEST_CASE("dark state rejects degenerate inputs", "[hamiltonian]") {
  StateSpace space(3, 1);
  CHECK_THROWS_AS(
      dark_state(space, CouplingSet{{0.0, 1.0, 1.0}}, std::vector<double>{1, 1, 1}),
      ValidationError);
  CHECK_THROWS_AS(dark_state(space, CouplingSet{{1.0, 1.0, 1.0}},
                             std::vector<double>{0.0, 0.0, 1.0}),
                  ValidationError);
}

TEST_CASE("dark state generalizes past three qubits", "[hamiltonian]") {
  StateSpace space(5, 1);
  std::vector<double> g{1.0, 1.2, 0.8, 1.5, 0.9};
  std::vector<double> rabi{0.4, 2.0, 1.1, 0.6, 1.8};
  const CouplingSet cpl{g};
  const Vector d = dark_state(space, cpl, rabi);
  const Matrix h = hamiltonian_at(space, cpl, rabi);
  CHECK((h * d).norm() <= 1e-12 * h.norm());
}

TEST_CASE("the zero-excitation corner is stationary", "[hamiltonian]") {
  StateSpace space(3, 1);
  const CouplingSet cpl{{1.0, 2.0, 3.0}};
  const Vector ground = zero_excitation_state(space);
  CHECK(ground(0) == complexd(1.0));
  const Matrix h = hamiltonian_at(space, cpl, std::vector<double>{0.5, 0.6, 0.7});
  CHECK((h * ground).norm() == 0.0);
}
