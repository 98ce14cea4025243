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

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "passage/common.hpp"

namespace passage {

/// Transmon levels, ordered (|0>, |e>, |1>) so that both driven transitions
/// (0<->e via the cavity, e<->1 via the classical pulse) touch the middle
/// index. |0> and |1> are the computational pair, |e> the passage level.
enum class Level : int { Zero = 0, Excited = 1, One = 2 };

inline char level_char(Level l) {
  switch (l) {
    case Level::Zero: return '0';
    case Level::Excited: return 'e';
    case Level::One: return '1';
  }
  return '?';
}

inline Level level_from_char(char c) {
  switch (c) {
    case '0': return Level::Zero;
    case 'e': return Level::Excited;
    case '1': return Level::One;
  }
  throw ValidationError(std::string("unknown qubit level character '") + c + "'");
}

/// One product-basis state: cavity Fock number plus a level per qubit.
struct BasisLabel {
  int photon = 0;
  std::vector<Level> qubit_levels;

  bool operator==(const BasisLabel&) const = default;
};

/// Canonical text form, e.g. "c:1|q:0e1" for one photon, qubit 0 in |0>,
/// qubit 1 in |e>, qubit 2 in |1>.
inline std::string to_string(const BasisLabel& label) {
  std::string out = "c:" + std::to_string(label.photon) + "|q:";
  for (Level l : label.qubit_levels) out += level_char(l);
  return out;
}

inline BasisLabel basis_label_from_string(const std::string& text) {
  const std::string prefix = "c:";
  const std::string sep = "|q:";
  if (text.rfind(prefix, 0) != 0)
    throw ValidationError("basis label must start with 'c:': " + text);
  auto sep_pos = text.find(sep);
  if (sep_pos == std::string::npos)
    throw ValidationError("basis label missing '|q:' section: " + text);
  const std::string photon_part = text.substr(prefix.size(), sep_pos - prefix.size());
  if (photon_part.empty() ||
      photon_part.find_first_not_of("0123456789") != std::string::npos)
    throw ValidationError("bad photon count in basis label: " + text);
  BasisLabel label;
  label.photon = std::stoi(photon_part);
  for (std::size_t i = sep_pos + sep.size(); i < text.size(); ++i)
    label.qubit_levels.push_back(level_from_char(text[i]));
  if (label.qubit_levels.empty())
    throw ValidationError("basis label has no qubit levels: " + text);
  return label;
}

/// Which tensor slot a local operator acts on.
struct Site {
  bool is_cavity = false;
  int qubit = 0;  // ignored when is_cavity

  static Site cavity() { return {true, 0}; }
  static Site transmon(int q) { return {false, q}; }
};

/// Product Hilbert space of one cavity mode (Fock states 0..cutoff) and
/// n_qubits three-level transmons. Index layout is row-major with the cavity
/// as the most significant slot, then qubit 0, ..., qubit n-1:
///
///   index = photon * 3^n + sum_l level_l * 3^(n-1-l)
class StateSpace {
 public:
  // 10 qubits at cutoff 3 — anything larger is outside the intended regime
  // and almost certainly a config typo.
  static constexpr int kMaxDim = 236196;

  StateSpace(int n_qubits, int photon_cutoff) : n_qubits_(n_qubits), photon_cutoff_(photon_cutoff) {
    if (n_qubits < 1) throw ValidationError("n_qubits must be >= 1");
    if (photon_cutoff < 0) throw ValidationError("photon_cutoff must be >= 0");
    qubit_block_ = 1;
    for (int l = 0; l < n_qubits; ++l) {
      qubit_block_ *= 3;
      if (qubit_block_ > kMaxDim) throw ValidationError("state space dimension cap exceeded");
    }
    std::int64_t dim = static_cast<std::int64_t>(photon_cutoff + 1) * qubit_block_;
    if (dim > kMaxDim) throw ValidationError("state space dimension cap exceeded");
    dim_ = static_cast<int>(dim);
  }

  int n_qubits() const { return n_qubits_; }
  int photon_cutoff() const { return photon_cutoff_; }
  int dim() const { return dim_; }

  int basis_index(const BasisLabel& label) const {
    check(label);
    int idx = label.photon * qubit_block_;
    int stride = qubit_block_ / 3;
    for (int q = 0; q < n_qubits_; ++q) {
      idx += static_cast<int>(label.qubit_levels[q]) * stride;
      stride /= 3;
    }
    return idx;
  }

  BasisLabel label_of(int index) const {
    if (index < 0 || index >= dim_) throw ValidationError("basis index out of range");
    BasisLabel label;
    label.photon = index / qubit_block_;
    int rest = index % qubit_block_;
    label.qubit_levels.resize(n_qubits_);
    for (int q = n_qubits_ - 1; q >= 0; --q) {
      label.qubit_levels[q] = static_cast<Level>(rest % 3);
      rest /= 3;
    }
    return label;
  }

  /// Total excitation count: photons + qubits not in |0>. (|e> and |1> each
  /// count once; the dynamics conserves this number.)
  int excitation_number(const BasisLabel& label) const {
    check(label);
    int n = label.photon;
    for (Level l : label.qubit_levels)
      if (l != Level::Zero) ++n;
    return n;
  }

  /// The states with excitation number 1, in the conventional order: qubit l
  /// in |1> (l = 0..n-1), then one photon, then qubit l in |e>. Size 2n+1.
  std::vector<BasisLabel> single_excitation_basis() const {
    if (photon_cutoff_ < 1)
      throw ValidationError("single-excitation basis needs photon_cutoff >= 1");
    std::vector<BasisLabel> basis;
    basis.reserve(2 * n_qubits_ + 1);
    const std::vector<Level> all_zero(n_qubits_, Level::Zero);
    for (int q = 0; q < n_qubits_; ++q) {
      BasisLabel b{0, all_zero};
      b.qubit_levels[q] = Level::One;
      basis.push_back(std::move(b));
    }
    basis.push_back(BasisLabel{1, all_zero});
    for (int q = 0; q < n_qubits_; ++q) {
      BasisLabel b{0, all_zero};
      b.qubit_levels[q] = Level::Excited;
      basis.push_back(std::move(b));
    }
    return basis;
  }

  Vector basis_vector(const BasisLabel& label) const {
    Vector v = Vector::Zero(dim_);
    v(basis_index(label)) = 1.0;
    return v;
  }

  /// Embeds a local operator on one slot as identity everywhere else.
  Matrix embed_local(Site site, const Matrix& local) const {
    const int d_local = site.is_cavity ? photon_cutoff_ + 1 : 3;
    if (!site.is_cavity && (site.qubit < 0 || site.qubit >= n_qubits_))
      throw ValidationError("embed_local: qubit index out of range");
    if (local.rows() != d_local || local.cols() != d_local)
      throw ValidationError("embed_local: operator shape does not match the site");
    int stride = 1;  // combined dimension of slots less significant than `site`
    if (site.is_cavity) {
      stride = qubit_block_;
    } else {
      for (int q = site.qubit + 1; q < n_qubits_; ++q) stride *= 3;
    }
    const int block = d_local * stride;
    Matrix full = Matrix::Zero(dim_, dim_);
    for (int base = 0; base < dim_; base += block)
      for (int a = 0; a < d_local; ++a)
        for (int b = 0; b < d_local; ++b) {
          const complexd v = local(a, b);
          if (v == complexd(0.0)) continue;
          for (int k = 0; k < stride; ++k)
            full(base + a * stride + k, base + b * stride + k) = v;
        }
    return full;
  }

  /// Cavity annihilation operator a on the full space.
  Matrix cavity_annihilation() const {
    Matrix a = Matrix::Zero(photon_cutoff_ + 1, photon_cutoff_ + 1);
    for (int n = 1; n <= photon_cutoff_; ++n) a(n - 1, n) = std::sqrt(double(n));
    return embed_local(Site::cavity(), a);
  }

  /// |to><from| on one qubit, embedded.
  Matrix qubit_transition(int qubit, Level to, Level from) const {
    Matrix op = Matrix::Zero(3, 3);
    op(static_cast<int>(to), static_cast<int>(from)) = 1.0;
    return embed_local(Site::transmon(qubit), op);
  }

  /// Projector |level><level| on one qubit, embedded.
  Matrix qubit_projection(int qubit, Level level) const {
    return qubit_transition(qubit, level, level);
  }

  /// Diagonal operator whose eigenvalue on each basis state is its
  /// excitation number.
  Matrix excitation_operator() const {
    Matrix op = Matrix::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      op(i, i) = static_cast<double>(excitation_number(label_of(i)));
    return op;
  }

 private:
  void check(const BasisLabel& label) const {
    if (label.photon < 0 || label.photon > photon_cutoff_)
      throw ValidationError("photon number outside cutoff in label " + passage::to_string(label));
    if (static_cast<int>(label.qubit_levels.size()) != n_qubits_)
      throw ValidationError("label qubit count mismatch in " + passage::to_string(label));
  }

  int n_qubits_;
  int photon_cutoff_;
  int qubit_block_;  // 3^n_qubits
  int dim_;
};

}  // namespace passage
