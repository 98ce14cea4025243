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
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "passage/analysis.hpp"
#include "passage/common.hpp"
#include "passage/evolution.hpp"
#include "passage/hamiltonian.hpp"
#include "passage/pulses.hpp"

namespace passage {

struct ParameterBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  void validate(Eigen::Index n) const {
    if (lower.size() != n || upper.size() != n)
      throw ValidationError("parameter bounds size mismatch");
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(upper(i) > lower(i)))
        throw ValidationError("parameter bounds need upper > lower in every dimension");
  }
};

/// Maps between a flat parameter vector and a pulse schedule. Every
/// Gaussian term contributes its selected fields in (amplitude, delay,
/// width) order; terms are visited qubit by qubit.
struct PulseParameterization {
  PulseSchedule base;
  bool vary_amplitudes = true;
  bool vary_delays = true;
  bool vary_widths = false;

  int fields_per_term() const {
    return int(vary_amplitudes) + int(vary_delays) + int(vary_widths);
  }

  int n_params() const { return base.total_terms() * fields_per_term(); }

  Eigen::VectorXd pack() const {
    Eigen::VectorXd x(n_params());
    Eigen::Index i = 0;
    for (const auto& qubit_terms : base.terms)
      for (const GaussianTerm& g : qubit_terms) {
        if (vary_amplitudes) x(i++) = g.amplitude;
        if (vary_delays) x(i++) = g.delay;
        if (vary_widths) x(i++) = g.width;
      }
    return x;
  }

  PulseSchedule unpack(const Eigen::VectorXd& x) const {
    if (x.size() != n_params())
      throw ValidationError("parameter vector size does not match the parameterization");
    PulseSchedule schedule = base;
    Eigen::Index i = 0;
    for (auto& qubit_terms : schedule.terms)
      for (GaussianTerm& g : qubit_terms) {
        if (vary_amplitudes) g.amplitude = x(i++);
        if (vary_delays) g.delay = x(i++);
        if (vary_widths) g.width = x(i++);
      }
    return schedule;
  }

  /// Physically motivated box: amplitudes up to 2pi * 500 MHz, delays
  /// anywhere in the run window, widths 5 ns .. 200 ns.
  ParameterBounds default_bounds(double t_start, double t_end) const {
    ParameterBounds b;
    b.lower.resize(n_params());
    b.upper.resize(n_params());
    Eigen::Index i = 0;
    for (const auto& qubit_terms : base.terms)
      for (std::size_t k = 0; k < qubit_terms.size(); ++k) {
        if (vary_amplitudes) {
          b.lower(i) = 0.0;
          b.upper(i) = angular_from_mhz(500.0);
          ++i;
        }
        if (vary_delays) {
          b.lower(i) = t_start;
          b.upper(i) = t_end;
          ++i;
        }
        if (vary_widths) {
          b.lower(i) = us_from_ns(5.0);
          b.upper(i) = us_from_ns(200.0);
          ++i;
        }
      }
    return b;
  }
};

struct NelderMeadOptions {
  int max_evals = 400;
  double initial_step = 0.08;   // simplex edge, in normalized [0,1] coordinates
  double diameter_tol = 1e-7;   // normalized simplex diameter at convergence
};

struct EvalRecord {
  int eval_index = 0;
  int start_index = 0;
  double value = 0.0;
  Eigen::VectorXd params;
};

struct OptimizeResult {
  Eigen::VectorXd best_params;
  double best_value = std::numeric_limits<double>::infinity();
  int best_start = 0;
  int n_evals = 0;
  bool converged = false;
  std::vector<EvalRecord> history;
};

/// Bounded Nelder-Mead. Works in coordinates normalized by the bounds, so
/// one step size covers parameters of very different magnitudes; every
/// candidate is clamped into the box before evaluation. The returned best
/// is the best point ever evaluated, never worse than the start point.
inline OptimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                                  const Eigen::VectorXd& x0, const ParameterBounds& bounds,
                                  const NelderMeadOptions& options = {}) {
  const Eigen::Index n = x0.size();
  if (n < 1) throw ValidationError("nelder_mead needs at least one parameter");
  bounds.validate(n);
  if (options.max_evals < 1) throw ValidationError("max_evals must be >= 1");

  const Eigen::VectorXd range = bounds.upper - bounds.lower;
  auto denorm = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    return bounds.lower + z.cwiseProduct(range);
  };
  auto clamp01 = [](Eigen::VectorXd z) {
    return z.cwiseMax(0.0).cwiseMin(1.0).eval();
  };

  OptimizeResult result;
  int age_counter = 0;
  auto evaluate = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd x = denorm(z);
    const double value = fn(x);
    EvalRecord rec{result.n_evals, 0, value, x};
    result.history.push_back(std::move(rec));
    ++result.n_evals;
    if (value < result.best_value) {
      result.best_value = value;
      result.best_params = x;
    }
    return value;
  };

  struct Vertex {
    Eigen::VectorXd z;
    double value;
    int age;  // tie-break: older vertex ranks first, keeps ordering stable
  };
  auto vertex_less = [](const Vertex& a, const Vertex& b) {
    return a.value < b.value || (a.value == b.value && a.age < b.age);
  };

  Eigen::VectorXd z0 = clamp01(((x0 - bounds.lower).cwiseQuotient(range)).eval());
  std::vector<Vertex> simplex;
  simplex.push_back({z0, evaluate(z0), age_counter++});
  for (Eigen::Index i = 0; i < n && result.n_evals < options.max_evals; ++i) {
    Eigen::VectorXd z = z0;
    z(i) += (z0(i) + options.initial_step <= 1.0) ? options.initial_step : -options.initial_step;
    z = clamp01(z);
    simplex.push_back({z, evaluate(z), age_counter++});
  }

  // Degenerate start (budget exhausted while seeding): report what we have.
  if (static_cast<Eigen::Index>(simplex.size()) < n + 1) return result;

  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  while (result.n_evals < options.max_evals) {
    std::sort(simplex.begin(), simplex.end(), vertex_less);

    double diameter = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      diameter = std::max(diameter, (simplex[i].z - simplex[0].z).cwiseAbs().maxCoeff());
    if (diameter < options.diameter_tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i].z;
    centroid /= double(n);

    Vertex& worst = simplex.back();
    const double best_v = simplex.front().value;
    const double second_worst_v = simplex[simplex.size() - 2].value;

    const Eigen::VectorXd z_reflect = clamp01(centroid + kReflect * (centroid - worst.z));
    const double v_reflect = evaluate(z_reflect);

    if (v_reflect < best_v && result.n_evals < options.max_evals) {
      const Eigen::VectorXd z_expand = clamp01(centroid + kExpand * (z_reflect - centroid));
      const double v_expand = evaluate(z_expand);
      if (v_expand < v_reflect)
        worst = {z_expand, v_expand, age_counter++};
      else
        worst = {z_reflect, v_reflect, age_counter++};
    } else if (v_reflect < second_worst_v) {
      worst = {z_reflect, v_reflect, age_counter++};
    } else if (result.n_evals < options.max_evals) {
      const bool outside = v_reflect < worst.value;
      const Eigen::VectorXd& z_toward = outside ? z_reflect : worst.z;
      const Eigen::VectorXd z_contract = clamp01(centroid + kContract * (z_toward - centroid));
      const double v_contract = evaluate(z_contract);
      if (v_contract < std::min(v_reflect, worst.value)) {
        worst = {z_contract, v_contract, age_counter++};
      } else {
        const Eigen::VectorXd z_best = simplex.front().z;
        for (std::size_t i = 1; i < simplex.size() && result.n_evals < options.max_evals; ++i) {
          simplex[i].z = clamp01(z_best + kShrink * (simplex[i].z - z_best));
          simplex[i].value = evaluate(simplex[i].z);
          simplex[i].age = age_counter++;
        }
      }
    }
  }
  return result;
}

/// Latin-hypercube start points in the bounds box (deterministic in seed).
inline std::vector<Eigen::VectorXd> latin_hypercube(const ParameterBounds& bounds,
                                                    int n_samples, std::uint64_t seed) {
  const Eigen::Index n = bounds.lower.size();
  std::vector<Eigen::VectorXd> samples(n_samples, Eigen::VectorXd(n));
  if (n_samples == 0) return samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> strata(n_samples);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int k = 0; k < n_samples; ++k) strata[k] = k;
    std::shuffle(strata.begin(), strata.end(), rng);
    for (int k = 0; k < n_samples; ++k) {
      const double z = (strata[k] + unit(rng)) / n_samples;
      samples[k](j) = bounds.lower(j) + z * (bounds.upper(j) - bounds.lower(j));
    }
  }
  return samples;
}

/// Runs Nelder-Mead from x0 plus (n_starts - 1) Latin-hypercube points and
/// keeps the best result. Start points are generated up front from one
/// seeded generator, so the outcome is independent of thread count; ties
/// between starts resolve to the lower start index.
inline OptimizeResult multi_start(const std::function<double(const Eigen::VectorXd&)>& fn,
                                  const Eigen::VectorXd& x0, const ParameterBounds& bounds,
                                  int n_starts, std::uint64_t seed,
                                  const NelderMeadOptions& options = {}, int threads = 1) {
  if (n_starts < 1) throw ValidationError("multi_start needs n_starts >= 1");
  bounds.validate(x0.size());

  std::vector<Eigen::VectorXd> starts;
  starts.reserve(n_starts);
  starts.push_back(x0);
  for (Eigen::VectorXd& s : latin_hypercube(bounds, n_starts - 1, seed))
    starts.push_back(std::move(s));

  std::vector<OptimizeResult> per_start(n_starts);
  const int n_workers = std::max(1, std::min(threads, n_starts));
  auto work = [&](int worker) {
    for (int s = worker; s < n_starts; s += n_workers)
      per_start[s] = nelder_mead(fn, starts[s], bounds, options);
  };
  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }

  OptimizeResult merged;
  int eval_counter = 0;
  for (int s = 0; s < n_starts; ++s) {
    OptimizeResult& r = per_start[s];
    for (EvalRecord& rec : r.history) {
      rec.eval_index = eval_counter++;
      rec.start_index = s;
      merged.history.push_back(std::move(rec));
    }
    merged.n_evals += r.n_evals;
    if (r.best_value < merged.best_value) {
      merged.best_value = r.best_value;
      merged.best_params = r.best_params;
      merged.best_start = s;
      merged.converged = r.converged;
    }
  }
  return merged;
}

/// Closed-system pulse objective. Evaluation unpacks the parameters,
/// integrates on the (typically coarse) grid, and scores one of:
///
///   MaxFidelity    -max_t F(t), optionally plus a lateness penalty
///                  time_penalty_weight * (t_max - t_start)/(t_end - t_start)
///   FinalFidelity  -F(t_end)
///   RoundTrip      -F_end(target) * max_t F_transit(t), demanding both the
///                  return and a genuine visit to the transit state
///
/// Parameter sets that blow up the integrator score +1, strictly worse than
/// any physical value.
class Objective {
 public:
  enum class Mode { MaxFidelity, FinalFidelity, RoundTrip };

  Objective(StateSpace space, CouplingSet couplings, PulseParameterization parameterization,
            Vector initial, TargetState target, TimeGrid grid, Mode mode,
            double time_penalty_weight = 0.0, std::optional<TargetState> transit = std::nullopt)
      : space_(std::move(space)),
        couplings_(std::move(couplings)),
        parameterization_(std::move(parameterization)),
        initial_(std::move(initial)),
        target_(std::move(target)),
        grid_(grid),
        mode_(mode),
        time_penalty_weight_(time_penalty_weight),
        transit_(std::move(transit)) {
    grid_.validate();
    if (mode_ == Mode::RoundTrip && !transit_)
      throw ValidationError("round-trip objective needs a transit state");
    if (time_penalty_weight_ < 0.0)
      throw ValidationError("time penalty weight must be >= 0");
  }

  const PulseParameterization& parameterization() const { return parameterization_; }
  const TimeGrid& grid() const { return grid_; }

  double operator()(const Eigen::VectorXd& x) const { return evaluate(x); }

  double evaluate(const Eigen::VectorXd& x) const {
    TrajectoryRecord record;
    try {
      const PulseSchedule schedule = parameterization_.unpack(x);
      HamiltonianModel model(space_, couplings_, schedule);
      record = evolve_schrodinger(model, initial_, grid_);
    } catch (const IntegrationError&) {
      return 1.0;
    }

    double max_f = 0.0, t_of_max = grid_.t_start, final_f = 0.0;
    for (int r = 0; r < record.n_records(); ++r) {
      const double f = fidelity(record.pure_states[r], target_.state);
      if (f > max_f) {
        max_f = f;
        t_of_max = record.times[r];
      }
      if (r + 1 == record.n_records()) final_f = f;
    }

    switch (mode_) {
      case Mode::MaxFidelity: {
        double value = -max_f;
        if (time_penalty_weight_ > 0.0)
          value += time_penalty_weight_ * (t_of_max - grid_.t_start) /
                   (grid_.t_end - grid_.t_start);
        return value;
      }
      case Mode::FinalFidelity:
        return -final_f;
      case Mode::RoundTrip: {
        double max_transit = 0.0;
        for (int r = 0; r < record.n_records(); ++r)
          max_transit = std::max(max_transit,
                                 fidelity(record.pure_states[r], transit_->state));
        return -final_f * max_transit;
      }
    }
    return 1.0;
  }

 private:
  StateSpace space_;
  CouplingSet couplings_;
  PulseParameterization parameterization_;
  Vector initial_;
  TargetState target_;
  TimeGrid grid_;
  Mode mode_;
  double time_penalty_weight_;
  std::optional<TargetState> transit_;
};

}  // namespace passage
