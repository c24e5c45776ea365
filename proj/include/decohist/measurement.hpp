// Copyright 2026 The decohist authors
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

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "decohist/histories.hpp"

namespace decohist {

// ---------------------------------------------------------------------------
// Spin preparation: c |phi_+> + sqrt(1 - |c|^2) |phi_->.
// ---------------------------------------------------------------------------

template <class Scalar>
struct SpinPreparation {
  Complex<Scalar> c;

  static SpinPreparation from_amplitude(Complex<Scalar> amplitude,
                                        Scalar tol = Scalar(structural_tolerance)) {
    if (std::norm(amplitude) > Scalar(1) + tol) {
      throw std::invalid_argument("SpinPreparation: |c| exceeds 1");
    }
    return SpinPreparation{amplitude};
  }

  static SpinPreparation from_up_probability(Scalar p) {
    if (p < Scalar(0) || p > Scalar(1)) {
      throw std::invalid_argument("SpinPreparation: probability outside [0,1]");
    }
    return SpinPreparation{Complex<Scalar>(std::sqrt(p), 0)};
  }

  Scalar up_probability() const { return std::min(std::norm(c), Scalar(1)); }

  /// The amplitude of |phi_->, taken real non-negative.
  Scalar down_amplitude() const {
    return std::sqrt(std::max(Scalar(0), Scalar(1) - std::norm(c)));
  }

  Vector<Scalar> state() const {
    Vector<Scalar> v(2);
    v << c, Complex<Scalar>(down_amplitude(), 0);
    return v;
  }
};

// ---------------------------------------------------------------------------
// Outcome strings.  Trial j maps to bit (n-1-j) of the index (first factor is
// most significant); bit 0 reads '+', bit 1 reads '-'.
// ---------------------------------------------------------------------------

inline std::string outcome_string(std::uint64_t bits, std::size_t trials) {
  std::string s(trials, '+');
  for (std::size_t j = 0; j < trials; ++j) {
    if ((bits >> (trials - 1 - j)) & 1u) s[j] = '-';
  }
  return s;
}

/// Number of '+' outcomes in a basis index.
inline std::size_t plus_count(std::uint64_t bits, std::size_t trials) {
  return trials - static_cast<std::size_t>(
                      std::popcount(bits & ((std::uint64_t(1) << trials) - 1)));
}

// ---------------------------------------------------------------------------
// The von Neumann pointer coupling.
//
// The pointer is a d-level register starting at position 0.  The coupling
// shifts it cyclically by m_+ or m_- steps conditioned on the system spin, so
// exp(-i H t_coupling) is a controlled permutation.  H is assembled in the
// pointer Fourier basis, which makes it exactly hermitian.
// ---------------------------------------------------------------------------

inline std::pair<Index, Index> pointer_record_positions(Index pointer_dim) {
  return pointer_dim == 2 ? std::pair<Index, Index>{0, 1}
                          : std::pair<Index, Index>{1, 2};
}

template <class Scalar>
Matrix<Scalar> pointer_coupling_hamiltonian(Index pointer_dim,
                                            Scalar coupling_time = Scalar(1)) {
  if (pointer_dim < 2) {
    throw std::invalid_argument("pointer_coupling_hamiltonian: pointer_dim < 2");
  }
  const Index d = pointer_dim;
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Matrix<Scalar> fourier(d, d);
  for (Index p = 0; p < d; ++p) {
    for (Index k = 0; k < d; ++k) {
      const Scalar phase = two_pi * Scalar(p) * Scalar(k) / Scalar(d);
      fourier(p, k) = Complex<Scalar>(std::cos(phase), std::sin(phase)) /
                      std::sqrt(Scalar(d));
    }
  }
  const auto [shift_plus, shift_minus] = pointer_record_positions(d);
  auto block = [&](Index shift) {
    Vector<Scalar> phases(d);
    for (Index k = 0; k < d; ++k) {
      const Index step = (k * shift) % d;
      phases(k) = Complex<Scalar>(two_pi * Scalar(step) / Scalar(d) / coupling_time, 0);
    }
    return Matrix<Scalar>(fourier * phases.asDiagonal() * fourier.adjoint());
  };

  Matrix<Scalar> h = Matrix<Scalar>::Zero(2 * d, 2 * d);
  h.topLeftCorner(d, d) = block(shift_plus);
  h.bottomRightCorner(d, d) = block(shift_minus);
  // Round away the anti-hermitian dust so the structural flag is exact.
  return ((h + h.adjoint()) / Scalar(2)).eval();
}

/// System (x) pointer space with the controlled-shift coupling, one sample
/// time after the coupling, and the pointer-configuration partition.  The two
/// nonzero branch weights are |c|^2 and 1 - |c|^2.
template <class Scalar>
HistorySpace<Scalar> von_neumann_model(const SpinPreparation<Scalar>& prep,
                                       Index pointer_dim = 2,
                                       Scalar coupling_time = Scalar(1)) {
  const Index d = pointer_dim;
  Matrix<Scalar> h = pointer_coupling_hamiltonian<Scalar>(d, coupling_time);
  Vector<Scalar> omega = tensor_product(prep.state(), basis_state<Scalar>(d, 0));

  const auto [pos_plus, pos_minus] = pointer_record_positions(d);
  std::vector<std::vector<Index>> groups;
  std::vector<std::string> labels;
  for (Index p = 0; p < d; ++p) {
    groups.push_back({p, d + p});  // both spin sectors, pointer at p
    if (p == pos_plus) {
      labels.push_back("+");
    } else if (p == pos_minus) {
      labels.push_back("-");
    } else if (p == 0) {
      labels.push_back("ready");
    } else {
      labels.push_back("idle" + std::to_string(p));
    }
  }
  auto partition = ProjectorPartition<Scalar>::basis_partition(2 * d, groups, labels);
  return HistorySpace<Scalar>::uniform(std::move(h), std::move(omega),
                                       {coupling_time}, std::move(partition));
}

// ---------------------------------------------------------------------------
// N-fold simultaneous measurement.
//
// The canonical construction keeps one qubit per trial carrying the
// post-coupling branch amplitudes (c, sqrt(1-|c|^2)); the record partition is
// the product basis, so the space stays at dimension 2^N.  The `explicit`
// variant below carries a full system (x) pointer pair per trial and agrees
// with it weight-for-weight; use it at small N to cross-check.
// ---------------------------------------------------------------------------

template <class Scalar>
HistorySpace<Scalar> repeated_measurement_space(
    const SpinPreparation<Scalar>& prep, std::size_t trials,
    std::size_t budget = default_history_budget) {
  if (trials == 0) {
    throw std::invalid_argument("repeated_measurement_space: need >= 1 trial");
  }
  if (trials >= 63 || (std::size_t(1) << trials) > budget) {
    throw BudgetExceeded("repeated_measurement_space: 2^N exceeds budget");
  }
  const std::size_t dim = std::size_t(1) << trials;
  Vector<Scalar> omega = prep.state();
  for (std::size_t j = 1; j < trials; ++j) {
    omega = tensor_product(omega, prep.state()).eval();
  }
  std::vector<std::vector<Index>> groups;
  std::vector<std::string> labels;
  groups.reserve(dim);
  labels.reserve(dim);
  for (std::size_t f = 0; f < dim; ++f) {
    groups.push_back({static_cast<Index>(f)});
    labels.push_back(outcome_string(f, trials));
  }
  auto partition = ProjectorPartition<Scalar>::basis_partition(
      static_cast<Index>(dim), groups, labels);
  Matrix<Scalar> h = Matrix<Scalar>::Zero(static_cast<Index>(dim),
                                          static_cast<Index>(dim));
  return HistorySpace<Scalar>::uniform(std::move(h), std::move(omega),
                                       {Scalar(1)}, std::move(partition));
}

/// Full system (x) pointer pair per trial (pointer_dim fixed at 2), coupled
/// by the von Neumann Hamiltonian, measured all at once via the pointer
/// partition.  Dimension (2*2)^N, so N stays small.
template <class Scalar>
HistorySpace<Scalar> repeated_measurement_space_explicit(
    const SpinPreparation<Scalar>& prep, std::size_t trials,
    Index max_dim = 1024) {
  if (trials == 0) {
    throw std::invalid_argument("repeated_measurement_space_explicit: need >= 1 trial");
  }
  Index dim = 1;
  for (std::size_t j = 0; j < trials; ++j) {
    if (dim > max_dim / 4) {
      throw BudgetExceeded("repeated_measurement_space_explicit: dimension cap");
    }
    dim *= 4;
  }

  const Matrix<Scalar> trial_h = pointer_coupling_hamiltonian<Scalar>(2);
  const Vector<Scalar> trial_state =
      tensor_product(prep.state(), basis_state<Scalar>(2, 0));

  Matrix<Scalar> h = Matrix<Scalar>::Zero(dim, dim);
  Vector<Scalar> omega = trial_state;
  for (std::size_t j = 0; j < trials; ++j) {
    const Index left = Index(1) << (2 * j);
    const Index right = dim / (4 * left);
    h += tensor_product(
        tensor_product(Matrix<Scalar>::Identity(left, left), trial_h).eval(),
        Matrix<Scalar>::Identity(right, right));
    if (j > 0) omega = tensor_product(omega, trial_state).eval();
  }

  // Pointer-record partition: group basis states by the pointer bit of every
  // trial.  Trial j occupies bits (2(N-1-j)+1, 2(N-1-j)) = (spin, pointer).
  const std::size_t cells = std::size_t(1) << trials;
  std::vector<std::vector<Index>> groups(cells);
  for (Index i = 0; i < dim; ++i) {
    std::size_t f = 0;
    for (std::size_t j = 0; j < trials; ++j) {
      const Index pointer_bit = (i >> (2 * (trials - 1 - j))) & 1;
      f = (f << 1) | static_cast<std::size_t>(pointer_bit);
    }
    groups[f].push_back(i);
  }
  std::vector<std::string> labels;
  labels.reserve(cells);
  for (std::size_t f = 0; f < cells; ++f) {
    labels.push_back(outcome_string(f, trials));
  }
  auto partition =
      ProjectorPartition<Scalar>::basis_partition(dim, groups, labels);
  return HistorySpace<Scalar>::uniform(std::move(h), std::move(omega),
                                       {Scalar(1)}, std::move(partition));
}

/// Sequential variant: trial k is read out at sample time k+1, and the
/// partition at each time resolves the full record written so far, which is
/// what gives the space its purely branching structure.
template <class Scalar>
HistorySpace<Scalar> sequential_measurement_space(
    const SpinPreparation<Scalar>& prep, std::size_t trials,
    std::size_t budget = default_history_budget) {
  if (trials == 0) {
    throw std::invalid_argument("sequential_measurement_space: need >= 1 trial");
  }
  if (trials >= 63 || (std::size_t(1) << trials) > budget) {
    throw BudgetExceeded("sequential_measurement_space: 2^N exceeds budget");
  }
  const Index dim = Index(1) << trials;
  Vector<Scalar> omega = prep.state();
  for (std::size_t j = 1; j < trials; ++j) {
    omega = tensor_product(omega, prep.state()).eval();
  }

  std::vector<Scalar> times;
  std::vector<ProjectorPartition<Scalar>> partitions;
  for (std::size_t k = 1; k <= trials; ++k) {
    const std::size_t cells = std::size_t(1) << k;
    std::vector<std::vector<Index>> groups(cells);
    for (Index i = 0; i < dim; ++i) {
      const std::size_t record =
          static_cast<std::size_t>(i) >> (trials - k);  // top k bits
      groups[record].push_back(i);
    }
    std::vector<std::string> labels;
    labels.reserve(cells);
    for (std::size_t r = 0; r < cells; ++r) {
      labels.push_back(outcome_string(r, k));
    }
    partitions.push_back(
        ProjectorPartition<Scalar>::basis_partition(dim, groups, labels));
    times.push_back(Scalar(k));
  }
  Matrix<Scalar> h = Matrix<Scalar>::Zero(dim, dim);
  return HistorySpace<Scalar>::create(std::move(h), std::move(omega),
                                      std::move(times), std::move(partitions));
}

// ---------------------------------------------------------------------------
// Frequency statistics: x(M) = |c|^{2M} (1-|c|^2)^{N-M} N! / (M! (N-M)!).
// ---------------------------------------------------------------------------

template <class Scalar>
struct FrequencyDistribution {
  std::size_t trials = 0;
  std::vector<Scalar> weights;  // indexed by M = 0..N

  static FrequencyDistribution create(std::size_t trials,
                                      std::vector<Scalar> weights) {
    if (weights.size() != trials + 1) {
      throw std::invalid_argument("FrequencyDistribution: need N+1 weights");
    }
    Scalar sum = 0;
    for (Scalar w : weights) {
      if (w < Scalar(0)) {
        throw std::invalid_argument("FrequencyDistribution: negative weight");
      }
      sum += w;
    }
    if (std::abs(sum - Scalar(1)) > Scalar(1e-10)) {
      throw std::invalid_argument("FrequencyDistribution: weights do not sum to 1");
    }
    return FrequencyDistribution{trials, std::move(weights)};
  }

  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t m = 1; m < weights.size(); ++m) {
      if (weights[m] > weights[best]) best = m;
    }
    return best;
  }
};

namespace detail {

/// Exact in double up to N = 50 or so; callers switch to the log-domain form
/// above that.
inline double binomial_coefficient(std::size_t n, std::size_t m) {
  double out = 1;
  for (std::size_t i = 0; i < m; ++i) {
    out = out * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return out;
}

}  // namespace detail

template <class Scalar>
Scalar frequency_weight(Scalar up_probability, std::size_t trials, std::size_t m) {
  const Scalar p = up_probability;
  const Scalar q = Scalar(1) - p;
  if (p <= Scalar(0)) return m == 0 ? Scalar(1) : Scalar(0);
  if (q <= Scalar(0)) return m == trials ? Scalar(1) : Scalar(0);
  if (trials <= 50) {
    return Scalar(detail::binomial_coefficient(trials, m)) *
           std::pow(p, Scalar(m)) * std::pow(q, Scalar(trials - m));
  }
  const Scalar log_binom =
      Scalar(std::lgamma(double(trials) + 1) - std::lgamma(double(m) + 1) -
             std::lgamma(double(trials - m) + 1));
  return std::exp(log_binom + Scalar(m) * std::log(p) +
                  Scalar(trials - m) * std::log(q));
}

/// Aggregates enumerated branch weights of the N-fold space by the number of
/// '+' outcomes.
template <class Scalar>
FrequencyDistribution<Scalar> enumerated_frequency_distribution(
    const SpinPreparation<Scalar>& prep, std::size_t trials,
    std::size_t budget = default_history_budget) {
  const auto space = repeated_measurement_space(prep, trials, budget);
  std::vector<Scalar> weights(trials + 1, Scalar(0));
  for (const auto& h : enumerate_histories(space, budget)) {
    const std::uint64_t f = static_cast<std::uint64_t>(h.cell(0));
    weights[plus_count(f, trials)] += apply_chain(space, h).squaredNorm();
  }
  return FrequencyDistribution<Scalar>::create(trials, std::move(weights));
}

struct FrequencyOptions {
  /// Enumerated cross-check runs whenever 2^N fits this budget.
  std::size_t crosscheck_budget = std::size_t(1) << 12;
};

template <class Scalar>
FrequencyDistribution<Scalar> frequency_distribution(
    const SpinPreparation<Scalar>& prep, std::size_t trials,
    const FrequencyOptions& opts = {}) {
  if (trials == 0) {
    throw std::invalid_argument("frequency_distribution: need >= 1 trial");
  }
  const Scalar p = prep.up_probability();
  std::vector<Scalar> weights(trials + 1);
  for (std::size_t m = 0; m <= trials; ++m) {
    weights[m] = frequency_weight(p, trials, m);
  }
  auto dist = FrequencyDistribution<Scalar>::create(trials, std::move(weights));

  if (trials < 63 && (std::size_t(1) << trials) <= opts.crosscheck_budget) {
    const auto enumerated =
        enumerated_frequency_distribution(prep, trials, opts.crosscheck_budget);
    for (std::size_t m = 0; m <= trials; ++m) {
      if (std::abs(dist.weights[m] - enumerated.weights[m]) > Scalar(1e-12)) {
        throw std::logic_error(
            "frequency_distribution: closed form disagrees with enumeration");
      }
    }
  }
  return dist;
}

/// Total weight of frequencies within epsilon of |c|^2.  Boundary ties are
/// inclusive, with a 1e-12 slack so frequencies landing exactly on the window
/// edge are not lost to rounding of |c|^2.
template <class Scalar>
Scalar concentration_report(const SpinPreparation<Scalar>& prep,
                            std::size_t trials, Scalar epsilon,
                            const FrequencyOptions& opts = {}) {
  if (!(epsilon > Scalar(0))) {
    throw std::invalid_argument("concentration_report: epsilon must be positive");
  }
  const Scalar p = prep.up_probability();
  const auto dist = frequency_distribution(prep, trials, opts);
  Scalar sum = 0;
  for (std::size_t m = 0; m <= trials; ++m) {
    if (std::abs(Scalar(m) / Scalar(trials) - p) <= epsilon + Scalar(1e-12)) {
      sum += dist.weights[m];
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// The deterministic-amplitude-meter no-go check.
//
// A candidate meter would need U(omega (x) phi_c) to land in the designated
// pointer cell alpha(c) with certainty, for two preparations c1 != c2 with a
// large input overlap i.  Unitarity keeps the output overlap o equal to i,
// yet landing in orthogonal cells with residuals <= delta forces
// o <= 2 sqrt(delta) + delta.  Whenever i exceeds that bound no unitary can
// satisfy the claim, and any given candidate must show a residual of at least
// (sqrt(1 + o) - 1)^2.
// ---------------------------------------------------------------------------

struct NoGoOptions {
  double delta = 1e-6;          // deterministic-meter threshold
  double io_tolerance = 1e-10;  // allowed |i - o|
  double tol = 1e-10;           // structural flag tolerance
};

template <class Scalar>
struct NoGoReport {
  Scalar input_overlap = 0;   // i
  Scalar output_overlap = 0;  // o
  Scalar unitarity_deviation = 0;
  bool unitarity_ok = false;
  Scalar residual_a = 0;
  Scalar residual_b = 0;
  Scalar delta = 0;
  bool cells_orthogonal = false;
  bool deterministic_within_delta = false;
  Scalar contradiction_bound = 0;    // 2 sqrt(delta) + delta
  Scalar residual_lower_bound = 0;   // (sqrt(1+o) - 1)^2
  bool meter_impossible = false;     // claim contradicts unitarity
};

template <class Scalar>
NoGoReport<Scalar> no_go_check(const SpinPreparation<Scalar>& prep_a,
                               const SpinPreparation<Scalar>& prep_b,
                               const Matrix<Scalar>& candidate,
                               const ProjectorPartition<Scalar>& pointer_partition,
                               std::size_t cell_a, std::size_t cell_b,
                               const NoGoOptions& opts = {}) {
  if (candidate.rows() != candidate.cols() ||
      candidate.rows() != pointer_partition.dim() || candidate.rows() % 2 != 0) {
    throw std::invalid_argument("no_go_check: dimension mismatch");
  }
  if (!is_unitary(candidate, Scalar(opts.tol))) {
    throw std::invalid_argument("no_go_check: candidate not unitary");
  }
  if (cell_a >= pointer_partition.size() || cell_b >= pointer_partition.size()) {
    throw std::invalid_argument("no_go_check: cell index out of range");
  }

  const Index d = candidate.rows() / 2;
  const Vector<Scalar> ready = basis_state<Scalar>(d, 0);
  const Vector<Scalar> in_a = tensor_product(prep_a.state(), ready);
  const Vector<Scalar> in_b = tensor_product(prep_b.state(), ready);
  const Vector<Scalar> out_a = candidate * in_a;
  const Vector<Scalar> out_b = candidate * in_b;

  NoGoReport<Scalar> report;
  report.input_overlap = std::abs(in_a.dot(in_b));
  report.output_overlap = std::abs(out_a.dot(out_b));
  report.unitarity_deviation =
      std::abs(report.input_overlap - report.output_overlap);
  report.unitarity_ok = report.unitarity_deviation <= Scalar(opts.io_tolerance);
  report.residual_a =
      Scalar(1) - pointer_partition.cell(cell_a).apply(out_a).squaredNorm();
  report.residual_b =
      Scalar(1) - pointer_partition.cell(cell_b).apply(out_b).squaredNorm();
  report.delta = Scalar(opts.delta);
  report.cells_orthogonal = cell_a != cell_b;
  report.deterministic_within_delta =
      report.residual_a <= report.delta && report.residual_b <= report.delta;
  report.contradiction_bound =
      Scalar(2) * std::sqrt(report.delta) + report.delta;
  report.residual_lower_bound = [&] {
    const Scalar s = std::sqrt(Scalar(1) + report.output_overlap) - Scalar(1);
    return s * s;
  }();
  report.meter_impossible = report.cells_orthogonal &&
                            report.input_overlap > report.contradiction_bound;
  return report;
}

}  // namespace decohist
