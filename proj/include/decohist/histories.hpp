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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "decohist/history_space.hpp"

namespace decohist {

/// Hard cap on exhaustive history enumeration.  Overridable per call; the
/// point of the cap is to fail loudly rather than grind.
inline constexpr std::size_t default_history_budget = std::size_t(1) << 20;

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UndefinedConditional : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// History: one partition-cell index per sample time.
//
// Cells are stored latest-first, mirroring the <alpha_n, ..., alpha_1>
// ordering of chain-operator factors.  All human-facing output (and the
// from/to earliest helpers) uses earliest-first order.
// ---------------------------------------------------------------------------

class History {
 public:
  History() = default;

  static History from_latest_first(std::vector<Index> cells) {
    History h;
    h.latest_first_ = std::move(cells);
    return h;
  }

  static History from_earliest_first(std::vector<Index> cells) {
    std::reverse(cells.begin(), cells.end());
    return from_latest_first(std::move(cells));
  }

  std::size_t length() const { return latest_first_.size(); }
  bool empty() const { return latest_first_.empty(); }

  /// Cell at sample time t_{k+1}, k counted earliest-first from 0.
  Index cell(std::size_t time_index) const {
    return latest_first_.at(latest_first_.size() - 1 - time_index);
  }

  const std::vector<Index>& latest_first() const { return latest_first_; }

  std::vector<Index> earliest_first() const {
    std::vector<Index> out(latest_first_.rbegin(), latest_first_.rend());
    return out;
  }

  /// History through the first k sample times (the truncation alpha^-).
  History prefix(std::size_t k) const {
    if (k > length()) throw std::invalid_argument("History::prefix: too long");
    return from_latest_first(std::vector<Index>(
        latest_first_.end() - static_cast<std::ptrdiff_t>(k), latest_first_.end()));
  }

  /// Appends a cell for the next sample time.
  History extended(Index next_cell) const {
    std::vector<Index> cells;
    cells.reserve(latest_first_.size() + 1);
    cells.push_back(next_cell);
    cells.insert(cells.end(), latest_first_.begin(), latest_first_.end());
    return from_latest_first(std::move(cells));
  }

  bool operator==(const History&) const = default;

 private:
  std::vector<Index> latest_first_;
};

template <class Scalar>
struct BranchVector {
  History history;
  Vector<Scalar> vector;  // C_alpha |Omega>, unnormalized
  Scalar weight = 0;      // squared norm
};

// ---------------------------------------------------------------------------
// Enumeration.
// ---------------------------------------------------------------------------

template <class Scalar>
void validate_history(const HistorySpace<Scalar>& space, const History& h,
                      bool allow_prefix = false) {
  if (allow_prefix ? h.length() > space.num_times()
                   : h.length() != space.num_times()) {
    throw std::invalid_argument("history length does not match sample times");
  }
  for (std::size_t k = 0; k < h.length(); ++k) {
    const Index c = h.cell(k);
    if (c < 0 || static_cast<std::size_t>(c) >= space.partition(k).size()) {
      throw std::invalid_argument("history cell index out of range");
    }
  }
}

template <class Scalar>
std::size_t history_count(const HistorySpace<Scalar>& space,
                          std::size_t budget = default_history_budget) {
  std::size_t count = 1;
  for (std::size_t k = 0; k < space.num_times(); ++k) {
    const std::size_t cells = space.partition(k).size();
    if (count > budget / cells) {
      throw BudgetExceeded("history enumeration budget exceeded");
    }
    count *= cells;
  }
  return count;
}

/// All full-length histories, lexicographic with the earliest time as the
/// most significant digit.
template <class Scalar>
std::vector<History> enumerate_histories(
    const HistorySpace<Scalar>& space,
    std::size_t budget = default_history_budget) {
  const std::size_t total = history_count(space, budget);
  const std::size_t n = space.num_times();
  std::vector<History> out;
  out.reserve(total);
  std::vector<Index> cells(n, 0);
  for (std::size_t i = 0; i < total; ++i) {
    out.push_back(History::from_earliest_first(cells));
    for (std::size_t k = n; k-- > 0;) {
      cells[k]++;
      if (static_cast<std::size_t>(cells[k]) < space.partition(k).size()) break;
      cells[k] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chain operators and branch vectors.
// ---------------------------------------------------------------------------

/// C_alpha = P_{alpha_n}(t_n) ... P_{alpha_1}(t_1), latest factor leftmost.
template <class Scalar>
Matrix<Scalar> chain_operator(const HistorySpace<Scalar>& space,
                              const History& h) {
  validate_history(space, h);
  Matrix<Scalar> c = Matrix<Scalar>::Identity(space.dim(), space.dim());
  for (std::size_t k = 0; k < h.length(); ++k) {
    c = space.heisenberg_cell_matrix(k, static_cast<std::size_t>(h.cell(k))) * c;
  }
  return c;
}

/// C_h |Omega> for a (possibly truncated) history, by successive application
/// of Heisenberg-picture cell projectors.  Never materializes operators.
template <class Scalar>
Vector<Scalar> apply_chain(const HistorySpace<Scalar>& space, const History& h) {
  validate_history(space, h, /*allow_prefix=*/true);
  Vector<Scalar> v = space.omega();
  for (std::size_t k = 0; k < h.length(); ++k) {
    v = space.apply_heisenberg_cell(k, static_cast<std::size_t>(h.cell(k)), v);
  }
  return v;
}

template <class Scalar>
BranchVector<Scalar> branch_vector(const HistorySpace<Scalar>& space,
                                   const History& h) {
  validate_history(space, h);
  Vector<Scalar> v = apply_chain(space, h);
  const Scalar w = v.squaredNorm();
  return BranchVector<Scalar>{h, std::move(v), w};
}

/// p(alpha) = || C_alpha |Omega> ||^2, cross-checked against the trace form
/// Tr(C rho C^dagger) with rho = |Omega><Omega|.  The trace route goes
/// through materialized chain operators, so keep it to small dimensions;
/// enumeration paths read weights off branch vectors directly.
template <class Scalar>
Scalar weight(const HistorySpace<Scalar>& space, const History& h) {
  const Scalar norm_form = apply_chain(space, h).squaredNorm();
  const Matrix<Scalar> c = chain_operator(space, h);
  const Matrix<Scalar> rho = space.omega() * space.omega().adjoint();
  const Scalar trace_form = (c * rho * c.adjoint()).trace().real();
  const Scalar scale = std::max(Scalar(1), std::abs(norm_form));
  if (std::abs(norm_form - trace_form) > space.tolerance() * scale) {
    throw std::logic_error("weight: norm and trace forms disagree");
  }
  return norm_form;
}

/// <alpha | alpha'>; hermitian in its arguments.
template <class Scalar>
Complex<Scalar> decoherence_functional(const HistorySpace<Scalar>& space,
                                       const History& h1, const History& h2) {
  return apply_chain(space, h1).dot(apply_chain(space, h2));
}

// ---------------------------------------------------------------------------
// Consistency.
// ---------------------------------------------------------------------------

struct ConsistencyOptions {
  /// A space is consistent when every distinct pair satisfies
  /// |<a|a'>| <= epsilon * max(sqrt(p(a) p(a')), floor).
  double epsilon = 1e-8;
  double floor = 1e-12;
  std::size_t budget = default_history_budget;
};

template <class Scalar>
struct ConsistencyReport {
  std::size_t history_count = 0;
  Scalar max_abs_offdiag = 0;
  Scalar max_real_offdiag = 0;
  Scalar max_relative_offdiag = 0;  // |<a|a'>| / max(sqrt(p p'), floor)
  bool consistent = false;          // strong (medium-decoherence) condition
  bool weak_consistent = false;     // real part only
  History worst_first, worst_second;
};

template <class Scalar>
ConsistencyReport<Scalar> consistency_check(
    const HistorySpace<Scalar>& space, const ConsistencyOptions& opts = {}) {
  const auto histories = enumerate_histories(space, opts.budget);
  std::vector<Vector<Scalar>> vecs;
  std::vector<Scalar> weights;
  vecs.reserve(histories.size());
  for (const auto& h : histories) {
    vecs.push_back(apply_chain(space, h));
    weights.push_back(vecs.back().squaredNorm());
  }

  ConsistencyReport<Scalar> report;
  report.history_count = histories.size();
  Scalar max_rel_real = 0;
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = i + 1; j < vecs.size(); ++j) {
      const Complex<Scalar> d = vecs[i].dot(vecs[j]);
      const Scalar mag = std::abs(d);
      const Scalar re = std::abs(d.real());
      const Scalar scale = std::max(std::sqrt(weights[i] * weights[j]),
                                    Scalar(opts.floor));
      if (mag > report.max_abs_offdiag) {
        report.max_abs_offdiag = mag;
        report.worst_first = histories[i];
        report.worst_second = histories[j];
      }
      report.max_real_offdiag = std::max(report.max_real_offdiag, re);
      report.max_relative_offdiag =
          std::max(report.max_relative_offdiag, mag / scale);
      max_rel_real = std::max(max_rel_real, re / scale);
    }
  }
  report.consistent = report.max_relative_offdiag <= Scalar(opts.epsilon);
  report.weak_consistent = max_rel_real <= Scalar(opts.epsilon);
  return report;
}

// ---------------------------------------------------------------------------
// Conditional probability.
// ---------------------------------------------------------------------------

/// p(later | earlier) = p(later * earlier) / p(earlier), where `earlier`
/// covers the first sample times and `later` the remaining ones.
template <class Scalar>
Scalar conditional_probability(const HistorySpace<Scalar>& space,
                               const History& later, const History& earlier) {
  if (later.length() + earlier.length() != space.num_times()) {
    throw std::invalid_argument(
        "conditional_probability: segments must cover all sample times");
  }
  const Scalar w_earlier = apply_chain(space, earlier).squaredNorm();
  if (w_earlier <= Scalar(0)) {
    throw UndefinedConditional(
        "conditional_probability: conditioning history has zero weight");
  }
  std::vector<Index> cells = later.latest_first();
  const auto& tail = earlier.latest_first();
  cells.insert(cells.end(), tail.begin(), tail.end());
  const History full = History::from_latest_first(std::move(cells));
  return apply_chain(space, full).squaredNorm() / w_earlier;
}

// ---------------------------------------------------------------------------
// Coarse-graining and the sum rule.
// ---------------------------------------------------------------------------

/// Per-time surjection of fine cells onto supercells.  map[k][cell] is the
/// supercell index at time t_{k+1}; labels are optional per supercell.
struct CoarseGraining {
  std::vector<std::vector<std::size_t>> map;
  std::vector<std::vector<std::string>> labels;  // may be empty
};

template <class Scalar>
void validate_grouping(const HistorySpace<Scalar>& space,
                       const CoarseGraining& grouping) {
  if (grouping.map.size() != space.num_times()) {
    throw std::invalid_argument("coarse graining: need one map per sample time");
  }
  if (!grouping.labels.empty() && grouping.labels.size() != grouping.map.size()) {
    throw std::invalid_argument(
        "coarse graining: labels, when given, need one list per sample time");
  }
  for (std::size_t k = 0; k < grouping.map.size(); ++k) {
    const auto& m = grouping.map[k];
    if (m.size() != space.partition(k).size()) {
      throw std::invalid_argument("coarse graining: map size mismatch");
    }
    const std::size_t supercells =
        1 + *std::max_element(m.begin(), m.end());
    std::vector<bool> hit(supercells, false);
    for (std::size_t s : m) hit[s] = true;
    if (std::find(hit.begin(), hit.end(), false) != hit.end()) {
      throw std::invalid_argument("coarse graining: map not surjective");
    }
    if (!grouping.labels.empty() && !grouping.labels[k].empty() &&
        grouping.labels[k].size() != supercells) {
      throw std::invalid_argument("coarse graining: label count mismatch");
    }
  }
}

/// New space whose cells are sums of member projectors.
template <class Scalar>
HistorySpace<Scalar> coarse_grain(const HistorySpace<Scalar>& space,
                                  const CoarseGraining& grouping) {
  validate_grouping(space, grouping);
  std::vector<ProjectorPartition<Scalar>> partitions;
  partitions.reserve(space.num_times());
  for (std::size_t k = 0; k < space.num_times(); ++k) {
    const auto& m = grouping.map[k];
    const std::size_t supercells = 1 + *std::max_element(m.begin(), m.end());
    std::vector<ProjectorCell<Scalar>> cells;
    for (std::size_t s = 0; s < supercells; ++s) {
      std::vector<ProjectorCell<Scalar>> members;
      std::string joined;
      for (std::size_t c = 0; c < m.size(); ++c) {
        if (m[c] != s) continue;
        members.push_back(space.partition(k).cell(c));
        if (!joined.empty()) joined += "+";
        joined += space.partition(k).cell(c).label();
      }
      std::string label =
          (!grouping.labels.empty() && !grouping.labels[k].empty())
              ? grouping.labels[k][s]
              : joined;
      cells.push_back(cell_sum<Scalar>(
          std::move(label), std::span<const ProjectorCell<Scalar>>(members)));
    }
    partitions.push_back(
        ProjectorPartition<Scalar>::create(std::move(cells), space.tolerance()));
  }
  return HistorySpace<Scalar>::create(space.hamiltonian(), space.omega(),
                                      space.times(), std::move(partitions),
                                      space.tolerance());
}

inline History coarsen_history(const CoarseGraining& grouping,
                               const History& fine) {
  std::vector<Index> cells(fine.length());
  for (std::size_t k = 0; k < fine.length(); ++k) {
    cells[k] = static_cast<Index>(
        grouping.map[k][static_cast<std::size_t>(fine.cell(k))]);
  }
  return History::from_earliest_first(std::move(cells));
}

/// Max entrywise deviation of C_coarse from the sum of its fine chain
/// operators.  Materializes operators, so small spaces only.
template <class Scalar>
Scalar chain_additivity_deviation(const HistorySpace<Scalar>& space,
                                  const CoarseGraining& grouping,
                                  std::size_t budget = default_history_budget) {
  const HistorySpace<Scalar> coarse = coarse_grain(space, grouping);
  const auto fine_histories = enumerate_histories(space, budget);
  const auto coarse_histories = enumerate_histories(coarse, budget);
  Scalar worst = 0;
  for (const auto& ch : coarse_histories) {
    Matrix<Scalar> sum = Matrix<Scalar>::Zero(space.dim(), space.dim());
    for (const auto& fh : fine_histories) {
      if (coarsen_history(grouping, fh) == ch) sum += chain_operator(space, fh);
    }
    worst = std::max(
        worst, (chain_operator(coarse, ch) - sum).cwiseAbs().maxCoeff());
  }
  return worst;
}

template <class Scalar>
struct SumRuleEntry {
  History coarse_history;
  Scalar coarse_weight = 0;
  Scalar fine_weight_sum = 0;
  Scalar discrepancy = 0;
};

template <class Scalar>
struct SumRuleReport {
  std::vector<SumRuleEntry<Scalar>> entries;
  Scalar max_discrepancy = 0;
  Scalar tolerance = 0;
  bool pass = false;
};

/// Checks p(coarse) = sum of fine p's for every coarse history.
template <class Scalar>
SumRuleReport<Scalar> sum_rule_check(const HistorySpace<Scalar>& space,
                                     const CoarseGraining& grouping,
                                     Scalar tolerance,
                                     std::size_t budget = default_history_budget) {
  const HistorySpace<Scalar> coarse = coarse_grain(space, grouping);
  const auto coarse_histories = enumerate_histories(coarse, budget);
  const auto fine_histories = enumerate_histories(space, budget);

  std::vector<Scalar> fine_sums(coarse_histories.size(), Scalar(0));
  auto index_of = [&](const History& ch) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < ch.length(); ++k) {
      idx = idx * coarse.partition(k).size() + static_cast<std::size_t>(ch.cell(k));
    }
    return idx;
  };
  for (const auto& fh : fine_histories) {
    fine_sums[index_of(coarsen_history(grouping, fh))] +=
        apply_chain(space, fh).squaredNorm();
  }

  SumRuleReport<Scalar> report;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < coarse_histories.size(); ++i) {
    SumRuleEntry<Scalar> entry;
    entry.coarse_history = coarse_histories[i];
    entry.coarse_weight = apply_chain(coarse, coarse_histories[i]).squaredNorm();
    entry.fine_weight_sum = fine_sums[i];
    entry.discrepancy = std::abs(entry.coarse_weight - entry.fine_weight_sum);
    report.max_discrepancy = std::max(report.max_discrepancy, entry.discrepancy);
    report.entries.push_back(std::move(entry));
  }
  report.pass = report.max_discrepancy <= tolerance;
  return report;
}

// ---------------------------------------------------------------------------
// Schrodinger-picture state of a truncated history.
// ---------------------------------------------------------------------------

/// exp(-i H t) C_{alpha^-(t)} |Omega>: the unnormalized state at time t given
/// the history so far.  Cells at sample times <= t count as past.
template <class Scalar>
Vector<Scalar> schrodinger_state(const HistorySpace<Scalar>& space,
                                 const History& h, Scalar t) {
  if (!std::isfinite(t)) {
    throw std::invalid_argument("schrodinger_state: time not finite");
  }
  validate_history(space, h, /*allow_prefix=*/true);
  std::size_t k = 0;
  while (k < h.length() && space.time(k) <= t) ++k;
  return space.evolve_state(apply_chain(space, h.prefix(k)), t);
}

// ---------------------------------------------------------------------------
// Collapse oracle.
// ---------------------------------------------------------------------------

/// Sequential projective measurement in the Schrodinger picture: evolve with
/// relative-time propagators, project with the bare partition cell, multiply
/// the renormalized step probabilities.  This is an independent route to the
/// history weight (it never touches Heisenberg projectors or chain operators)
/// and the two must agree to rounding.
template <class Scalar>
Scalar collapse_oracle(const HistorySpace<Scalar>& space, const History& h) {
  validate_history(space, h);
  Vector<Scalar> psi = space.omega();
  Scalar prob = 1;
  Scalar prev_t = 0;
  for (std::size_t k = 0; k < h.length(); ++k) {
    psi = space.evolve_state(psi, space.time(k) - prev_t);
    prev_t = space.time(k);
    const Scalar before = psi.squaredNorm();
    psi = space.partition(k).cell(static_cast<std::size_t>(h.cell(k))).apply(psi);
    const Scalar after = psi.squaredNorm();
    if (after == Scalar(0)) return 0;
    prob *= after / before;
    psi /= std::sqrt(after);
  }
  return prob;
}

// ---------------------------------------------------------------------------
// Branching-structure (unique predecessor) check.
// ---------------------------------------------------------------------------

struct BranchingOptions {
  /// Squared-norm threshold below which a joint amplitude counts as absent.
  double weight_tolerance = 1e-10;
  std::size_t budget = default_history_budget;
};

struct BranchingEntry {
  std::size_t later_time = 0;
  std::size_t later_cell = 0;
  std::size_t earlier_time = 0;
  double later_weight = 0;
  bool skipped = false;  // later cell has (numerically) zero weight
  std::vector<std::size_t> predecessors;
};

template <class Scalar>
struct BranchingReport {
  std::vector<BranchingEntry> entries;
  bool pass = false;
  Scalar weight_tolerance = 0;
};

/// For every pair of times t_n > t_m and every cell at t_n realized on the
/// universal state, counts the cells at t_m with non-negligible joint
/// amplitude.  Purely branching structure means exactly one predecessor each.
template <class Scalar>
BranchingReport<Scalar> branching_structure_check(
    const HistorySpace<Scalar>& space, const BranchingOptions& opts = {}) {
  std::size_t work = 0;
  for (std::size_t n = 1; n < space.num_times(); ++n) {
    for (std::size_t m = 0; m < n; ++m) {
      work += space.partition(n).size() * space.partition(m).size();
      if (work > opts.budget) {
        throw BudgetExceeded("branching check budget exceeded");
      }
    }
  }

  BranchingReport<Scalar> report;
  report.weight_tolerance = Scalar(opts.weight_tolerance);
  bool pass = true;
  for (std::size_t n = 1; n < space.num_times(); ++n) {
    for (std::size_t a = 0; a < space.partition(n).size(); ++a) {
      const Vector<Scalar> pa =
          space.apply_heisenberg_cell(n, a, space.omega());
      const Scalar wa = pa.squaredNorm();
      for (std::size_t m = 0; m < n; ++m) {
        BranchingEntry entry;
        entry.later_time = n;
        entry.later_cell = a;
        entry.earlier_time = m;
        entry.later_weight = static_cast<double>(wa);
        if (wa <= Scalar(opts.weight_tolerance)) {
          entry.skipped = true;
          report.entries.push_back(std::move(entry));
          continue;
        }
        for (std::size_t b = 0; b < space.partition(m).size(); ++b) {
          const Vector<Scalar> joint = space.apply_heisenberg_cell(
              n, a, space.apply_heisenberg_cell(m, b, space.omega()));
          if (joint.squaredNorm() > Scalar(opts.weight_tolerance)) {
            entry.predecessors.push_back(b);
          }
        }
        pass = pass && entry.predecessors.size() == 1;
        report.entries.push_back(std::move(entry));
      }
    }
  }
  report.pass = pass;
  return report;
}

}  // namespace decohist
