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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "decohist/branch_tree.hpp"

namespace decohist {

// ---------------------------------------------------------------------------
// Predicates over branch cells.
//
// An occasion predicate is true at some times and false at others and is
// evaluated at the configuration cell occupied at the utterance time.  An
// eternal predicate is a time-independent claim about the branch as a whole
// and holds if it holds anywhere along it.
// ---------------------------------------------------------------------------

enum class PredicateKind { eternal, occasion };

struct Predicate {
  std::string name;
  PredicateKind kind = PredicateKind::occasion;
  /// Total over the scenario's cell labels and time indices.
  std::function<bool(std::string_view cell_label, std::size_t time_index)> holds;
};

inline Predicate label_predicate(std::string name, PredicateKind kind,
                                 std::vector<std::string> true_labels) {
  Predicate p;
  p.name = std::move(name);
  p.kind = kind;
  p.holds = [labels = std::move(true_labels)](std::string_view label,
                                              std::size_t) {
    for (const auto& l : labels) {
      if (label == l) return true;
    }
    return false;
  };
  return p;
}

/// An utterance point: a maximal branch of nonzero weight and a time.
template <class Scalar>
struct UtteranceContext {
  History branch;
  Scalar time = 0;
};

// ---------------------------------------------------------------------------
// Past/future split.
//
// Boundary convention at a sample time: the future of a branch at t holds the
// cells at times strictly greater than t, the past holds the rest, so the
// cell at time t itself belongs to the past.
// ---------------------------------------------------------------------------

struct HistorySplit {
  std::vector<Index> past_cells;    // earliest-first
  std::vector<Index> future_cells;  // earliest-first
  std::size_t boundary = 0;         // index of the first future time
};

template <class Scalar>
std::size_t past_length(const BranchTree<Scalar>& tree, Scalar t) {
  if (!std::isfinite(t)) {
    throw std::invalid_argument("past_length: time not finite");
  }
  std::size_t k = 0;
  while (k < tree.times.size() && tree.times[k] <= t) ++k;
  return k;
}

template <class Scalar>
HistorySplit past_future_split(const BranchTree<Scalar>& tree,
                               const UtteranceContext<Scalar>& ctx) {
  if (ctx.branch.length() != tree.num_times()) {
    throw std::invalid_argument("past_future_split: branch not maximal");
  }
  const std::size_t k = past_length(tree, ctx.time);
  const auto cells = ctx.branch.earliest_first();
  HistorySplit split;
  split.boundary = k;
  split.past_cells.assign(cells.begin(), cells.begin() + k);
  split.future_cells.assign(cells.begin() + k, cells.end());
  return split;
}

namespace detail {

template <class Scalar>
const BranchTreeNode<Scalar>& leaf_for(const BranchTree<Scalar>& tree,
                                       const History& branch) {
  if (branch.length() != tree.num_times()) {
    throw std::invalid_argument("semantics: context branch not maximal");
  }
  const std::size_t id = tree.find(branch);
  if (id == tree_no_parent) {
    throw std::invalid_argument("semantics: branch not present in the tree");
  }
  return tree.nodes[id];
}

/// Cell label along a maximal branch at a given time index, read off the
/// node path.
template <class Scalar>
std::string_view label_at(const BranchTree<Scalar>& tree, const History& branch,
                          std::size_t time_index) {
  const std::size_t id = tree.find(branch.prefix(time_index + 1));
  if (id == tree_no_parent) {
    throw std::invalid_argument("semantics: branch prefix not in tree");
  }
  return tree.nodes[id].cell_label;
}

template <class Scalar>
bool holds_in_range(const BranchTree<Scalar>& tree, const History& branch,
                    const Predicate& f, std::size_t first, std::size_t last) {
  for (std::size_t k = first; k < last; ++k) {
    if (f.holds(label_at(tree, branch, k), k)) return true;
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// S2: present tense.  True iff F holds of the context branch -- anywhere for
// eternal predicates, at the currently occupied cell for occasion ones.
// ---------------------------------------------------------------------------

template <class Scalar>
bool eval_present(const BranchTree<Scalar>& tree,
                  const UtteranceContext<Scalar>& ctx, const Predicate& f) {
  detail::leaf_for(tree, ctx.branch);
  const std::size_t n = tree.num_times();
  if (f.kind == PredicateKind::eternal) {
    return detail::holds_in_range(tree, ctx.branch, f, 0, n);
  }
  const std::size_t k = past_length(tree, ctx.time);
  if (k == 0) return false;  // no configuration occupied yet
  return f.holds(detail::label_at(tree, ctx.branch, k - 1), k - 1);
}

// ---------------------------------------------------------------------------
// S3: future tense.  "F will be the case" is read existentially over the
// future segment by default; the universal reading is available as a flag.
// ---------------------------------------------------------------------------

enum class WillMode { existential, universal };

template <class Scalar>
bool eval_will(const BranchTree<Scalar>& tree, const UtteranceContext<Scalar>& ctx,
               const Predicate& f, WillMode mode = WillMode::existential) {
  detail::leaf_for(tree, ctx.branch);
  const std::size_t first = past_length(tree, ctx.time);
  const std::size_t n = tree.num_times();
  if (mode == WillMode::existential) {
    return detail::holds_in_range(tree, ctx.branch, f, first, n);
  }
  if (first == n) return false;
  for (std::size_t k = first; k < n; ++k) {
    if (!f.holds(detail::label_at(tree, ctx.branch, k), k)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// S4: modal "might".  True iff some maximal branch with the same past at t
// and conditional weight above the threshold realizes F in its future.
// ---------------------------------------------------------------------------

template <class Scalar>
bool eval_might(const BranchTree<Scalar>& tree, const UtteranceContext<Scalar>& ctx,
                const Predicate& f, Scalar threshold) {
  if (threshold < Scalar(0) || threshold >= Scalar(1)) {
    throw std::invalid_argument("eval_might: threshold outside [0, 1)");
  }
  detail::leaf_for(tree, ctx.branch);
  const std::size_t k = past_length(tree, ctx.time);
  const History past = ctx.branch.prefix(k);
  const std::size_t past_id = tree.find(past);
  if (past_id == tree_no_parent) {
    throw std::invalid_argument("eval_might: past prefix not in tree");
  }
  const Scalar past_weight = tree.nodes[past_id].weight;
  if (past_weight <= Scalar(0)) {
    throw UndefinedConditional("eval_might: past prefix has zero weight");
  }
  for (std::size_t leaf : tree.leaves()) {
    const auto& node = tree.nodes[leaf];
    if (node.prefix.prefix(k) != past) continue;
    if (node.weight / past_weight <= threshold) continue;
    if (detail::holds_in_range(tree, node.prefix, f, k, tree.num_times())) {
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Truth tables for the CLI.
// ---------------------------------------------------------------------------

template <class Scalar>
struct Verdict {
  History branch;
  Scalar time = 0;
  std::string predicate;
  bool present = false;
  bool will = false;
  bool might = false;
};

template <class Scalar>
std::vector<Verdict<Scalar>> truth_table(const BranchTree<Scalar>& tree,
                                         const std::vector<Predicate>& corpus,
                                         Scalar might_threshold) {
  std::vector<Verdict<Scalar>> out;
  for (std::size_t leaf : tree.leaves()) {
    const auto& node = tree.nodes[leaf];
    if (node.weight <= Scalar(0)) continue;
    for (Scalar t : tree.times) {
      UtteranceContext<Scalar> ctx{node.prefix, t};
      for (const auto& f : corpus) {
        Verdict<Scalar> v;
        v.branch = node.prefix;
        v.time = t;
        v.predicate = f.name;
        v.present = eval_present(tree, ctx, f);
        v.will = eval_will(tree, ctx, f);
        v.might = eval_might(tree, ctx, f, might_threshold);
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

}  // namespace decohist
