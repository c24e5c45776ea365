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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "decohist/measurement.hpp"
#include "decohist/semantics.hpp"

using namespace decohist;

namespace {

using Mat = Matrix<double>;
using Vec = Vector<double>;

/// A spin measured twice (quantum non-demolition style): a "ready" epoch,
/// then two readouts that always agree.  Branch weights |c|^2 and 1 - |c|^2.
HistorySpace<double> alice_space(double c2) {
  const auto prep = SpinPreparation<double>::from_up_probability(c2);
  auto ready = ProjectorPartition<double>::trivial(2, "ready");
  auto readout =
      ProjectorPartition<double>::basis_partition(2, {{0}, {1}}, {"+", "-"});
  return HistorySpace<double>::create(Mat::Zero(2, 2), prep.state(),
                                      {1.0, 2.0, 3.0},
                                      {ready, readout, readout});
}

const History up_branch = History::from_earliest_first({0, 0, 0});
const History down_branch = History::from_earliest_first({0, 1, 1});

Predicate reads_plus() {
  return label_predicate("reads_plus", PredicateKind::occasion, {"+"});
}
Predicate reads_minus() {
  return label_predicate("reads_minus", PredicateKind::occasion, {"-"});
}
Predicate plus_somewhere() {
  return label_predicate("plus_somewhere", PredicateKind::eternal, {"+"});
}

std::vector<Predicate> corpus() {
  return {reads_plus(), reads_minus(), plus_somewhere()};
}

}  // namespace

TEST_CASE("past/future split follows the boundary convention") {
  const auto tree = build_branch_tree(alice_space(0.7));
  UtteranceContext<double> ctx{up_branch, 2.0};
  const auto split = past_future_split(tree, ctx);
  // The cell at the utterance time belongs to the past.
  CHECK(split.boundary == 2);
  CHECK(split.past_cells == std::vector<Index>{0, 0});
  CHECK(split.future_cells == std::vector<Index>{0});

  ctx.time = 0.5;
  const auto before = past_future_split(tree, ctx);
  CHECK(before.past_cells.empty());
  CHECK(before.future_cells.size() == 3);

  ctx.time = 9.0;
  const auto after = past_future_split(tree, ctx);
  CHECK(after.future_cells.empty());
  CHECK(after.past_cells.size() == 3);

  // Concatenation restores the branch.
  std::vector<Index> glued = before.past_cells;
  glued.insert(glued.end(), before.future_cells.begin(),
               before.future_cells.end());
  CHECK(glued == up_branch.earliest_first());
}

TEST_CASE("present tense reads the occupied cell") {
  const auto tree = build_branch_tree(alice_space(0.7));
  const auto plus = reads_plus();
  // Before any sample time there is no occupied configuration.
  CHECK_FALSE(eval_present(tree, {up_branch, 0.5}, plus));
  // At the ready time the cell is "ready".
  CHECK_FALSE(eval_present(tree, {up_branch, 1.0}, plus));
  // After the first readout.
  CHECK(eval_present(tree, {up_branch, 2.0}, plus));
  CHECK_FALSE(eval_present(tree, {down_branch, 2.0}, plus));
  CHECK(eval_present(tree, {down_branch, 2.0}, reads_minus()));
}

TEST_CASE("present tense of eternal predicates is time-independent") {
  const auto tree = build_branch_tree(alice_space(0.7));
  const auto eternal = plus_somewhere();
  for (double t : {0.5, 1.0, 2.0, 3.0, 8.0}) {
    CHECK(eval_present(tree, {up_branch, t}, eternal));
    CHECK_FALSE(eval_present(tree, {down_branch, t}, eternal));
  }
}

TEST_CASE("future tense quantifies over the future segment") {
  const auto tree = build_branch_tree(alice_space(0.7));
  const auto plus = reads_plus();
  const auto minus = reads_minus();
  // Pre-measurement: the up branch will read "+", never "-".
  CHECK(eval_will(tree, {up_branch, 1.0}, plus));
  CHECK_FALSE(eval_will(tree, {up_branch, 1.0}, minus));
  CHECK(eval_will(tree, {down_branch, 1.0}, minus));
  // Empty future: occasion predicates are never realized.
  CHECK_FALSE(eval_will(tree, {up_branch, 3.0}, plus));
  CHECK_FALSE(eval_will(tree, {up_branch, 9.0}, plus));
}

TEST_CASE("universal reading of the future tense") {
  const auto tree = build_branch_tree(alice_space(0.7));
  const auto plus = reads_plus();
  // Future of the up branch at t=1 is {+, +}: universally true.
  CHECK(eval_will(tree, {up_branch, 1.0}, plus, WillMode::universal));
  // At t=0.5 the future still contains the ready cell.
  CHECK(eval_will(tree, {up_branch, 0.5}, plus));
  CHECK_FALSE(eval_will(tree, {up_branch, 0.5}, plus, WillMode::universal));
  // Empty future: the universal reading is false by convention.
  CHECK_FALSE(eval_will(tree, {up_branch, 3.0}, plus, WillMode::universal));
}

TEST_CASE("modal might with conditional-weight threshold") {
  const auto tree = build_branch_tree(alice_space(0.7));
  const auto plus = reads_plus();
  const auto minus = reads_minus();
  // Pre-measurement with threshold 0.5: only the 0.7 branch clears it.
  CHECK(eval_might(tree, {up_branch, 1.0}, plus, 0.5));
  CHECK_FALSE(eval_might(tree, {up_branch, 1.0}, minus, 0.5));
  // Unrestricted: both futures are realized by some same-past branch.
  CHECK(eval_might(tree, {up_branch, 1.0}, plus, 0.0));
  CHECK(eval_might(tree, {up_branch, 1.0}, minus, 0.0));
  // After the first readout the past pins the record.
  CHECK_FALSE(eval_might(tree, {up_branch, 2.0}, minus, 0.0));
  CHECK(eval_might(tree, {up_branch, 2.0}, plus, 0.0));
}

TEST_CASE("might threshold is validated and zero-weight pasts are rejected") {
  const auto tree = build_branch_tree(alice_space(1.0));
  const auto plus = reads_plus();
  CHECK_THROWS_AS(eval_might(tree, {up_branch, 1.0}, plus, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(eval_might(tree, {up_branch, 1.0}, plus, -0.1),
                  std::invalid_argument);
  // With c = 1 the "-" past has exactly zero weight.
  CHECK_THROWS_AS(eval_might(tree, {down_branch, 2.0}, plus, 0.0),
                  UndefinedConditional);
}

TEST_CASE("will implies might at threshold zero") {
  const auto tree = build_branch_tree(alice_space(0.7));
  for (const auto& f : corpus()) {
    for (const History& branch : {up_branch, down_branch}) {
      for (double t : {0.5, 1.0, 2.0, 3.0}) {
        if (eval_will(tree, {branch, t}, f)) {
          CHECK(eval_might(tree, {branch, t}, f, 0.0));
        }
      }
    }
  }
}

TEST_CASE("might is monotone non-increasing in the threshold") {
  const auto tree = build_branch_tree(alice_space(0.7));
  const std::vector<double> thresholds = {0.0, 0.2, 0.5, 0.69, 0.71, 0.9};
  for (const auto& f : corpus()) {
    for (double t : {0.5, 1.0, 2.0}) {
      bool previous = true;
      bool first = true;
      for (double th : thresholds) {
        const bool value = eval_might(tree, {up_branch, t}, f, th);
        if (!first) CHECK((previous || !value));
        previous = value;
        first = false;
      }
    }
  }
}

TEST_CASE("branches with the same past give the same modal verdicts") {
  const auto tree = build_branch_tree(alice_space(0.7));
  for (const auto& f : corpus()) {
    for (double th : {0.0, 0.3, 0.5}) {
      // Both maximal branches share the past at the ready time.
      CHECK(eval_might(tree, {up_branch, 1.0}, f, th) ==
            eval_might(tree, {down_branch, 1.0}, f, th));
      CHECK(eval_might(tree, {up_branch, 0.2}, f, th) ==
            eval_might(tree, {down_branch, 0.2}, f, th));
    }
  }
}

TEST_CASE("truth table covers branches, times and predicates") {
  const auto tree = build_branch_tree(alice_space(0.7));
  const auto verdicts = truth_table(tree, corpus(), 0.5);
  // 2 nonzero branches x 3 times x 3 predicates.
  CHECK(verdicts.size() == 18);
  std::size_t might_plus_true = 0;
  for (const auto& v : verdicts) {
    if (v.predicate == "reads_plus" && v.might) ++might_plus_true;
  }
  CHECK(might_plus_true > 0);
}

TEST_CASE("contexts must name maximal branches present in the tree") {
  const auto tree = build_branch_tree(alice_space(0.7));
  const auto plus = reads_plus();
  CHECK_THROWS_AS(
      eval_present(tree, {History::from_earliest_first({0, 0}), 1.0}, plus),
      std::invalid_argument);
}
