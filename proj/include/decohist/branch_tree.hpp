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

#include <cstddef>
#include <string>
#include <vector>

#include "decohist/histories.hpp"

namespace decohist {

inline constexpr std::size_t tree_no_parent = static_cast<std::size_t>(-1);

template <class Scalar>
struct BranchTreeNode {
  History prefix;          // truncated history alpha^-(t_k)
  std::string cell_label;  // label of the latest cell; empty at the root
  Vector<Scalar> vector;   // C_prefix |Omega>
  Scalar weight = 0;
  Scalar pruned_weight = 0;  // total weight of children dropped below this node
  std::size_t parent = tree_no_parent;
  std::size_t depth = 0;
  std::vector<std::size_t> children;
};

/// The fine-grained tree of truncated histories.  Node 0 is the root |Omega>;
/// leaves at full depth are the maximal histories.  With the default prune
/// threshold 0 nothing is dropped and each node's vector is exactly the sum
/// of its children's vectors.
template <class Scalar>
struct BranchTree {
  std::vector<BranchTreeNode<Scalar>> nodes;
  std::vector<Scalar> times;
  Scalar prune_threshold = 0;
  Scalar total_pruned_weight = 0;
  bool consistent = false;  // consistency pre-check verdict (warn if false)
  Scalar consistency_max_offdiag = 0;

  std::size_t num_times() const { return times.size(); }

  std::vector<std::size_t> leaves() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].depth == times.size()) out.push_back(i);
    }
    return out;
  }

  /// Node index of a truncated history, or tree_no_parent if pruned/absent.
  std::size_t find(const History& prefix) const {
    std::size_t node = 0;
    for (std::size_t k = 0; k < prefix.length(); ++k) {
      std::size_t next = tree_no_parent;
      for (std::size_t child : nodes[node].children) {
        if (nodes[child].prefix.cell(k) == prefix.cell(k)) {
          next = child;
          break;
        }
      }
      if (next == tree_no_parent) return tree_no_parent;
      node = next;
    }
    return node;
  }
};

template <class Scalar>
BranchTree<Scalar> build_branch_tree(const HistorySpace<Scalar>& space,
                                     Scalar prune_threshold = 0,
                                     const ConsistencyOptions& copts = {}) {
  // Warn (via the consistent flag) rather than refuse: the tree of an
  // inconsistent space is still well defined, its weights just don't add up.
  BranchTree<Scalar> tree;
  tree.times = space.times();
  tree.prune_threshold = prune_threshold;
  const auto creport = consistency_check(space, copts);
  tree.consistent = creport.consistent;
  tree.consistency_max_offdiag = creport.max_abs_offdiag;

  history_count(space, copts.budget);  // enforce the enumeration budget

  BranchTreeNode<Scalar> root;
  root.vector = space.omega();
  root.weight = space.omega().squaredNorm();
  tree.nodes.push_back(std::move(root));

  std::vector<std::size_t> frontier{0};
  for (std::size_t k = 0; k < space.num_times(); ++k) {
    std::vector<std::size_t> next;
    for (std::size_t node_id : frontier) {
      for (std::size_t c = 0; c < space.partition(k).size(); ++c) {
        Vector<Scalar> v = space.apply_heisenberg_cell(
            k, c, tree.nodes[node_id].vector);
        const Scalar w = v.squaredNorm();
        if (w < prune_threshold) {
          tree.nodes[node_id].pruned_weight += w;
          tree.total_pruned_weight += w;
          continue;
        }
        BranchTreeNode<Scalar> child;
        child.prefix =
            tree.nodes[node_id].prefix.extended(static_cast<Index>(c));
        child.cell_label = space.partition(k).cell(c).label();
        child.vector = std::move(v);
        child.weight = w;
        child.parent = node_id;
        child.depth = k + 1;
        tree.nodes.push_back(std::move(child));
        tree.nodes[node_id].children.push_back(tree.nodes.size() - 1);
        next.push_back(tree.nodes.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  return tree;
}

}  // namespace decohist
