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

#include <string>
#include <vector>

#include <json.hpp>

#include "decohist/branch_tree.hpp"
#include "decohist/measurement.hpp"
#include "decohist/mereology.hpp"
#include "decohist/semantics.hpp"

// JSON report shapes.  nlohmann::json keeps keys sorted, so serialized
// reports are byte-stable for a fixed scenario and seed.  Complex numbers are
// emitted as [re, im]; histories as earliest-first cell-index arrays.

namespace decohist {

inline constexpr int report_schema_version = 1;

using Json = nlohmann::json;

template <class Scalar>
Json to_json(const Complex<Scalar>& z) {
  return Json::array({z.real(), z.imag()});
}

inline Json to_json(const History& h) { return Json(h.earliest_first()); }

template <class Scalar>
Json amplitude_json(const Vector<Scalar>& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline Json make_report(const std::string& kind, Json body) {
  body["kind"] = kind;
  body["schema_version"] = report_schema_version;
  return body;
}

template <class Scalar>
Json to_json(const PartitionReport<Scalar>& r) {
  return Json{{"completeness_deviation", r.completeness_deviation},
              {"orthogonality_deviation", r.orthogonality_deviation},
              {"hermiticity_deviation", r.hermiticity_deviation},
              {"accepted", r.accepted}};
}

template <class Scalar>
Json to_json(const ConsistencyReport<Scalar>& r) {
  return Json{{"history_count", r.history_count},
              {"max_abs_offdiag", r.max_abs_offdiag},
              {"max_real_offdiag", r.max_real_offdiag},
              {"max_relative_offdiag", r.max_relative_offdiag},
              {"consistent", r.consistent},
              {"weak_consistent", r.weak_consistent},
              {"worst_pair", Json::array({to_json(r.worst_first),
                                          to_json(r.worst_second)})}};
}

template <class Scalar>
Json to_json(const SumRuleReport<Scalar>& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back(Json{{"coarse_history", to_json(e.coarse_history)},
                           {"coarse_weight", e.coarse_weight},
                           {"fine_weight_sum", e.fine_weight_sum},
                           {"discrepancy", e.discrepancy}});
  }
  return Json{{"entries", entries},
              {"max_discrepancy", r.max_discrepancy},
              {"tolerance", r.tolerance},
              {"pass", r.pass}};
}

template <class Scalar>
Json to_json(const BranchingReport<Scalar>& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back(Json{{"later_time", e.later_time},
                           {"later_cell", e.later_cell},
                           {"earlier_time", e.earlier_time},
                           {"later_weight", e.later_weight},
                           {"skipped", e.skipped},
                           {"predecessors", e.predecessors}});
  }
  return Json{{"entries", entries},
              {"pass", r.pass},
              {"weight_tolerance", r.weight_tolerance}};
}

inline std::string node_path(const History& prefix) {
  std::string out;
  for (Index c : prefix.earliest_first()) {
    if (!out.empty()) out += ".";
    out += std::to_string(c);
  }
  return out;
}

template <class Scalar>
Json to_json(const BranchTree<Scalar>& tree) {
  Json nodes = Json::array();
  for (const auto& node : tree.nodes) {
    Json children = Json::array();
    for (std::size_t child : node.children) {
      children.push_back(node_path(tree.nodes[child].prefix));
    }
    nodes.push_back(Json{{"id", node_path(node.prefix)},
                         {"cell_label", node.cell_label},
                         {"amplitude", amplitude_json(node.vector)},
                         {"weight", node.weight},
                         {"pruned_weight", node.pruned_weight},
                         {"children", children}});
  }
  return Json{{"times", tree.times},
              {"prune_threshold", tree.prune_threshold},
              {"total_pruned_weight", tree.total_pruned_weight},
              {"consistent", tree.consistent},
              {"consistency_max_offdiag", tree.consistency_max_offdiag},
              {"nodes", nodes}};
}

template <class Scalar>
Json to_json(const FrequencyDistribution<Scalar>& d) {
  return Json{{"trials", d.trials}, {"weights", d.weights}};
}

template <class Scalar>
Json to_json(const NoGoReport<Scalar>& r) {
  return Json{{"input_overlap", r.input_overlap},
              {"output_overlap", r.output_overlap},
              {"unitarity_deviation", r.unitarity_deviation},
              {"unitarity_ok", r.unitarity_ok},
              {"residual_a", r.residual_a},
              {"residual_b", r.residual_b},
              {"delta", r.delta},
              {"cells_orthogonal", r.cells_orthogonal},
              {"deterministic_within_delta", r.deterministic_within_delta},
              {"contradiction_bound", r.contradiction_bound},
              {"residual_lower_bound", r.residual_lower_bound},
              {"meter_impossible", r.meter_impossible}};
}

/// Lattice elements serialize as sorted index sets of maximal branches.
inline Json mask_to_indices(BranchMask m) {
  Json out = Json::array();
  for (std::size_t i = 0; m != 0; ++i, m >>= 1) {
    if (m & 1) out.push_back(i);
  }
  return out;
}

inline Json to_json(const AxiomResult& a) {
  Json out{{"name", a.name},
           {"checked", a.checked},
           {"exhaustive", a.exhaustive},
           {"pass", a.pass}};
  if (a.witness) {
    Json witness = Json::array();
    for (const BranchMask m : *a.witness) {
      if (m != 0) witness.push_back(mask_to_indices(m));
    }
    out["witness"] = witness;
  }
  return out;
}

template <class Scalar>
Json to_json(const MereologyReport<Scalar>& r) {
  Json axioms = Json::array();
  for (const auto& a : r.axioms) axioms.push_back(to_json(a));
  return Json{{"axioms", axioms},
              {"oracle_agreement", to_json(r.oracle_agreement)},
              {"max_offdiagonal", r.max_offdiagonal},
              {"pass", r.pass}};
}

template <class Scalar>
Json to_json(const std::vector<Verdict<Scalar>>& verdicts) {
  Json out = Json::array();
  for (const auto& v : verdicts) {
    out.push_back(Json{{"branch", to_json(v.branch)},
                       {"time", v.time},
                       {"predicate", v.predicate},
                       {"present", v.present},
                       {"will", v.will},
                       {"might", v.might}});
  }
  return out;
}

}  // namespace decohist
