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

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "decohist/measurement.hpp"
#include "decohist/semantics.hpp"

// Scenario files: one JSON document describing either a measurement-model
// shorthand (kind + parameters) or an explicit space (hamiltonian, omega,
// times, partitions), plus optional coarse grainings and a predicate corpus.
// Complex numbers are written as [re, im]; plain numbers are taken as real.

namespace decohist {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  std::string kind;  // von_neumann | repeated | repeated_sequential
  Complex<double> c{0, 0};
  Index pointer_dim = 2;
  std::size_t trials = 1;
};

struct Scenario {
  std::string name;
  double tolerance = structural_tolerance;
  std::uint64_t seed = 0;
  std::size_t budget = default_history_budget;

  std::optional<ModelSpec> model;
  std::vector<Index> factor_dims;  // optional; product must match the space
  Matrix<double> hamiltonian;
  Vector<double> omega;
  std::vector<double> times;
  std::vector<ProjectorPartition<double>> partitions;

  std::vector<std::pair<std::string, CoarseGraining>> coarse_grainings;
  std::vector<Predicate> predicates;
};

namespace detail {

using nlohmann::json;

inline Complex<double> parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return Complex<double>(j.get<double>(), 0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex<double>(j[0].get<double>(), j[1].get<double>());
  }
  throw ScenarioError(where + ": expected a number or [re, im] pair");
}

inline Matrix<double> parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ScenarioError(where + ": expected a nonempty array of rows");
  }
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix<double> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ScenarioError(where + ": ragged matrix");
    }
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                              where + "[" + std::to_string(r) + "][" +
                                  std::to_string(c) + "]");
    }
  }
  return m;
}

inline Vector<double> parse_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ScenarioError(where + ": expected a nonempty array");
  }
  Vector<double> v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) =
        parse_complex(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline ProjectorPartition<double> parse_partition(const json& j, Index dim,
                                                  double tol,
                                                  const std::string& where) {
  if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty()) {
    throw ScenarioError(where + ": partition needs a nonempty cells array");
  }
  std::vector<ProjectorCell<double>> cells;
  std::size_t idx = 0;
  for (const auto& cj : j["cells"]) {
    const std::string cwhere = where + ".cells[" + std::to_string(idx) + "]";
    std::string label = cj.value("label", std::to_string(idx));
    if (cj.contains("basis")) {
      std::vector<Index> indices;
      for (const auto& b : cj["basis"]) {
        if (!b.is_number_integer()) {
          throw ScenarioError(cwhere + ".basis: expected integer indices");
        }
        indices.push_back(b.get<Index>());
      }
      try {
        cells.push_back(ProjectorCell<double>::from_basis(std::move(label), dim,
                                                          std::move(indices)));
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(cwhere + ": " + e.what());
      }
    } else if (cj.contains("matrix")) {
      Matrix<double> m = parse_matrix(cj["matrix"], cwhere + ".matrix");
      if (m.rows() != dim || m.cols() != dim) {
        throw ScenarioError(cwhere + ".matrix: dimension mismatch");
      }
      if (projector_deviation(m) > tol) {
        throw ScenarioError(cwhere + ".matrix: not a projector within tolerance");
      }
      cells.push_back(ProjectorCell<double>::from_matrix(std::move(label),
                                                         std::move(m)));
    } else {
      throw ScenarioError(cwhere + ": cell needs basis indices or a matrix");
    }
    ++idx;
  }
  auto report =
      validate_partition(std::span<const ProjectorCell<double>>(cells), tol);
  if (!report.accepted) {
    throw ScenarioError(
        where + ": cells do not form a partition of unity (completeness "
                "deviation " +
        std::to_string(report.completeness_deviation) +
        ", orthogonality deviation " +
        std::to_string(report.orthogonality_deviation) + ")");
  }
  return ProjectorPartition<double>::create(std::move(cells), tol);
}

}  // namespace detail

/// Builds the history space a scenario describes.  Shorthand models defer to
/// the measurement-model constructors; explicit scenarios are validated by
/// the HistorySpace factory.
inline HistorySpace<double> build_space(const Scenario& s) {
  if (s.model) {
    const auto prep = SpinPreparation<double>::from_amplitude(s.model->c);
    if (s.model->kind == "von_neumann") {
      return von_neumann_model(prep, s.model->pointer_dim);
    }
    if (s.model->kind == "repeated") {
      return repeated_measurement_space(prep, s.model->trials, s.budget);
    }
    if (s.model->kind == "repeated_sequential") {
      return sequential_measurement_space(prep, s.model->trials, s.budget);
    }
    throw ScenarioError("model.kind: unknown model '" + s.model->kind + "'");
  }
  try {
    return HistorySpace<double>::create(s.hamiltonian, s.omega, s.times,
                                        s.partitions, s.tolerance);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario invalid: ") + e.what());
  }
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario file: " + path);
  }
  detail::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ScenarioError("parse error in " + path + ": " + e.what());
  }

  Scenario s;
  s.name = j.value("name", std::string("scenario"));
  s.tolerance = j.value("tolerance", structural_tolerance);
  s.seed = j.value("seed", std::uint64_t(0));
  s.budget = j.value("budget", default_history_budget);

  if (j.contains("model")) {
    const auto& mj = j["model"];
    ModelSpec m;
    m.kind = mj.value("kind", std::string());
    if (mj.contains("c")) {
      m.c = detail::parse_complex(mj["c"], "model.c");
    } else if (mj.contains("c2")) {
      const double c2 = mj["c2"].get<double>();
      if (c2 < 0 || c2 > 1) {
        throw ScenarioError("model.c2: probability outside [0,1]");
      }
      m.c = Complex<double>(std::sqrt(c2), 0);
    } else {
      throw ScenarioError("model: needs amplitude c or probability c2");
    }
    m.pointer_dim = mj.value("pointer_dim", Index(2));
    m.trials = mj.value("trials", std::size_t(1));
    s.model = std::move(m);
  } else {
    if (!j.contains("hamiltonian") || !j.contains("omega") ||
        !j.contains("times") || !j.contains("partitions")) {
      throw ScenarioError(
          "scenario needs either a model shorthand or hamiltonian/omega/"
          "times/partitions");
    }
    s.hamiltonian = detail::parse_matrix(j["hamiltonian"], "hamiltonian");
    s.omega = detail::parse_vector(j["omega"], "omega");
    if (j.contains("dims")) {
      Index product = 1;
      for (const auto& d : j["dims"]) {
        s.factor_dims.push_back(d.get<Index>());
        if (s.factor_dims.back() < 1) {
          throw ScenarioError("dims: factor dimensions must be positive");
        }
        product *= s.factor_dims.back();
      }
      if (product != s.omega.size()) {
        throw ScenarioError("dims: factor product " + std::to_string(product) +
                            " does not match state dimension " +
                            std::to_string(s.omega.size()));
      }
    }
    for (const auto& t : j["times"]) s.times.push_back(t.get<double>());
    std::size_t k = 0;
    for (const auto& pj : j["partitions"]) {
      s.partitions.push_back(detail::parse_partition(
          pj, s.omega.size(), s.tolerance,
          "partitions[" + std::to_string(k) + "]"));
      ++k;
    }
  }

  if (j.contains("coarse_grainings")) {
    for (const auto& gj : j["coarse_grainings"]) {
      CoarseGraining g;
      if (!gj.contains("map")) {
        throw ScenarioError("coarse_grainings: entry needs a map");
      }
      for (const auto& row : gj["map"]) {
        g.map.push_back(row.get<std::vector<std::size_t>>());
      }
      if (gj.contains("labels")) {
        for (const auto& row : gj["labels"]) {
          g.labels.push_back(row.get<std::vector<std::string>>());
        }
      }
      s.coarse_grainings.emplace_back(gj.value("name", std::string("grouping")),
                                      std::move(g));
    }
  }

  if (j.contains("predicates")) {
    for (const auto& pj : j["predicates"]) {
      const std::string name = pj.value("name", std::string());
      if (name.empty()) throw ScenarioError("predicates: entry needs a name");
      const std::string kind = pj.value("kind", std::string("occasion"));
      if (kind != "occasion" && kind != "eternal") {
        throw ScenarioError("predicates." + name + ": unknown kind " + kind);
      }
      if (!pj.contains("true_labels")) {
        throw ScenarioError("predicates." + name + ": needs true_labels");
      }
      s.predicates.push_back(label_predicate(
          name, kind == "eternal" ? PredicateKind::eternal : PredicateKind::occasion,
          pj["true_labels"].get<std::vector<std::string>>()));
    }
  }

  // Full validation: a scenario is loadable only if its space builds and its
  // groupings fit the partitions.
  const auto space = build_space(s);
  for (const auto& [gname, grouping] : s.coarse_grainings) {
    try {
      validate_grouping(space, grouping);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError("coarse_grainings." + gname + ": " + e.what());
    }
  }
  return s;
}

}  // namespace decohist
