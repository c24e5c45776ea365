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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "decohist/hilbert.hpp"

namespace decohist {

// ---------------------------------------------------------------------------
// Projector cells.  A cell is either a dense projector matrix or, for cells
// diagonal in the computational basis, a sorted list of basis indices.  The
// basis form is what keeps partitions with thousands of cells affordable.
// ---------------------------------------------------------------------------

template <class Scalar>
class ProjectorCell {
 public:
  static ProjectorCell from_matrix(std::string label, Matrix<Scalar> m) {
    if (m.rows() != m.cols()) {
      throw std::invalid_argument("ProjectorCell: matrix not square");
    }
    ProjectorCell cell;
    cell.label_ = std::move(label);
    cell.dim_ = m.rows();
    cell.dense_ = std::move(m);
    return cell;
  }

  static ProjectorCell from_basis(std::string label, Index dim,
                                  std::vector<Index> indices) {
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
      throw std::invalid_argument("ProjectorCell: duplicate basis index");
    }
    for (Index i : indices) {
      if (i < 0 || i >= dim) {
        throw std::invalid_argument("ProjectorCell: basis index out of range");
      }
    }
    ProjectorCell cell;
    cell.label_ = std::move(label);
    cell.dim_ = dim;
    cell.basis_ = std::move(indices);
    return cell;
  }

  Index dim() const { return dim_; }
  const std::string& label() const { return label_; }
  bool basis_aligned() const { return !dense_.has_value(); }

  const std::vector<Index>& basis_indices() const {
    if (!basis_aligned()) {
      throw std::logic_error("ProjectorCell: dense cell has no basis indices");
    }
    return basis_;
  }

  /// P |v>.
  Vector<Scalar> apply(const Vector<Scalar>& v) const {
    if (v.size() != dim_) {
      throw std::invalid_argument("ProjectorCell::apply: dimension mismatch");
    }
    if (dense_) return *dense_ * v;
    Vector<Scalar> out = Vector<Scalar>::Zero(dim_);
    for (Index i : basis_) out(i) = v(i);
    return out;
  }

  Matrix<Scalar> matrix() const {
    if (dense_) return *dense_;
    Matrix<Scalar> m = Matrix<Scalar>::Zero(dim_, dim_);
    for (Index i : basis_) m(i, i) = Complex<Scalar>(1, 0);
    return m;
  }

 private:
  std::string label_;
  Index dim_ = 0;
  std::optional<Matrix<Scalar>> dense_;
  std::vector<Index> basis_;
};

/// Sum of projector cells (used when coarse-graining).  Unions basis cells
/// without materializing; falls back to dense arithmetic otherwise.
template <class Scalar>
ProjectorCell<Scalar> cell_sum(std::string label,
                               std::span<const ProjectorCell<Scalar>> cells) {
  if (cells.empty()) {
    throw std::invalid_argument("cell_sum: empty cell list");
  }
  const Index dim = cells.front().dim();
  bool all_basis = true;
  for (const auto& c : cells) {
    if (c.dim() != dim) throw std::invalid_argument("cell_sum: dimension mismatch");
    all_basis = all_basis && c.basis_aligned();
  }
  if (all_basis) {
    std::vector<Index> merged;
    for (const auto& c : cells) {
      merged.insert(merged.end(), c.basis_indices().begin(),
                    c.basis_indices().end());
    }
    return ProjectorCell<Scalar>::from_basis(std::move(label), dim,
                                             std::move(merged));
  }
  Matrix<Scalar> m = Matrix<Scalar>::Zero(dim, dim);
  for (const auto& c : cells) m += c.matrix();
  return ProjectorCell<Scalar>::from_matrix(std::move(label), std::move(m));
}

// ---------------------------------------------------------------------------
// Partition validation.
// ---------------------------------------------------------------------------

template <class Scalar>
struct PartitionReport {
  Scalar completeness_deviation = 0;   // || sum_k P_k - I ||_max
  Scalar orthogonality_deviation = 0;  // max_{j,k} || P_j P_k - delta_jk P_j ||_max
  Scalar hermiticity_deviation = 0;    // max_k || P_k - P_k^dagger ||_max
  bool accepted = false;
};

/// Checks exhaustiveness (sum to identity) and mutual orthogonality of a cell
/// list.  All-basis partitions are validated exactly by index counting.
template <class Scalar>
PartitionReport<Scalar> validate_partition(
    std::span<const ProjectorCell<Scalar>> cells,
    Scalar tol = Scalar(structural_tolerance)) {
  if (cells.empty()) {
    throw std::invalid_argument("validate_partition: no cells");
  }
  const Index dim = cells.front().dim();
  bool all_basis = true;
  for (const auto& c : cells) {
    if (c.dim() != dim) {
      throw std::invalid_argument("validate_partition: dimension mismatch");
    }
    all_basis = all_basis && c.basis_aligned();
  }

  PartitionReport<Scalar> report;
  if (all_basis) {
    std::vector<int> count(static_cast<std::size_t>(dim), 0);
    for (const auto& c : cells) {
      for (Index i : c.basis_indices()) count[static_cast<std::size_t>(i)]++;
    }
    int worst = 0;
    bool shared = false;
    for (int n : count) {
      worst = std::max(worst, std::abs(n - 1));
      shared = shared || n > 1;
    }
    report.completeness_deviation = Scalar(worst);
    report.orthogonality_deviation = shared ? Scalar(1) : Scalar(0);
    report.hermiticity_deviation = Scalar(0);
  } else {
    Matrix<Scalar> sum = Matrix<Scalar>::Zero(dim, dim);
    std::vector<Matrix<Scalar>> dense;
    dense.reserve(cells.size());
    for (const auto& c : cells) {
      dense.push_back(c.matrix());
      sum += dense.back();
    }
    report.completeness_deviation =
        (sum - Matrix<Scalar>::Identity(dim, dim)).cwiseAbs().maxCoeff();
    Scalar ortho = 0;
    Scalar herm = 0;
    for (std::size_t j = 0; j < dense.size(); ++j) {
      herm = std::max(herm, hermiticity_deviation(dense[j]));
      for (std::size_t k = 0; k < dense.size(); ++k) {
        Matrix<Scalar> prod = dense[j] * dense[k];
        if (j == k) prod -= dense[j];
        ortho = std::max(ortho, prod.cwiseAbs().maxCoeff());
      }
    }
    report.orthogonality_deviation = ortho;
    report.hermiticity_deviation = herm;
  }
  report.accepted = report.completeness_deviation <= tol &&
                    report.orthogonality_deviation <= tol &&
                    report.hermiticity_deviation <= tol;
  return report;
}

// ---------------------------------------------------------------------------
// ProjectorPartition: a validated, exhaustive, mutually orthogonal cell list.
// ---------------------------------------------------------------------------

template <class Scalar>
class ProjectorPartition {
 public:
  static ProjectorPartition create(std::vector<ProjectorCell<Scalar>> cells,
                                   Scalar tol = Scalar(structural_tolerance)) {
    auto report = validate_partition(std::span<const ProjectorCell<Scalar>>(cells), tol);
    if (!report.accepted) {
      throw std::invalid_argument(
          "ProjectorPartition: cells do not form a partition of unity "
          "(completeness deviation " +
          std::to_string(static_cast<double>(report.completeness_deviation)) +
          ", orthogonality deviation " +
          std::to_string(static_cast<double>(report.orthogonality_deviation)) + ")");
    }
    ProjectorPartition p;
    p.dim_ = cells.front().dim();
    p.cells_ = std::move(cells);
    return p;
  }

  /// Partition by groups of computational-basis indices.
  static ProjectorPartition basis_partition(
      Index dim, const std::vector<std::vector<Index>>& groups,
      std::vector<std::string> labels = {}) {
    if (!labels.empty() && labels.size() != groups.size()) {
      throw std::invalid_argument("basis_partition: label count mismatch");
    }
    std::vector<ProjectorCell<Scalar>> cells;
    cells.reserve(groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
      std::string label = labels.empty() ? std::to_string(k) : labels[k];
      cells.push_back(
          ProjectorCell<Scalar>::from_basis(std::move(label), dim, groups[k]));
    }
    return create(std::move(cells));
  }

  /// One cell per basis vector.
  static ProjectorPartition full_basis(Index dim) {
    std::vector<std::vector<Index>> groups;
    groups.reserve(static_cast<std::size_t>(dim));
    for (Index i = 0; i < dim; ++i) groups.push_back({i});
    return basis_partition(dim, groups);
  }

  /// The trivial partition {I}.
  static ProjectorPartition trivial(Index dim, std::string label = "all") {
    std::vector<Index> everything(static_cast<std::size_t>(dim));
    for (Index i = 0; i < dim; ++i) everything[static_cast<std::size_t>(i)] = i;
    std::vector<ProjectorCell<Scalar>> cells;
    cells.push_back(ProjectorCell<Scalar>::from_basis(std::move(label), dim,
                                                      std::move(everything)));
    return create(std::move(cells));
  }

  Index dim() const { return dim_; }
  std::size_t size() const { return cells_.size(); }
  const ProjectorCell<Scalar>& cell(std::size_t k) const { return cells_.at(k); }
  const std::vector<ProjectorCell<Scalar>>& cells() const { return cells_; }

 private:
  Index dim_ = 0;
  std::vector<ProjectorCell<Scalar>> cells_;
};

}  // namespace decohist
