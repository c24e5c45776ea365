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

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "decohist/hilbert.hpp"
#include "decohist/partition.hpp"

namespace decohist {

/// The arena all histories live in: a time-independent Hamiltonian, the
/// universal state at reference time 0, strictly increasing sample times, and
/// a projector partition per sample time.
///
/// Values are immutable after construction and safe to share across threads.
template <class Scalar>
class HistorySpace {
 public:
  static HistorySpace create(Matrix<Scalar> hamiltonian, Vector<Scalar> omega,
                             std::vector<Scalar> times,
                             std::vector<ProjectorPartition<Scalar>> partitions,
                             Scalar tol = Scalar(structural_tolerance)) {
    const Index dim = hamiltonian.rows();
    if (hamiltonian.cols() != dim) {
      throw std::invalid_argument("HistorySpace: hamiltonian not square");
    }
    if (omega.size() != dim) {
      throw std::invalid_argument("HistorySpace: state dimension mismatch");
    }
    if (!is_hermitian(hamiltonian, tol)) {
      throw std::invalid_argument("HistorySpace: hamiltonian not hermitian");
    }
    if (std::abs(omega.squaredNorm() - Scalar(1)) > tol) {
      throw std::invalid_argument("HistorySpace: universal state not normalized");
    }
    if (times.empty() || times.size() != partitions.size()) {
      throw std::invalid_argument("HistorySpace: need one partition per sample time");
    }
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      if (!(times[k] < times[k + 1])) {
        throw std::invalid_argument("HistorySpace: times not strictly increasing");
      }
    }
    for (const auto& p : partitions) {
      if (p.dim() != dim) {
        throw std::invalid_argument("HistorySpace: partition dimension mismatch");
      }
    }

    HistorySpace space;
    space.trivial_dynamics_ = hamiltonian.isZero(Scalar(0));
    if (!space.trivial_dynamics_) {
      space.eigensystem_ = diagonalize_hermitian(hamiltonian, tol);
    }
    space.hamiltonian_ = std::move(hamiltonian);
    space.omega_ = std::move(omega);
    space.times_ = std::move(times);
    space.partitions_ = std::move(partitions);
    space.tol_ = tol;
    return space;
  }

  /// Convenience constructor for the simplest spaces: the same partition at
  /// every sample time.
  static HistorySpace uniform(Matrix<Scalar> hamiltonian, Vector<Scalar> omega,
                              std::vector<Scalar> times,
                              ProjectorPartition<Scalar> partition,
                              Scalar tol = Scalar(structural_tolerance)) {
    std::vector<ProjectorPartition<Scalar>> partitions(times.size(), partition);
    return create(std::move(hamiltonian), std::move(omega), std::move(times),
                  std::move(partitions), tol);
  }

  Index dim() const { return omega_.size(); }
  std::size_t num_times() const { return times_.size(); }
  const std::vector<Scalar>& times() const { return times_; }
  Scalar time(std::size_t k) const { return times_.at(k); }
  const Matrix<Scalar>& hamiltonian() const { return hamiltonian_; }
  const Vector<Scalar>& omega() const { return omega_; }
  const ProjectorPartition<Scalar>& partition(std::size_t k) const {
    return partitions_.at(k);
  }
  Scalar tolerance() const { return tol_; }
  bool trivial_dynamics() const { return trivial_dynamics_; }

  /// exp(-i H t) |v>.  Negative t gives the adjoint propagator.
  Vector<Scalar> evolve_state(const Vector<Scalar>& v, Scalar t) const {
    if (trivial_dynamics_ || t == Scalar(0)) return v;
    return eigensystem_->apply_propagator(v, t);
  }

  /// exp(-i H t) as a dense matrix.  Meant for small dimensions; the apply
  /// path above never materializes it.
  Matrix<Scalar> propagator(Scalar t) const {
    if (trivial_dynamics_ || t == Scalar(0)) {
      return Matrix<Scalar>::Identity(dim(), dim());
    }
    return eigensystem_->propagator(t);
  }

  /// P_cell(t_k) |v> = exp(i H t_k) P_cell exp(-i H t_k) |v>.
  Vector<Scalar> apply_heisenberg_cell(std::size_t time_index, std::size_t cell,
                                       const Vector<Scalar>& v) const {
    const Scalar t = time(time_index);
    Vector<Scalar> w = evolve_state(v, t);
    w = partition(time_index).cell(cell).apply(w);
    return evolve_state(w, -t);
  }

  /// Dense matrix of the Heisenberg-picture cell projector.
  Matrix<Scalar> heisenberg_cell_matrix(std::size_t time_index,
                                        std::size_t cell) const {
    Matrix<Scalar> u = propagator(time(time_index));
    return u.adjoint() * partition(time_index).cell(cell).matrix() * u;
  }

 private:
  Matrix<Scalar> hamiltonian_;
  Vector<Scalar> omega_;
  std::vector<Scalar> times_;
  std::vector<ProjectorPartition<Scalar>> partitions_;
  Scalar tol_ = Scalar(structural_tolerance);
  bool trivial_dynamics_ = false;
  std::optional<HermitianEigensystem<Scalar>> eigensystem_;
};

}  // namespace decohist
