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

#include <random>
#include <vector>

#include "decohist/partition.hpp"

namespace decohist {

template <class Scalar>
Matrix<Scalar> random_ginibre(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<Scalar> gauss(0, 1);
  Matrix<Scalar> m(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      m(i, j) = Complex<Scalar>(gauss(rng), gauss(rng));
    }
  }
  return m;
}

template <class Scalar>
Matrix<Scalar> random_hermitian(Index dim, std::mt19937_64& rng) {
  Matrix<Scalar> g = random_ginibre<Scalar>(dim, rng);
  return ((g + g.adjoint()) / Scalar(2)).eval();
}

/// Haar-ish unitary: QR of a Ginibre matrix with the R-diagonal phases folded
/// into Q.
template <class Scalar>
Matrix<Scalar> random_unitary(Index dim, std::mt19937_64& rng) {
  Matrix<Scalar> g = random_ginibre<Scalar>(dim, rng);
  Eigen::HouseholderQR<Matrix<Scalar>> qr(g);
  Matrix<Scalar> q = qr.householderQ();
  Matrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index i = 0; i < dim; ++i) {
    const Complex<Scalar> d = r(i, i);
    q.col(i) *= std::abs(d) > Scalar(0) ? d / std::abs(d) : Complex<Scalar>(1, 0);
  }
  return q;
}

template <class Scalar>
Vector<Scalar> random_state(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<Scalar> gauss(0, 1);
  Vector<Scalar> v(dim);
  for (Index i = 0; i < dim; ++i) {
    v(i) = Complex<Scalar>(gauss(rng), gauss(rng));
  }
  v /= v.norm();
  return v;
}

/// Random rank-split partition: columns of a random unitary grouped into
/// `cells` nonempty blocks of projectors sum_i u_i u_i^dagger.
template <class Scalar>
ProjectorPartition<Scalar> random_partition(Index dim, std::size_t cells,
                                            std::mt19937_64& rng) {
  if (cells == 0 || static_cast<Index>(cells) > dim) {
    throw std::invalid_argument("random_partition: bad cell count");
  }
  const Matrix<Scalar> u = random_unitary<Scalar>(dim, rng);
  // One column per cell first, the rest assigned uniformly.
  std::vector<std::size_t> owner(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) {
    owner[static_cast<std::size_t>(i)] =
        i < static_cast<Index>(cells)
            ? static_cast<std::size_t>(i)
            : std::uniform_int_distribution<std::size_t>(0, cells - 1)(rng);
  }
  std::vector<ProjectorCell<Scalar>> out;
  for (std::size_t c = 0; c < cells; ++c) {
    Matrix<Scalar> p = Matrix<Scalar>::Zero(dim, dim);
    for (Index i = 0; i < dim; ++i) {
      if (owner[static_cast<std::size_t>(i)] == c) {
        p += u.col(i) * u.col(i).adjoint();
      }
    }
    out.push_back(ProjectorCell<Scalar>::from_matrix(std::to_string(c), std::move(p)));
  }
  return ProjectorPartition<Scalar>::create(std::move(out));
}

}  // namespace decohist
