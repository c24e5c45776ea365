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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <complex>
#include <stdexcept>
#include <string>

// Dense complex linear algebra for finite-dimensional Hilbert spaces.
//
// Conventions used throughout the library:
//   * hbar = 1, dimensionless time: the propagator is exp(-i H t).
//   * tensor factors: the FIRST operand indexes the slow (most significant)
//     factor, i.e. basis index of a (x) b is i_a * dim(b) + i_b.
//   * states are column vectors of std::complex<Scalar>; operators are dense
//     square matrices of the same scalar type.

namespace decohist {

using Index = Eigen::Index;

template <class Scalar>
using Complex = std::complex<Scalar>;

template <class Scalar>
using Matrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <class Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Default tolerance for the structural flags (hermitian / unitary /
/// projector) and for state normalization checks.
inline constexpr double structural_tolerance = 1e-10;

// ---------------------------------------------------------------------------
// Structural flag checks.  Each deviation is a max-abs entrywise distance from
// the defining identity, so "within tolerance" composes across dimensions.
// ---------------------------------------------------------------------------

template <class Derived>
auto hermiticity_deviation(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("hermiticity_deviation: matrix not square");
  }
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

template <class Derived>
auto unitarity_deviation(const Eigen::MatrixBase<Derived>& u) {
  if (u.rows() != u.cols()) {
    throw std::invalid_argument("unitarity_deviation: matrix not square");
  }
  using Plain = typename Derived::PlainObject;
  return (u.adjoint() * u - Plain::Identity(u.rows(), u.cols()))
      .cwiseAbs()
      .maxCoeff();
}

/// Distance from being an orthogonal projector: max of ||P^2 - P||_max and
/// ||P - P^dagger||_max.
template <class Derived>
auto projector_deviation(const Eigen::MatrixBase<Derived>& p) {
  if (p.rows() != p.cols()) {
    throw std::invalid_argument("projector_deviation: matrix not square");
  }
  auto idem = (p * p - p).cwiseAbs().maxCoeff();
  auto herm = (p - p.adjoint()).cwiseAbs().maxCoeff();
  return idem > herm ? idem : herm;
}

template <class Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a,
                  double tol = structural_tolerance) {
  return hermiticity_deviation(a) <= tol;
}

template <class Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u,
                double tol = structural_tolerance) {
  return unitarity_deviation(u) <= tol;
}

template <class Derived>
bool is_projector(const Eigen::MatrixBase<Derived>& p,
                  double tol = structural_tolerance) {
  return projector_deviation(p) <= tol;
}

// ---------------------------------------------------------------------------
// Tensor products.
// ---------------------------------------------------------------------------

/// Kronecker product with the first operand as the most significant factor.
/// Works for operators and for column vectors alike and returns an Eigen
/// expression, so products can be chained without intermediate copies.
template <class DerivedA, class DerivedB>
auto tensor_product(const Eigen::MatrixBase<DerivedA>& a,
                    const Eigen::MatrixBase<DerivedB>& b) {
  return Eigen::kroneckerProduct(a.derived(), b.derived());
}

template <class Scalar>
Vector<Scalar> basis_state(Index dim, Index k) {
  if (k < 0 || k >= dim) {
    throw std::invalid_argument("basis_state: index out of range");
  }
  Vector<Scalar> v = Vector<Scalar>::Zero(dim);
  v(k) = Complex<Scalar>(1, 0);
  return v;
}

// ---------------------------------------------------------------------------
// Unitary evolution via hermitian eigendecomposition.
// ---------------------------------------------------------------------------

/// Cached spectral decomposition of a hermitian operator.  H = V diag(w) V^+.
template <class Scalar>
struct HermitianEigensystem {
  Matrix<Scalar> vectors;
  RealVector<Scalar> values;

  Index dim() const { return vectors.rows(); }

  /// exp(-i H t) assembled from the stored eigensystem.
  Matrix<Scalar> propagator(Scalar t) const {
    const Complex<Scalar> mi(0, -1);
    Vector<Scalar> phases =
        (mi * t * values.template cast<Complex<Scalar>>().array()).exp().matrix();
    return vectors * phases.asDiagonal() * vectors.adjoint();
  }

  /// exp(-i H t) |v> without materializing the propagator.
  Vector<Scalar> apply_propagator(const Vector<Scalar>& v, Scalar t) const {
    const Complex<Scalar> mi(0, -1);
    Vector<Scalar> coeffs = vectors.adjoint() * v;
    coeffs.array() *= (mi * t * values.template cast<Complex<Scalar>>().array()).exp();
    return vectors * coeffs;
  }
};

template <class Scalar>
HermitianEigensystem<Scalar> diagonalize_hermitian(
    const Matrix<Scalar>& hamiltonian, Scalar tol = Scalar(structural_tolerance)) {
  if (!is_hermitian(hamiltonian, tol)) {
    throw std::invalid_argument("diagonalize_hermitian: operator not hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(hamiltonian);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("diagonalize_hermitian: eigensolver failed");
  }
  return HermitianEigensystem<Scalar>{solver.eigenvectors(), solver.eigenvalues()};
}

/// exp(-i H t) for hermitian H.  Exactly unitary up to rounding because it is
/// assembled from an orthonormal eigenbasis.
template <class Scalar>
Matrix<Scalar> evolve(const Matrix<Scalar>& hamiltonian, Scalar t,
                      Scalar tol = Scalar(structural_tolerance)) {
  return diagonalize_hermitian(hamiltonian, tol).propagator(t);
}

/// Heisenberg-picture projector exp(i H t) P exp(-i H t).
template <class Scalar>
Matrix<Scalar> heisenberg_projector(const Matrix<Scalar>& projector,
                                    const Matrix<Scalar>& hamiltonian, Scalar t,
                                    Scalar tol = Scalar(structural_tolerance)) {
  if (projector.rows() != hamiltonian.rows() ||
      projector.cols() != hamiltonian.cols()) {
    throw std::invalid_argument("heisenberg_projector: dimension mismatch");
  }
  if (!is_projector(projector, tol)) {
    throw std::invalid_argument("heisenberg_projector: operator not a projector");
  }
  Matrix<Scalar> u = evolve(hamiltonian, t, tol);
  return u.adjoint() * projector * u;
}

}  // namespace decohist
