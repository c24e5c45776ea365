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

#include <random>

#include "decohist/hilbert.hpp"
#include "decohist/partition.hpp"
#include "decohist/random.hpp"

using namespace decohist;

namespace {

using Mat = Matrix<double>;
using Vec = Vector<double>;
using C = Complex<double>;

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("tensor product identity and basis cases") {
  const Mat i2 = Mat::Identity(2, 2);
  Mat i4 = tensor_product(i2, i2);
  CHECK(max_abs(i4 - Mat::Identity(4, 4)) == 0.0);

  const Vec e0 = basis_state<double>(2, 0);
  const Vec e1 = basis_state<double>(2, 1);
  Vec prod = tensor_product(e0, e1);
  REQUIRE(prod.size() == 4);
  // First operand is the most significant factor: (1,0) (x) (0,1) = e_{0*2+1}.
  CHECK(max_abs(prod - basis_state<double>(4, 1)) == 0.0);
}

TEST_CASE("tensor product factorizes matrix-vector products") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat a = random_ginibre<double>(2, rng);
    const Mat b = random_ginibre<double>(2, rng);
    const Vec x = random_state<double>(2, rng);
    const Vec y = random_state<double>(2, rng);
    // Oracle: apply the factors separately and tensor the results.
    const Vec expected = tensor_product((a * x).eval(), (b * y).eval());
    const Mat ab = tensor_product(a, b);
    const Vec got = ab * tensor_product(x, y).eval();
    CHECK(max_abs(got - expected) < 1e-13);
  }
}

TEST_CASE("tensor product is associative up to index flattening") {
  std::mt19937_64 rng(12);
  const Mat a = random_ginibre<double>(2, rng);
  const Mat b = random_ginibre<double>(3, rng);
  const Mat c = random_ginibre<double>(2, rng);
  const Mat left = tensor_product(tensor_product(a, b).eval(), c);
  const Mat right = tensor_product(a, tensor_product(b, c).eval());
  CHECK(max_abs(left - right) < 1e-13);
}

TEST_CASE("tensor product distributes over superpositions") {
  std::mt19937_64 rng(13);
  const Vec psi = random_state<double>(3, rng);
  const Vec chi = random_state<double>(2, rng);
  const Vec chi_prime = random_state<double>(2, rng);
  const C c1(0.3, 0.4), c2(-0.1, 0.9);
  const Vec lhs = tensor_product(psi, (c1 * chi + c2 * chi_prime).eval());
  const Vec rhs = c1 * tensor_product(psi, chi).eval() +
                  c2 * tensor_product(psi, chi_prime).eval();
  CHECK(max_abs(lhs - rhs) < 1e-14);
}

TEST_CASE("evolve at time zero is the identity") {
  std::mt19937_64 rng(21);
  const Mat h = random_hermitian<double>(5, rng);
  CHECK(max_abs(evolve(h, 0.0) - Mat::Identity(5, 5)) < 1e-13);
}

TEST_CASE("evolve of a diagonal phase") {
  Mat h = Mat::Zero(2, 2);
  h(1, 1) = C(std::numbers::pi, 0);
  const Mat u = evolve(h, 1.0);
  Mat expected = Mat::Identity(2, 2);
  expected(1, 1) = C(-1, 0);
  CHECK(max_abs(u - expected) < 1e-14);
}

TEST_CASE("evolve satisfies the group law") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat h = random_hermitian<double>(4, rng);
    std::uniform_real_distribution<double> t_dist(-2.0, 2.0);
    const double t = t_dist(rng), s = t_dist(rng);
    CHECK(max_abs(evolve(h, t) * evolve(h, s) - evolve(h, t + s)) < 1e-12);
  }
}

TEST_CASE("evolve rejects non-hermitian input") {
  std::mt19937_64 rng(23);
  Mat h = random_ginibre<double>(3, rng);
  h(0, 1) += C(1, 1);  // make sure it is genuinely non-hermitian
  CHECK_THROWS_AS(evolve(h, 1.0), std::invalid_argument);
}

TEST_CASE("propagators are unitary to 1e-12 for dims up to 64") {
  std::mt19937_64 rng(24);
  for (Index dim : {2, 3, 8, 17, 64}) {
    const Mat h = random_hermitian<double>(dim, rng);
    const Mat u = evolve(h, 1.37);
    CHECK(unitarity_deviation(u) <= 1e-12);
  }
}

TEST_CASE("unitaries preserve inner products") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = 6;
    const Mat u = random_unitary<double>(dim, rng);
    const Vec x = random_state<double>(dim, rng);
    const Vec y = random_state<double>(dim, rng);
    const C before = x.dot(y);
    const C after = (u * x).dot(u * y);
    CHECK(std::abs(before - after) < 1e-12);
  }
}

TEST_CASE("heisenberg projector at time zero is the projector") {
  std::mt19937_64 rng(31);
  const Mat h = random_hermitian<double>(4, rng);
  const auto part = random_partition<double>(4, 2, rng);
  const Mat p = part.cell(0).matrix();
  CHECK(max_abs(heisenberg_projector(p, h, 0.0) - p) < 1e-12);
}

TEST_CASE("heisenberg projector is constant when [P, H] = 0") {
  Mat h = Mat::Zero(3, 3);
  h(0, 0) = C(0.5, 0);
  h(1, 1) = C(-1.25, 0);
  h(2, 2) = C(2.0, 0);
  Mat p = Mat::Zero(3, 3);
  p(1, 1) = C(1, 0);
  for (double t : {0.3, 1.0, -4.2}) {
    CHECK(max_abs(heisenberg_projector(p, h, t) - p) < 1e-13);
  }
}

TEST_CASE("heisenberg projector keeps trace, idempotency, hermiticity") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const Index dim = 5;
    const Mat h = random_hermitian<double>(dim, rng);
    const auto part = random_partition<double>(dim, 3, rng);
    const Mat p = part.cell(1).matrix();
    const Mat pt = heisenberg_projector(p, h, 0.8);
    CHECK(std::abs((pt.trace() - p.trace()).real()) < 1e-11);
    CHECK(projector_deviation(pt) <= 1e-10);
  }
}

TEST_CASE("heisenberg projector rejects flag violations") {
  std::mt19937_64 rng(33);
  const Mat h = random_hermitian<double>(3, rng);
  const Mat not_projector = random_ginibre<double>(3, rng);
  CHECK_THROWS_AS(heisenberg_projector(not_projector, h, 1.0),
                  std::invalid_argument);
}

TEST_CASE("validate_partition on the qubit basis") {
  std::vector<ProjectorCell<double>> cells;
  cells.push_back(ProjectorCell<double>::from_basis("0", 2, {0}));
  cells.push_back(ProjectorCell<double>::from_basis("1", 2, {1}));
  const auto report =
      validate_partition(std::span<const ProjectorCell<double>>(cells), 1e-10);
  CHECK(report.accepted);
  CHECK(report.completeness_deviation == 0.0);
  CHECK(report.orthogonality_deviation == 0.0);
}

TEST_CASE("validate_partition rejects a non-exhaustive cell list") {
  std::vector<ProjectorCell<double>> cells;
  cells.push_back(ProjectorCell<double>::from_basis("0", 2, {0}));
  const auto report =
      validate_partition(std::span<const ProjectorCell<double>>(cells), 1e-10);
  CHECK_FALSE(report.accepted);
  CHECK(report.completeness_deviation == 1.0);
}

TEST_CASE("validate_partition accepts {P, I-P} for a random projector") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const Index dim = 6;
    const auto part = random_partition<double>(dim, 2, rng);
    const Mat p = part.cell(0).matrix();
    std::vector<ProjectorCell<double>> cells;
    cells.push_back(ProjectorCell<double>::from_matrix("p", p));
    cells.push_back(ProjectorCell<double>::from_matrix(
        "complement", Mat::Identity(dim, dim) - p));
    const auto report =
        validate_partition(std::span<const ProjectorCell<double>>(cells), 1e-10);
    CHECK(report.accepted);
  }
}

TEST_CASE("validate_partition flags dimension mismatches") {
  std::vector<ProjectorCell<double>> cells;
  cells.push_back(ProjectorCell<double>::from_basis("0", 2, {0}));
  cells.push_back(ProjectorCell<double>::from_basis("1", 3, {1}));
  CHECK_THROWS_AS(
      validate_partition(std::span<const ProjectorCell<double>>(cells), 1e-10),
      std::invalid_argument);
}

TEST_CASE("core templates instantiate for float") {
  Matrix<float> h(2, 2);
  h << Complex<float>(0, 0), Complex<float>(0, -1), Complex<float>(0, 1),
      Complex<float>(0, 0);
  const Matrix<float> u = evolve(h, 0.5f, 1e-5f);
  CHECK(unitarity_deviation(u) < 1e-5f);
}
