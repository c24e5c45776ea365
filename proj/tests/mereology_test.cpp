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

#include "decohist/measurement.hpp"
#include "decohist/mereology.hpp"
#include "support.hpp"

using namespace decohist;

namespace {

using Mat = Matrix<double>;
using Vec = Vector<double>;
using Lattice = BranchLattice<double>;

/// Single-time space with k distinct-weight branches: diagonal Hamiltonian,
/// basis partition, amplitudes proportional to 1, 2, ..., k with scattered
/// phases.  Always exactly consistent.
HistorySpace<double> ladder_space(Index k) {
  Vec omega(k);
  double norm_sq = 0;
  for (Index i = 0; i < k; ++i) norm_sq += double((i + 1) * (i + 1));
  for (Index i = 0; i < k; ++i) {
    omega(i) = std::polar(double(i + 1) / std::sqrt(norm_sq), 0.7 * double(i));
  }
  Mat h = Mat::Zero(k, k);
  for (Index i = 0; i < k; ++i) h(i, i) = Complex<double>(0.3 * double(i), 0);
  return HistorySpace<double>::uniform(
      std::move(h), std::move(omega), {1.0},
      ProjectorPartition<double>::full_basis(k));
}

Lattice ladder_lattice(Index k) { return Lattice::from_space(ladder_space(k)); }

}  // namespace

TEST_CASE("lattice construction rejects inconsistent spaces") {
  CHECK_THROWS_AS(Lattice::from_space(testing::two_slit_space()),
                  std::invalid_argument);
}

TEST_CASE("lattice construction excludes zero-weight maximal branches") {
  const auto space =
      von_neumann_model(SpinPreparation<double>::from_up_probability(0.3), 4);
  const auto lat = Lattice::from_space(space);
  // Only "+" and "-" survive; ready/idle branches carry no weight.
  CHECK(lat.branch_count() == 2);
  CHECK(lat.omega_deviation() < 1e-10);
  CHECK(lat.max_offdiagonal() < 1e-12);
}

TEST_CASE("explicitly zero-weight branches are rejected by the factory") {
  auto space = ladder_space(3);
  std::vector<BranchVector<double>> branches;
  for (const auto& h : enumerate_histories(space)) {
    branches.push_back(branch_vector(space, h));
  }
  branches[1].vector.setZero();
  branches[1].weight = 0;
  CHECK_THROWS_AS(Lattice::from_branches(std::move(branches), space.omega(), {}),
                  std::invalid_argument);
}

TEST_CASE("is_part: reflexive, subset with orthogonal remainder, disjoint") {
  const auto lat = ladder_lattice(4);
  CHECK(is_part(lat, 0b0001, 0b0001));
  CHECK(is_part(lat, 0b0001, 0b0011));        // delta = {alpha_2}
  CHECK_FALSE(is_part(lat, 0b0001, 0b0010));  // disjoint singletons
  CHECK_FALSE(is_part(lat, 0b0011, 0b0001));  // proper superset, reversed
  CHECK(is_part(lat, 0b0101, lat.full_mask()));
  CHECK_THROWS_AS(is_part(lat, 0, 0b0001), std::invalid_argument);
  CHECK_THROWS_AS(is_part(lat, 0b10000, 0b0001), std::invalid_argument);
}

TEST_CASE("is_part agrees with the subset oracle exhaustively") {
  for (Index k : {2, 3, 5, 8}) {
    const auto lat = ladder_lattice(k);
    for (BranchMask b = 1; b <= lat.full_mask(); ++b) {
      for (BranchMask g = 1; g <= lat.full_mask(); ++g) {
        REQUIRE(is_part(lat, b, g) == subset_oracle(lat, b, g));
      }
    }
  }
}

TEST_CASE("overlap tracks intersection; underlap always holds") {
  const auto lat = ladder_lattice(4);
  for (BranchMask b = 1; b <= lat.full_mask(); ++b) {
    for (BranchMask g = 1; g <= lat.full_mask(); ++g) {
      CHECK(overlap(lat, b, g) == ((b & g) != 0));
      CHECK(underlap(lat, b, g));
    }
  }
}

TEST_CASE("orthogonal elements never overlap, common parts witness overlap") {
  const auto lat = ladder_lattice(5);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<BranchMask> pick(1, lat.full_mask());
  for (int trial = 0; trial < 200; ++trial) {
    const BranchMask b = pick(rng), g = pick(rng);
    const bool orthogonal = std::abs(lat.element_inner(b, g)) <= lat.tolerance();
    const auto common = common_part(lat, b, g);
    if (orthogonal) {
      CHECK_FALSE(overlap(lat, b, g));
      CHECK_FALSE(common.has_value());
    } else {
      CHECK(overlap(lat, b, g));
      REQUIRE(common.has_value());
      CHECK(is_part(lat, *common, b));
      CHECK(is_part(lat, *common, g));
    }
  }
}

TEST_CASE("fusion follows the orthogonal-sum and absorption rules") {
  const auto lat = ladder_lattice(4);
  // Idempotent.
  CHECK(fusion(lat, 0b0101, 0b0101) == 0b0101);
  // Disjoint: fusion denotes the vector sum.
  const BranchMask sum = fusion(lat, 0b0001, 0b0010);
  CHECK(sum == 0b0011);
  const Vec direct = lat.element_vector(0b0001) + lat.element_vector(0b0010);
  CHECK((lat.element_vector(sum) - direct).cwiseAbs().maxCoeff() < 1e-14);
  // One part of the other: fusion is the larger.
  CHECK(fusion(lat, 0b0001, 0b0111) == 0b0111);
  // Commutative and associative.
  for (BranchMask a = 1; a <= lat.full_mask(); ++a) {
    for (BranchMask b = 1; b <= lat.full_mask(); ++b) {
      CHECK(fusion(lat, a, b) == fusion(lat, b, a));
      for (BranchMask c = 1; c <= lat.full_mask(); c += 3) {
        CHECK(fusion(lat, fusion(lat, a, b), c) ==
              fusion(lat, a, fusion(lat, b, c)));
      }
    }
  }
}

TEST_CASE("fusion is the least upper bound") {
  const auto lat = ladder_lattice(4);
  for (BranchMask x = 1; x <= lat.full_mask(); ++x) {
    for (BranchMask y = 1; y <= lat.full_mask(); ++y) {
      const BranchMask f = fusion(lat, x, y);
      CHECK(is_part(lat, x, f));
      CHECK(is_part(lat, y, f));
      for (BranchMask w = 1; w <= lat.full_mask(); ++w) {
        if (is_part(lat, x, w) && is_part(lat, y, w)) {
          CHECK(is_part(lat, f, w));
        }
      }
    }
  }
}

TEST_CASE("common part of equal elements is the element") {
  const auto lat = ladder_lattice(3);
  const auto common = common_part(lat, 0b011, 0b011);
  REQUIRE(common.has_value());
  CHECK(*common == 0b011);
}

TEST_CASE("common part decomposition has orthogonal residuals") {
  const auto lat = ladder_lattice(3);
  const auto decomp = common_part_decomposition(lat, 0b011, 0b110);
  REQUIRE(decomp.has_value());
  CHECK(decomp->common == 0b010);
  CHECK(decomp->residual_b == 0b001);
  CHECK(decomp->residual_g == 0b100);
  CHECK(decomp->residuals_orthogonal);
  // v(b) = v(b') + v(common) holds exactly by construction; check the vectors.
  const Vec vb = lat.element_vector(0b011);
  const Vec recomposed = lat.element_vector(0b001) + lat.element_vector(0b010);
  CHECK((vb - recomposed).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("axiom suite passes on lattices from consistent spaces") {
  for (Index k : {1, 2, 4, 6, 10}) {
    const auto lat = ladder_lattice(k);
    const auto report = axioms_check(lat, AxiomOptions{.seed = 42});
    CHECK(report.pass);
    CHECK(report.oracle_agreement.pass);
    for (const auto& axiom : report.axioms) {
      CHECK(axiom.pass);
      CHECK(axiom.checked > 0);
    }
  }
}

TEST_CASE("axiom suite passes on measurement-model lattices") {
  const auto prep = SpinPreparation<double>::from_up_probability(0.7);
  const auto vn_lat = Lattice::from_space(von_neumann_model(prep, 2));
  CHECK(axioms_check(vn_lat).pass);
  const auto seq_lat =
      Lattice::from_space(sequential_measurement_space(prep, 3));
  CHECK(seq_lat.branch_count() == 8);
  CHECK(axioms_check(seq_lat, AxiomOptions{.seed = 7}).pass);
}

TEST_CASE("corrupted lattice is caught by the axiom suite") {
  const auto space = ladder_space(4);
  std::vector<BranchVector<double>> branches;
  for (const auto& h : enumerate_histories(space)) {
    branches.push_back(branch_vector(space, h));
  }
  branches[2].vector.setZero();
  branches[2].weight = 0;
  const auto lat = Lattice::unchecked(std::move(branches), space.omega(), 1e-8);
  const auto report = axioms_check(lat);
  CHECK_FALSE(report.pass);
  bool antisymmetry_or_oracle = false;
  for (const auto& axiom : report.axioms) {
    if (axiom.name == "antisymmetry" && !axiom.pass) {
      antisymmetry_or_oracle = true;
      REQUIRE(axiom.witness.has_value());
      // The witness re-evaluates to a violation.
      const auto w = *axiom.witness;
      CHECK(is_part(lat, w[0], w[1]));
      CHECK(is_part(lat, w[1], w[0]));
      CHECK(w[0] != w[1]);
    }
  }
  antisymmetry_or_oracle =
      antisymmetry_or_oracle || !report.oracle_agreement.pass;
  CHECK(antisymmetry_or_oracle);
}

TEST_CASE("one-branch lattice passes trivially") {
  const auto lat = ladder_lattice(1);
  CHECK(lat.full_mask() == 0b1);
  CHECK(is_part(lat, 0b1, 0b1));
  CHECK(axioms_check(lat).pass);
}

TEST_CASE("truncated histories contain all their maximal refinements") {
  const auto prep = SpinPreparation<double>::from_up_probability(0.6);
  const auto lat = Lattice::from_space(sequential_measurement_space(prep, 3));
  for (std::size_t len = 1; len <= 2; ++len) {
    for (std::size_t i = 0; i < lat.branch_count(); ++i) {
      const History prefix = lat.branch(i).history.prefix(len);
      const BranchMask coarse = lat.element_for_prefix(prefix);
      REQUIRE(coarse != 0);
      for (std::size_t j = 0; j < lat.branch_count(); ++j) {
        if (!(coarse & (BranchMask(1) << j))) continue;
        CHECK(is_part(lat, BranchMask(1) << j, coarse));
      }
    }
  }
}

TEST_CASE("oracle agreement holds exhaustively on a 2^12-element lattice") {
  const auto lat = ladder_lattice(12);
  const auto report = axioms_check(lat, AxiomOptions{.seed = 3});
  CHECK(report.oracle_agreement.pass);
  CHECK(report.oracle_agreement.exhaustive);
  CHECK(report.oracle_agreement.checked == 4095ull * 4095ull);
  CHECK(report.pass);
}
