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

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "decohist/histories.hpp"

namespace decohist {

/// A lattice element is a nonempty subset of maximal branches, identified
/// with the vector sum over the subset.  Bit i stands for maximal branch i.
using BranchMask = std::uint64_t;

// ---------------------------------------------------------------------------
// BranchLattice: pairwise-orthogonal maximal branch vectors from a consistent
// history space, plus the Gram matrix all part/overlap arithmetic runs on.
// The Gram matrix is computed once from the literal vectors, so approximate
// orthogonality is carried through honestly rather than assumed away.
// ---------------------------------------------------------------------------

template <class Scalar>
class BranchLattice {
 public:
  struct Options {
    Scalar tolerance = Scalar(1e-8);     // vector-arithmetic tolerance
    Scalar drop_weight = Scalar(1e-12);  // maximal branches below this are excluded
    ConsistencyOptions consistency;      // pre-check when built from a space
  };

  static BranchLattice from_space(const HistorySpace<Scalar>& space,
                                  const Options& opts = {}) {
    const auto creport = consistency_check(space, opts.consistency);
    if (!creport.consistent) {
      throw std::invalid_argument(
          "BranchLattice: history space fails the consistency check");
    }
    std::vector<BranchVector<Scalar>> branches;
    for (const auto& h : enumerate_histories(space, opts.consistency.budget)) {
      auto bv = branch_vector(space, h);
      if (bv.weight > opts.drop_weight) branches.push_back(std::move(bv));
    }
    return from_branches(std::move(branches), space.omega(), opts);
  }

  static BranchLattice from_branches(std::vector<BranchVector<Scalar>> branches,
                                     const Vector<Scalar>& omega,
                                     const Options& opts = {}) {
    BranchLattice lat = unchecked(std::move(branches), omega, opts.tolerance);
    if (lat.branch_count() == 0) {
      throw std::invalid_argument("BranchLattice: no nonzero maximal branches");
    }
    if (lat.omega_deviation() > opts.tolerance) {
      throw std::invalid_argument(
          "BranchLattice: full-set element does not recover the universal state");
    }
    for (std::size_t i = 0; i < lat.branch_count(); ++i) {
      if (lat.branches_[i].weight <= opts.drop_weight) {
        throw std::invalid_argument("BranchLattice: zero-weight maximal branch");
      }
      for (std::size_t j = i + 1; j < lat.branch_count(); ++j) {
        const Scalar scale =
            std::max(std::sqrt(lat.branches_[i].weight * lat.branches_[j].weight),
                     Scalar(opts.consistency.floor));
        if (std::abs(lat.gram_(Index(i), Index(j))) >
            Scalar(opts.consistency.epsilon) * scale) {
          throw std::invalid_argument(
              "BranchLattice: maximal branches not pairwise orthogonal");
        }
      }
    }
    return lat;
  }

  /// No validation; for negative controls in tests.
  static BranchLattice unchecked(std::vector<BranchVector<Scalar>> branches,
                                 const Vector<Scalar>& omega, Scalar tolerance) {
    if (branches.size() > 32) {
      throw BudgetExceeded("BranchLattice: more than 32 maximal branches");
    }
    BranchLattice lat;
    lat.branches_ = std::move(branches);
    lat.tol_ = tolerance;
    const Index k = static_cast<Index>(lat.branches_.size());
    lat.gram_ = Matrix<Scalar>(k, k);
    Vector<Scalar> sum = Vector<Scalar>::Zero(omega.size());
    for (Index i = 0; i < k; ++i) {
      sum += lat.branches_[static_cast<std::size_t>(i)].vector;
      for (Index j = 0; j < k; ++j) {
        lat.gram_(i, j) = lat.branches_[static_cast<std::size_t>(i)].vector.dot(
            lat.branches_[static_cast<std::size_t>(j)].vector);
      }
    }
    lat.max_offdiag_ = 0;
    for (Index i = 0; i < k; ++i) {
      for (Index j = i + 1; j < k; ++j) {
        lat.max_offdiag_ = std::max(lat.max_offdiag_, std::abs(lat.gram_(i, j)));
      }
    }
    lat.omega_deviation_ =
        lat.branches_.empty() ? Scalar(0) : (sum - omega).cwiseAbs().maxCoeff();
    return lat;
  }

  std::size_t branch_count() const { return branches_.size(); }
  const BranchVector<Scalar>& branch(std::size_t i) const { return branches_.at(i); }
  const Matrix<Scalar>& gram() const { return gram_; }
  Scalar tolerance() const { return tol_; }
  /// Largest residual inner product between distinct maximal branches.
  Scalar max_offdiagonal() const { return max_offdiag_; }
  /// Entrywise distance of the full-set element from |Omega>.
  Scalar omega_deviation() const { return omega_deviation_; }

  BranchMask full_mask() const {
    return branches_.size() == 64 ? ~BranchMask(0)
                                  : (BranchMask(1) << branches_.size()) - 1;
  }

  bool is_element(BranchMask m) const {
    return m != 0 && (m & ~full_mask()) == 0;
  }

  void require_element(BranchMask m) const {
    if (!is_element(m)) {
      throw std::invalid_argument("BranchLattice: mask is not a lattice element");
    }
  }

  Vector<Scalar> element_vector(BranchMask m) const {
    require_element(m);
    Vector<Scalar> v = Vector<Scalar>::Zero(branches_.front().vector.size());
    for (std::size_t i = 0; i < branches_.size(); ++i) {
      if (m & (BranchMask(1) << i)) v += branches_[i].vector;
    }
    return v;
  }

  /// || sum over the subset ||^2, from the Gram matrix.
  Scalar element_weight(BranchMask m) const {
    require_element(m);
    Complex<Scalar> w = 0;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
      if (!(m & (BranchMask(1) << i))) continue;
      for (std::size_t j = 0; j < branches_.size(); ++j) {
        if (m & (BranchMask(1) << j)) w += gram_(Index(i), Index(j));
      }
    }
    return w.real();
  }

  /// <element(a) | element(b)>.
  Complex<Scalar> element_inner(BranchMask a, BranchMask b) const {
    require_element(a);
    require_element(b);
    Complex<Scalar> out = 0;
    for (BranchMask ra = a; ra; ra &= ra - 1) {
      const auto i = static_cast<Index>(std::countr_zero(ra));
      for (BranchMask rb = b; rb; rb &= rb - 1) {
        out += gram_(i, static_cast<Index>(std::countr_zero(rb)));
      }
    }
    return out;
  }

  /// Element collecting every maximal branch that refines the given truncated
  /// history; 0 if none does.
  BranchMask element_for_prefix(const History& prefix) const {
    BranchMask m = 0;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
      const History& h = branches_[i].history;
      if (prefix.length() > h.length()) continue;
      bool match = true;
      for (std::size_t k = 0; k < prefix.length() && match; ++k) {
        match = h.cell(k) == prefix.cell(k);
      }
      if (match) m |= BranchMask(1) << i;
    }
    return m;
  }

 private:
  std::vector<BranchVector<Scalar>> branches_;
  Matrix<Scalar> gram_;
  Scalar tol_ = Scalar(1e-8);
  Scalar max_offdiag_ = 0;
  Scalar omega_deviation_ = 0;
};

// ---------------------------------------------------------------------------
// Parthood and the derived relations.
// ---------------------------------------------------------------------------

namespace detail {

/// nu^dagger G nu for integer coefficients nu in {-1,0,+1} encoded as two
/// masks (plus, minus).  Iterates set bits only.
template <class Scalar>
Scalar coefficient_norm_sq(const BranchLattice<Scalar>& lat, BranchMask plus,
                           BranchMask minus) {
  const auto& g = lat.gram();
  Complex<Scalar> out = 0;
  for (BranchMask ri = plus | minus; ri; ri &= ri - 1) {
    const auto i = static_cast<Index>(std::countr_zero(ri));
    const int ci = (plus >> i) & 1 ? 1 : -1;
    for (BranchMask rj = plus | minus; rj; rj &= rj - 1) {
      const auto j = static_cast<Index>(std::countr_zero(rj));
      const int cj = (plus >> j) & 1 ? 1 : -1;
      out += Scalar(ci * cj) * g(i, j);
    }
  }
  return out.real();
}

}  // namespace detail

/// True when the two elements denote the same vector within tolerance.
template <class Scalar>
bool elements_equal(const BranchLattice<Scalar>& lat, BranchMask b, BranchMask g) {
  lat.require_element(b);
  lat.require_element(g);
  if (b == g) return true;
  const Scalar dist_sq = detail::coefficient_norm_sq(lat, g & ~b, b & ~g);
  return dist_sq <= lat.tolerance() * lat.tolerance();
}

/// Vector parthood: b is part of g iff the vectors coincide, or there is a
/// nonzero lattice vector delta orthogonal to b with v(b) + delta = v(g).
/// Implemented by vector arithmetic on the Gram matrix; subset_oracle is the
/// independent route it has to agree with.
template <class Scalar>
bool is_part(const BranchLattice<Scalar>& lat, BranchMask b, BranchMask g) {
  lat.require_element(b);
  lat.require_element(g);
  if (elements_equal(lat, b, g)) return true;

  // Coefficients of d = v(g) - v(b) along each maximal branch decide the
  // candidate delta; the residual and orthogonality checks confirm it.
  const auto& gram = lat.gram();
  const std::size_t k = lat.branch_count();
  BranchMask delta = 0;
  for (std::size_t i = 0; i < k; ++i) {
    Complex<Scalar> num = 0;
    for (BranchMask rj = b ^ g; rj; rj &= rj - 1) {
      const auto j = static_cast<Index>(std::countr_zero(rj));
      const int mu = ((g >> j) & 1) ? 1 : -1;
      num += Scalar(mu) * gram(Index(i), j);
    }
    const Scalar w = gram(Index(i), Index(i)).real();
    if (w <= lat.tolerance() * lat.tolerance()) {
      if (std::abs(num) > lat.tolerance()) return false;
      continue;
    }
    const Complex<Scalar> lambda = num / w;
    if (std::abs(lambda - Complex<Scalar>(1, 0)) <= Scalar(0.5)) {
      delta |= BranchMask(1) << i;
    } else if (std::abs(lambda) > Scalar(0.5)) {
      return false;
    }
  }
  if (delta == 0) return false;

  // d must equal the delta element's vector ...
  const Scalar residual_sq =
      detail::coefficient_norm_sq(lat, (g & ~b) & ~delta, (b & ~g) | (delta & ~(g & ~b)));
  if (residual_sq > lat.tolerance() * lat.tolerance()) return false;
  // ... and be orthogonal to b.
  if (std::abs(lat.element_inner(delta, b)) > lat.tolerance()) return false;
  return true;
}

/// Brute-force oracle: parthood iff subset inclusion of the index sets.
template <class Scalar>
bool subset_oracle(const BranchLattice<Scalar>& lat, BranchMask b, BranchMask g) {
  lat.require_element(b);
  lat.require_element(g);
  return (b & ~g) == 0;
}

/// Existential search over all lattice elements, per the definition
/// O(x,y) = exists z (Pzx and Pzy).
template <class Scalar>
bool overlap(const BranchLattice<Scalar>& lat, BranchMask b, BranchMask g) {
  lat.require_element(b);
  lat.require_element(g);
  if (lat.branch_count() > 20) {
    throw BudgetExceeded("overlap: exhaustive element search too large");
  }
  for (BranchMask z = 1; z <= lat.full_mask(); ++z) {
    if (is_part(lat, z, b) && is_part(lat, z, g)) return true;
  }
  return false;
}

/// U(x,y) = exists z (Pxz and Pyz); always true because |Omega> tops the
/// lattice, but evaluated by search all the same.
template <class Scalar>
bool underlap(const BranchLattice<Scalar>& lat, BranchMask b, BranchMask g) {
  lat.require_element(b);
  lat.require_element(g);
  if (lat.branch_count() > 20) {
    throw BudgetExceeded("underlap: exhaustive element search too large");
  }
  for (BranchMask z = 1; z <= lat.full_mask(); ++z) {
    if (is_part(lat, b, z) && is_part(lat, g, z)) return true;
  }
  return false;
}

template <class Scalar>
BranchMask fusion(const BranchLattice<Scalar>& lat, BranchMask b, BranchMask g) {
  lat.require_element(b);
  lat.require_element(g);
  return b | g;
}

template <class Scalar>
std::optional<BranchMask> common_part(const BranchLattice<Scalar>& lat,
                                      BranchMask b, BranchMask g) {
  lat.require_element(b);
  lat.require_element(g);
  const BranchMask m = b & g;
  if (m == 0) return std::nullopt;
  return m;
}

template <class Scalar>
struct CommonPartDecomposition {
  BranchMask common = 0;
  BranchMask residual_b = 0;  // 0 encodes an empty residual
  BranchMask residual_g = 0;
  Scalar residual_overlap = 0;  // |<b', g'>|
  bool residuals_orthogonal = false;
};

/// The common part plus the decomposition v(b) = v(b') + v(delta),
/// v(g) = v(g') + v(delta) with orthogonal residuals.
template <class Scalar>
std::optional<CommonPartDecomposition<Scalar>> common_part_decomposition(
    const BranchLattice<Scalar>& lat, BranchMask b, BranchMask g) {
  const auto m = common_part(lat, b, g);
  if (!m) return std::nullopt;
  CommonPartDecomposition<Scalar> out;
  out.common = *m;
  out.residual_b = b & ~*m;
  out.residual_g = g & ~*m;
  if (out.residual_b != 0 && out.residual_g != 0) {
    out.residual_overlap =
        std::abs(lat.element_inner(out.residual_b, out.residual_g));
  }
  out.residuals_orthogonal = out.residual_overlap <= lat.tolerance();
  return out;
}

// ---------------------------------------------------------------------------
// Axiom suite.
// ---------------------------------------------------------------------------

struct AxiomOptions {
  std::size_t pair_budget = 20'000'000;    // exhaustive pair loops up to this
  std::size_t triple_budget = 300'000;     // exhaustive triple loops up to this
  std::size_t sample_count = 20'000;       // random triples otherwise
  std::uint64_t seed = 0;
};

struct AxiomResult {
  std::string name;
  std::size_t checked = 0;
  bool exhaustive = false;
  bool pass = false;
  std::optional<std::array<BranchMask, 3>> witness;  // unused slots are 0
};

template <class Scalar>
struct MereologyReport {
  std::vector<AxiomResult> axioms;
  AxiomResult oracle_agreement;
  Scalar max_offdiagonal = 0;
  bool pass = false;
};

/// Evaluates reflexivity, antisymmetry, transitivity and M1-M3 over the
/// lattice, exhaustively when the loops fit the budgets and by seeded
/// sampling otherwise, and cross-checks is_part against subset_oracle.
template <class Scalar>
MereologyReport<Scalar> axioms_check(const BranchLattice<Scalar>& lat,
                                     const AxiomOptions& opts = {}) {
  const BranchMask full = lat.full_mask();
  const std::size_t elements = static_cast<std::size_t>(full);
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<BranchMask> pick(1, full);

  MereologyReport<Scalar> report;
  report.max_offdiagonal = lat.max_offdiagonal();

  auto fresh = [](std::string name, bool exhaustive) {
    AxiomResult r;
    r.name = std::move(name);
    r.exhaustive = exhaustive;
    r.pass = true;
    return r;
  };

  AxiomResult reflexive = fresh("reflexivity", true);
  for (BranchMask b = 1; b <= full; ++b) {
    ++reflexive.checked;
    if (!is_part(lat, b, b)) {
      reflexive.pass = false;
      reflexive.witness = {{b, 0, 0}};
      break;
    }
  }

  AxiomResult m1 = fresh("M1_fusion_idempotent", true);
  for (BranchMask b = 1; b <= full; ++b) {
    ++m1.checked;
    if (fusion(lat, b, b) != b) {
      m1.pass = false;
      m1.witness = {{b, 0, 0}};
      break;
    }
  }

  const bool pairs_exhaustive =
      elements <= 65'536 && elements * elements <= opts.pair_budget;
  AxiomResult antisym = fresh("antisymmetry", pairs_exhaustive);
  AxiomResult m2 = fresh("M2_fusion_exists", pairs_exhaustive);
  AxiomResult oracle = fresh("is_part_vs_subset_oracle", pairs_exhaustive);
  auto check_pair = [&](BranchMask b, BranchMask g) {
    ++antisym.checked;
    ++m2.checked;
    ++oracle.checked;
    const bool bg = is_part(lat, b, g);
    const bool gb = is_part(lat, g, b);
    if (antisym.pass && bg && gb && b != g) {
      antisym.pass = false;
      antisym.witness = {{b, g, 0}};
    }
    // Underlap always holds (|Omega> tops the lattice); M2 then demands the
    // fusion exists in the lattice.
    if (m2.pass && !lat.is_element(fusion(lat, b, g))) {
      m2.pass = false;
      m2.witness = {{b, g, 0}};
    }
    if (oracle.pass && bg != subset_oracle(lat, b, g)) {
      oracle.pass = false;
      oracle.witness = {{b, g, 0}};
    }
  };
  if (pairs_exhaustive) {
    for (BranchMask b = 1; b <= full; ++b) {
      for (BranchMask g = 1; g <= full; ++g) check_pair(b, g);
    }
  } else {
    for (std::size_t n = 0; n < opts.sample_count; ++n) {
      check_pair(pick(rng), pick(rng));
    }
  }

  const bool triples_exhaustive =
      elements <= 1'000 && elements * elements * elements <= opts.triple_budget;
  AxiomResult transitive = fresh("transitivity", triples_exhaustive);
  AxiomResult m3 = fresh("M3_fusion_least_upper", triples_exhaustive);
  auto check_triple = [&](BranchMask x, BranchMask y, BranchMask z) {
    ++transitive.checked;
    ++m3.checked;
    if (transitive.pass && is_part(lat, x, y) && is_part(lat, y, z) &&
        !is_part(lat, x, z)) {
      transitive.pass = false;
      transitive.witness = {{x, y, z}};
    }
    if (m3.pass && is_part(lat, x, z) && is_part(lat, y, z) &&
        !is_part(lat, fusion(lat, x, y), z)) {
      m3.pass = false;
      m3.witness = {{x, y, z}};
    }
  };
  if (triples_exhaustive) {
    for (BranchMask x = 1; x <= full; ++x) {
      for (BranchMask y = 1; y <= full; ++y) {
        for (BranchMask z = 1; z <= full; ++z) check_triple(x, y, z);
      }
    }
  } else {
    for (std::size_t n = 0; n < opts.sample_count; ++n) {
      check_triple(pick(rng), pick(rng), pick(rng));
    }
  }

  report.axioms = {reflexive, transitive, antisym, m1, m2, m3};
  report.oracle_agreement = oracle;
  report.pass = oracle.pass;
  for (const auto& a : report.axioms) report.pass = report.pass && a.pass;
  return report;
}

}  // namespace decohist
