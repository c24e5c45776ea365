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

#include <numbers>
#include <random>

#include "decohist/histories.hpp"
#include "decohist/random.hpp"

namespace decohist::testing {

/// Random well-formed space: dim <= 8, up to 3 sample times, up to 3 cells
/// per time, generic Hamiltonian and state.
inline HistorySpace<double> random_space(std::mt19937_64& rng, Index max_dim = 8,
                                         std::size_t max_times = 3,
                                         std::size_t max_cells = 3) {
  std::uniform_int_distribution<Index> dim_dist(2, max_dim);
  const Index dim = dim_dist(rng);
  std::uniform_int_distribution<std::size_t> times_dist(1, max_times);
  const std::size_t n_times = times_dist(rng);

  std::vector<double> times;
  std::uniform_real_distribution<double> gap(0.1, 1.2);
  double t = 0;
  for (std::size_t k = 0; k < n_times; ++k) {
    t += gap(rng);
    times.push_back(t);
  }

  std::vector<ProjectorPartition<double>> partitions;
  for (std::size_t k = 0; k < n_times; ++k) {
    std::uniform_int_distribution<std::size_t> cell_dist(
        1, std::min<std::size_t>(max_cells, static_cast<std::size_t>(dim)));
    partitions.push_back(random_partition<double>(dim, cell_dist(rng), rng));
  }
  return HistorySpace<double>::create(random_hermitian<double>(dim, rng),
                                      random_state<double>(dim, rng),
                                      std::move(times), std::move(partitions));
}

/// The two-slit toy: qubit, H = (pi/4) sigma_x, basis partitions at t = 1, 2.
/// Full interference: all four fine weights are 1/4 and erasing the t1 slit
/// record violates the sum rule by exactly 0.5.
inline HistorySpace<double> two_slit_space() {
  const double theta = std::numbers::pi / 4;
  Matrix<double> h(2, 2);
  h << Complex<double>(0, 0), Complex<double>(theta, 0),
      Complex<double>(theta, 0), Complex<double>(0, 0);
  Vector<double> omega(2);
  omega << Complex<double>(1, 0), Complex<double>(0, 0);
  auto slits = ProjectorPartition<double>::basis_partition(2, {{0}, {1}},
                                                           {"slitA", "slitB"});
  auto screen = ProjectorPartition<double>::basis_partition(2, {{0}, {1}},
                                                            {"det0", "det1"});
  return HistorySpace<double>::create(std::move(h), std::move(omega), {1.0, 2.0},
                                      {slits, screen});
}

/// Which-slit erasure: group both t1 cells, keep the screen cells.
inline CoarseGraining erase_first_time_grouping() {
  CoarseGraining g;
  g.map = {{0, 0}, {0, 1}};
  return g;
}

}  // namespace decohist::testing
