// Copyright 2026 The hfree Authors
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

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "hfree/graph.hpp"
#include "hfree/process.hpp"
#include "hfree/structure.hpp"
#include "hfree/trajectory.hpp"

namespace hfree {

struct DegreeStats {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0;
  double median = 0;
  std::vector<std::uint64_t> histogram;  // histogram[d] = #vertices of degree d
  double predicted_mean = 0;             // 2i/n
};

DegreeStats degree_stats(const ProcessState& state);

// p^d n > 1, i.e. 1 - d rho > 0.
bool common_neighbour_regime(const ForbiddenGraph& h, std::size_t d);
// (2i/n^2)^d n
double predicted_common_neighbours(const ProcessState& state, std::size_t d);

// |intersection of N(v) over v in vertices| by bitset AND.
std::uint64_t common_neighbors(const ProcessState& state,
                               std::span<const Vertex> vertices);

enum class Regime { Subcritical, Supercritical, Critical, ContainsH };
std::string_view to_string(Regime regime);

Regime classify_regime(const ForbiddenGraph& h, const GraphSpec& gamma);

class CostLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CensusReport {
  GraphSpec gamma;
  std::uint64_t observed = 0;  // labelled copies
  double predicted = 0;        // (2i/n^2)^{e_Gamma} n^{v_Gamma}
  Regime regime = Regime::Supercritical;
  std::uint64_t aut_gamma = 1;
  double unlabelled() const {
    return static_cast<double>(observed) / static_cast<double>(aut_gamma);
  }
};

// Largest v_Gamma the census will enumerate at this n: unrestricted (12)
// for n <= 100, 5 for n >= 10^4, 7 in between.
Vertex census_vertex_cap(Vertex n);

CensusReport subgraph_census(const ProcessState& state, const GraphSpec& gamma);

// Labelled (injective, non-induced) copies of gamma in the edge graph.
std::uint64_t count_labelled_copies(const ProcessState& state,
                                    const GraphSpec& gamma);

struct IndependenceResult {
  std::size_t value = 0;
  bool exact = false;  // false: greedy lower bound
};

inline constexpr Vertex kExactIndependenceCap = 200;

// Exact mode: branch and bound with greedy colouring bounds, n <= cap.
IndependenceResult independence_number(const GraphSpec& g, bool exact,
                                       Vertex cap = kExactIndependenceCap);
IndependenceResult independence_number(const ProcessState& state, bool exact,
                                       Vertex cap = kExactIndependenceCap);

// Ordered count: 2 x open unordered pairs inside I.
std::uint64_t open_pairs_within(const ProcessState& state,
                                std::span<const Vertex> I);

struct SmoothProbe {
  std::uint64_t bad_edge_count = 0;
  std::uint64_t max_closed_in_i = 0;  // ordered pairs
};

// n^{-5 epsilon} p^{-1}
double default_smooth_threshold(const TrajectoryParams& params);

// Scans the state's closure log: a step is bad if it closed more than
// `threshold` ordered pairs inside I. Throws std::invalid_argument if the
// run did not log closures.
SmoothProbe smooth_independence_probe(const ProcessState& state,
                                      std::span<const Vertex> I,
                                      double threshold);

// Edges with one endpoint in A and the other in B.
std::uint64_t edges_between(const ProcessState& state,
                            std::span<const Vertex> A,
                            std::span<const Vertex> B);
// max{4 eps^{-1}(|A| + |B|), p |A| |B| n^{2 eps}}
double edges_between_threshold(const TrajectoryParams& params, std::size_t a,
                               std::size_t b);

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  std::vector<std::pair<double, double>> points;  // (log n, log value)
};

// Least squares of log value against log n. With a correction exponent k the
// values are first divided by (log n)^k.
FitResult exponent_fit(std::span<const std::pair<double, double>> points,
                       double log_correction = 0.0);

}  // namespace hfree
