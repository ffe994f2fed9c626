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
#include <memory>
#include <span>
#include <vector>

#include "hfree/graph.hpp"
#include "hfree/rational.hpp"

namespace hfree {

// Brute-force caps. All graphs H of interest (K_s for s <= 7, C_l for
// l <= 8, K_{r,r} for r <= 4) fit.
inline constexpr Vertex kAutomorphismCap = 10;
inline constexpr Vertex kSubsetScanCap = 12;

using Permutation = std::vector<Vertex>;

// All edge-preserving bijections of g, found by backtracking.
std::vector<Permutation> automorphisms(const GraphSpec& g);
std::uint64_t automorphism_count(const GraphSpec& g);

// rho = (v_h - 2) / (e_h - 1), so that p = n^{-rho}.
ScalingExponent p_exponent(const GraphSpec& h);

// v_g, e_g >= 3 and (e_g - 1)/(v_g - 2) strictly exceeds (e_K - 1)/(v_K - 2)
// for every proper subgraph K on at least 3 vertices. Only induced subgraphs
// on proper vertex subsets need checking: they maximise e_K for fixed V_K,
// and spanning proper subgraphs lose edges.
bool is_strictly_two_balanced(const GraphSpec& g);

// The fixed forbidden graph H, validated strictly 2-balanced.
class ForbiddenGraph {
 public:
  static ForbiddenGraph create(GraphSpec graph);

  const GraphSpec& graph() const { return *graph_; }
  Vertex v() const { return graph_->vertex_count(); }
  std::size_t e() const { return graph_->edge_count(); }
  std::uint64_t aut_count() const { return automorphisms_->size(); }
  const std::vector<Permutation>& automorphisms() const { return *automorphisms_; }
  const ScalingExponent& rho() const { return rho_; }

  // p = n^{-rho} as a double.
  double p(double n) const;

 private:
  ForbiddenGraph() = default;

  std::shared_ptr<const GraphSpec> graph_;
  std::shared_ptr<const std::vector<Permutation>> automorphisms_;
  ScalingExponent rho_;
};

// log_n S_g = v_g - e_g * rho.
ScalingExponent scaling_exponent(const ForbiddenGraph& h, const GraphSpec& g);

// A graph with a distinguished vertex subset A (the anchor). Independence of
// A is not part of this type: several scaling statements use anchors that
// span edges, with e_{Gamma[A]} subtracted.
class RootedPattern {
 public:
  RootedPattern(GraphSpec gamma, std::vector<Vertex> anchor);

  const GraphSpec& gamma() const { return gamma_; }
  std::span<const Vertex> anchor() const { return anchor_; }
  std::uint64_t anchor_mask() const { return anchor_mask_; }
  bool anchor_independent() const;

 private:
  GraphSpec gamma_;
  std::vector<Vertex> anchor_;
  std::uint64_t anchor_mask_ = 0;
};

// log_n S_{A,Gamma} = (v_Gamma - |A|) - (e_Gamma - e_{Gamma[A]}) * rho.
ScalingExponent pair_scaling_exponent(const ForbiddenGraph& h,
                                      const RootedPattern& pattern);

// log_n S_{A, Gamma[B]} for vertex masks A subset of B (gamma must have at
// most 64 vertices).
ScalingExponent pair_scaling_exponent(const ForbiddenGraph& h,
                                      const GraphSpec& gamma,
                                      std::uint64_t a_mask,
                                      std::uint64_t b_mask);

struct PairClass {
  bool strictly_balanced = false;
  bool dense = false;
  bool strictly_dense = false;
};

PairClass classify_pair(const ForbiddenGraph& h, const RootedPattern& pattern);

struct ExtensionSeries {
  // sets[0] = A, sets.back() = V_Gamma; each sorted.
  std::vector<std::vector<Vertex>> sets;
  // step_exponents[i] = log_n S_{B_i, Gamma[B_{i+1}]}.
  std::vector<ScalingExponent> step_exponents;

  std::size_t length() const { return step_exponents.size(); }
  ScalingExponent total() const;
};

// Ties among inclusion-minimal minimisers go to the lexicographically
// smallest sorted vertex list.
ExtensionSeries extension_series(const ForbiddenGraph& h,
                                 const RootedPattern& pattern);

// Non-induced subgraph containment: an injective map V_h -> V_g carrying
// E_h into E_g.
bool contains_subgraph(const GraphSpec& g, const GraphSpec& h);

// Reusable matcher over one host graph. Builds bitset adjacency once so many
// queries (e.g. one per candidate pair) stay cheap.
class SubgraphMatcher {
 public:
  explicit SubgraphMatcher(const GraphSpec& host);

  bool contains(const GraphSpec& h) const;

  // Whether host + {x, y} has a copy of h that uses the pair xy.
  bool contains_through(const GraphSpec& h, Vertex x, Vertex y) const;

 private:
  struct Search;

  Vertex n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<std::vector<Vertex>> adj_;
};

}  // namespace hfree
