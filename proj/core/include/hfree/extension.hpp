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
#include <string>
#include <vector>

#include "hfree/graph.hpp"
#include "hfree/process.hpp"
#include "hfree/rational.hpp"
#include "hfree/structure.hpp"
#include "hfree/trajectory.hpp"

namespace hfree {

// A triple (Gamma, J, A): J is the spanning subgraph of Gamma on the listed
// edge indices, A is an independent anchor set of Gamma.
class ExtensionPattern {
 public:
  ExtensionPattern(std::string name, GraphSpec gamma,
                   std::vector<std::size_t> j_edges,
                   std::vector<Vertex> anchor);

  const std::string& name() const { return name_; }
  const GraphSpec& gamma() const { return gamma_; }
  const GraphSpec& j() const { return j_; }
  std::span<const std::size_t> j_edges() const { return j_edges_; }
  // Edges of Gamma outside J; these must map to open pairs.
  std::span<const Edge> open_edges() const { return open_edges_; }
  std::span<const Vertex> anchor() const { return anchor_; }
  std::uint64_t anchor_mask() const { return mask_of(anchor_); }
  std::size_t e_gamma() const { return gamma_.edge_count(); }
  std::size_t e_j() const { return j_.edge_count(); }

  RootedPattern rooted() const { return RootedPattern(gamma_, anchor_); }

  // Throws GraphError unless v_Gamma < V and e_Gamma < V.
  void check_size(double V) const;

 private:
  std::string name_;
  GraphSpec gamma_;
  GraphSpec j_;
  std::vector<std::size_t> j_edges_;
  std::vector<Edge> open_edges_;
  std::vector<Vertex> anchor_;
};

// Injection phi: A -> [n], listed in the order of pattern.anchor().
struct Anchor {
  std::vector<Vertex> images;
};

class AnchorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void check_anchor(const ExtensionPattern& pattern, const Anchor& anchor,
                  Vertex n);

// State-independent part of the trackability test.
struct TrackabilityProfile {
  bool condition_a = false;     // strictly dense and H not in Gamma
  bool condition_b_base = false;  // S_{A,Gamma} = 1, strictly balanced, E_J != E_Gamma
  ScalingExponent s_a_gamma;
  ScalingExponent s_a_j;  // log_n S_{A,J}, the reporting scale
};

TrackabilityProfile trackability_profile(const ForbiddenGraph& h,
                                         const ExtensionPattern& pattern);

struct Trackability {
  bool trackable = false;
  char condition = 0;  // 'a', 'b' or 0
  std::string reason;  // why neither condition holds
};

Trackability check_trackable(const ForbiddenGraph& h,
                             const ExtensionPattern& pattern,
                             const TrackabilityProfile& profile,
                             const Anchor& anchor, const ProcessState& state);
bool is_trackable(const ForbiddenGraph& h, const ExtensionPattern& pattern,
                  const Anchor& anchor, const ProcessState& state);

// X_{phi,J,Gamma}(i).
std::uint64_t count_extensions(const ProcessState& state,
                               const ExtensionPattern& pattern,
                               const Anchor& anchor);

// N_{phi,J}: embeddings of j into G(i) with anchorset[k] -> images[k].
std::uint64_t count_embeddings(const ProcessState& state, const GraphSpec& j,
                               std::span<const Vertex> anchorset,
                               const Anchor& anchor);

struct ClosureQuadruple {
  Vertex a = 0, b = 0, c = 0, d = 0;
  GraphSpec gamma;  // H \ ab
  GraphSpec j;      // H \ {ab, cd}
};

// Every (a, b, c, d) with ab and cd distinct edges of H, both orientations
// of each.
std::vector<ClosureQuadruple> closure_quadruples(const ForbiddenGraph& h);

struct ClosureCheck {
  std::uint64_t direct = 0;  // 2 |closing_set(uv) cap O(i)|
  Rational formula;          // aut(H)^{-1} sum_T X_{phi_T,J_T,Gamma_T}(i)
};

ClosureCheck closure_identity_check(const ProcessState& state, Edge uv);

struct DeltaDecomposition {
  std::uint64_t y_plus = 0;
  std::uint64_t y_minus = 0;
};

// Materialises the extension sets at i and i + 1. Throws
// std::invalid_argument unless `after` is `before` plus one step.
DeltaDecomposition delta_decomposition(const ProcessState& before,
                                       const ProcessState& after,
                                       const ExtensionPattern& pattern,
                                       const Anchor& anchor);

// |closing_set(uv) cap closing_set(u'v')|.
std::uint64_t closed_overlap(const ProcessState& state, Edge uv, Edge other);

namespace patterns {
// Gamma = edge, J empty, A empty: X = 2|O(i)|.
ExtensionPattern open_pairs();
// Gamma = J = edge ab, A = {a}: X = degree.
ExtensionPattern degree();
// Star with d anchored leaves, J = Gamma: common neighbours of d vertices.
ExtensionPattern common_neighbours(Vertex d);
// (H \ ab, H \ {ab, cd}, {a, b}).
ExtensionPattern closure(const ClosureQuadruple& quad, std::string name);
}  // namespace patterns

// Q-pattern, degree, common neighbours for 2 <= d with p^d n > 1, and one
// closure pattern per orbit of ({a, b}, {c, d}) under Aut(H).
std::vector<ExtensionPattern> default_catalogue(const ForbiddenGraph& h);

// 1 + max(v_Gamma, e_Gamma) over the catalogue.
double default_v(const std::vector<ExtensionPattern>& catalogue);

// `count` random anchors per pattern (one for anchorless patterns).
std::vector<std::vector<Anchor>> draw_anchor_panel(
    const std::vector<ExtensionPattern>& catalogue, Vertex n, Rng& rng,
    std::size_t count = 32);

struct TrackSample {
  std::uint64_t i = 0;
  double t = 0;
  std::size_t pattern = 0;
  std::size_t anchor = 0;
  std::uint64_t observed = 0;
  double predicted = 0;
  double env_lo = 0;
  double env_hi = 0;
  bool trackable = false;
};

// Counts every (pattern, anchor) of the panel against the current state.
std::vector<TrackSample> sample_checkpoint(
    const ProcessState& state, const TrajectoryParams& params,
    const std::vector<ExtensionPattern>& catalogue,
    const std::vector<TrackabilityProfile>& profiles,
    const std::vector<std::vector<Anchor>>& panel);

}  // namespace hfree
