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

#include <gtest/gtest.h>

#include "hfree/structure.hpp"

namespace hfree {
namespace {

ForbiddenGraph H(const GraphSpec& g) { return ForbiddenGraph::create(g); }

// K_4 on {0,1,2,3} plus isolated vertex 4.
GraphSpec k4_plus_isolated() {
  const GraphSpec k4 = presets::complete(4);
  return GraphSpec(5, {k4.edges().begin(), k4.edges().end()});
}

GraphSpec without_edge(const GraphSpec& g, Edge e) {
  const Edge removed[] = {e};
  return g.without_edges(removed);
}

TEST(ScalingExponent, Examples) {
  EXPECT_EQ(scaling_exponent(H(presets::complete(3)), presets::complete(3)), Rational(3, 2));
  EXPECT_EQ(scaling_exponent(H(presets::cycle(5)), k4_plus_isolated()), Rational(1, 2));
  EXPECT_EQ(scaling_exponent(H(presets::complete(3)), presets::empty(1)), Rational(1));
}

TEST(PairScaling, Examples) {
  for (const GraphSpec& g : {presets::complete(3), presets::complete(5), presets::cycle(6),
                             presets::complete_bipartite(3, 3)}) {
    const Edge e = g.edges().front();
    EXPECT_EQ(pair_scaling_exponent(H(g), RootedPattern(g, {e.u, e.v})), Rational(0));
  }
  EXPECT_EQ(pair_scaling_exponent(H(presets::cycle(5)), RootedPattern(k4_plus_isolated(), {0, 1})),
            Rational(-3, 4));
  EXPECT_EQ(pair_scaling_exponent(H(presets::complete(7)), RootedPattern(presets::complete(3), {0, 1})),
            Rational(1, 2));
}

TEST(PairScaling, MaskOverloadAgrees) {
  const ForbiddenGraph h = H(presets::cycle(5));
  const GraphSpec g = k4_plus_isolated();
  EXPECT_EQ(pair_scaling_exponent(h, g, 0b00011, 0b11111),
            pair_scaling_exponent(h, RootedPattern(g, {0, 1})));
  // Gamma[B] = K_3 on {0,1,2} rooted at {0,1}: n p^2 with p = n^{-3/4}.
  EXPECT_EQ(pair_scaling_exponent(h, g, 0b00011, 0b00111), Rational(-1, 2));
}

TEST(RootedPattern, Validation) {
  EXPECT_THROW(RootedPattern(presets::complete(3), {0, 3}), GraphError);
  EXPECT_THROW(RootedPattern(presets::complete(3), {1, 1}), GraphError);
  EXPECT_FALSE(RootedPattern(presets::complete(3), {0, 1}).anchor_independent());
  EXPECT_TRUE(RootedPattern(presets::cycle(4), {0, 2}).anchor_independent());
}

TEST(ClassifyPair, KsMinusEdge) {
  // H^- = K_s minus uv rooted at another edge xy.
  const GraphSpec k6 = presets::complete(6);
  const PairClass six = classify_pair(H(k6), RootedPattern(without_edge(k6, {0, 1}), {2, 3}));
  EXPECT_TRUE(six.strictly_balanced);
  const GraphSpec k5 = presets::complete(5);
  const PairClass five = classify_pair(H(k5), RootedPattern(without_edge(k5, {0, 1}), {2, 3}));
  EXPECT_FALSE(five.strictly_balanced);
}

TEST(ClassifyPair, SparseSubgraphsOfHAreStrictlyDense) {
  // J subset of H with e_J <= e_H - 2, rooted at an edge uv of H missing from J.
  for (const GraphSpec& g : {presets::complete(3), presets::complete(4), presets::cycle(4),
                             presets::cycle(5), presets::complete_bipartite(2, 3)}) {
    if (!is_strictly_two_balanced(g)) continue;
    const ForbiddenGraph h = H(g);
    const auto edges = g.edges();
    for (std::size_t uv = 0; uv < edges.size(); ++uv) {
      for (std::size_t other = 0; other < edges.size(); ++other) {
        if (other == uv) continue;
        const Edge removed[] = {edges[uv], edges[other]};
        const GraphSpec j = g.without_edges(removed);
        const PairClass cls = classify_pair(h, RootedPattern(j, {edges[uv].u, edges[uv].v}));
        EXPECT_TRUE(cls.strictly_dense) << g.to_text();
        EXPECT_TRUE(cls.dense);
      }
    }
  }
}

TEST(ExtensionSeries, K7OverK4) {
  const ExtensionSeries s = extension_series(H(presets::complete(7)),
                                             RootedPattern(presets::complete(4), {0, 1}));
  ASSERT_EQ(s.length(), 2U);
  EXPECT_EQ(s.step_exponents[0], Rational(1, 2));
  EXPECT_EQ(s.step_exponents[1], Rational(1, 4));
  EXPECT_EQ(s.sets[0], (std::vector<Vertex>{0, 1}));
  EXPECT_EQ(s.sets[1], (std::vector<Vertex>{0, 1, 2}));  // lexicographic tie-break
  EXPECT_EQ(s.sets[2], (std::vector<Vertex>{0, 1, 2, 3}));
  EXPECT_EQ(s.total(), Rational(3, 4));
}

TEST(ExtensionSeries, C5OverK4PlusIsolated) {
  const ForbiddenGraph h = H(presets::cycle(5));
  const RootedPattern pattern(k4_plus_isolated(), {0, 1});
  const ExtensionSeries s = extension_series(h, pattern);
  ASSERT_EQ(s.length(), 2U);
  EXPECT_EQ(s.step_exponents[0], Rational(-7, 4));
  EXPECT_EQ(s.step_exponents[1], Rational(1));
  EXPECT_EQ(s.total(), pair_scaling_exponent(h, pattern));
  EXPECT_EQ(s.total(), Rational(-3, 4));
}

TEST(ExtensionSeries, FullAnchorIsTrivial) {
  const ExtensionSeries s = extension_series(H(presets::complete(3)),
                                             RootedPattern(presets::complete(3), {0, 1, 2}));
  EXPECT_EQ(s.length(), 0U);
  EXPECT_EQ(s.total(), Rational(0));
}

// The series telescopes to S_{A,Gamma} and every step exponent is the
// minimum over the remaining supersets.
TEST(ExtensionSeries, TelescopesAndIsGreedyMinimal) {
  const ForbiddenGraph h = H(presets::complete(4));
  for (const GraphSpec& gamma : {presets::cycle(5), presets::complete_bipartite(2, 3),
                                 presets::path(5), presets::complete(4)}) {
    const RootedPattern pattern(gamma, {0});
    const ExtensionSeries s = extension_series(h, pattern);
    EXPECT_EQ(s.total(), pair_scaling_exponent(h, pattern));
    for (std::size_t k = 0; k < s.length(); ++k) {
      const std::uint64_t base = mask_of(s.sets[k]);
      const std::uint64_t full = gamma.all_mask();
      for (std::uint64_t b = full; b != 0; b = (b - 1) & full) {
        if ((b & base) != base || b == base) continue;
        EXPECT_GE(pair_scaling_exponent(h, gamma, base, b), s.step_exponents[k]);
      }
    }
  }
}

}  // namespace
}  // namespace hfree
