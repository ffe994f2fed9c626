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

#include "hfree/extension.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace hfree {

ExtensionPattern::ExtensionPattern(std::string name, GraphSpec gamma,
                                   std::vector<std::size_t> j_edges,
                                   std::vector<Vertex> anchor)
    : name_(std::move(name)),
      gamma_(std::move(gamma)),
      j_edges_(std::move(j_edges)),
      anchor_(std::move(anchor)) {
  if (gamma_.vertex_count() > GraphSpec::kMaskLimit) {
    throw SizeLimitError("pattern " + name_ + " has more than 64 vertices");
  }
  std::sort(j_edges_.begin(), j_edges_.end());
  if (std::adjacent_find(j_edges_.begin(), j_edges_.end()) != j_edges_.end()) {
    throw GraphError("pattern " + name_ + ": J lists an edge twice");
  }
  std::vector<Edge> j_list;
  std::vector<char> in_j(gamma_.edge_count(), 0);
  for (std::size_t k : j_edges_) {
    if (k >= gamma_.edge_count()) {
      throw GraphError("pattern " + name_ + ": J edge index " +
                       std::to_string(k) + " out of range");
    }
    j_list.push_back(gamma_.edges()[k]);
    in_j[k] = 1;
  }
  for (std::size_t k = 0; k < gamma_.edge_count(); ++k) {
    if (!in_j[k]) open_edges_.push_back(gamma_.edges()[k]);
  }
  j_ = GraphSpec(gamma_.vertex_count(), std::move(j_list));

  std::sort(anchor_.begin(), anchor_.end());
  if (std::adjacent_find(anchor_.begin(), anchor_.end()) != anchor_.end()) {
    throw GraphError("pattern " + name_ + ": anchor lists a vertex twice");
  }
  for (Vertex a : anchor_) {
    if (a >= gamma_.vertex_count()) {
      throw GraphError("pattern " + name_ + ": anchor vertex " +
                       std::to_string(a) + " out of range");
    }
  }
  if (!gamma_.is_independent(mask_of(anchor_))) {
    throw GraphError("pattern " + name_ + ": anchor is not independent");
  }
}

void ExtensionPattern::check_size(double V) const {
  if (!(gamma_.vertex_count() < V) || !(static_cast<double>(e_gamma()) < V)) {
    throw GraphError("pattern " + name_ + " needs v_Gamma, e_Gamma < V = " +
                     std::to_string(V));
  }
}

void check_anchor(const ExtensionPattern& pattern, const Anchor& anchor,
                  Vertex n) {
  if (anchor.images.size() != pattern.anchor().size()) {
    throw AnchorError("anchor for " + pattern.name() + " has " +
                      std::to_string(anchor.images.size()) +
                      " images, pattern anchors " +
                      std::to_string(pattern.anchor().size()) + " vertices");
  }
  for (std::size_t k = 0; k < anchor.images.size(); ++k) {
    if (anchor.images[k] >= n) {
      throw AnchorError("anchor image " + std::to_string(anchor.images[k]) +
                        " is not a vertex");
    }
    for (std::size_t l = 0; l < k; ++l) {
      if (anchor.images[l] == anchor.images[k]) {
        throw AnchorError("anchor is not injective");
      }
    }
  }
}

TrackabilityProfile trackability_profile(const ForbiddenGraph& h,
                                         const ExtensionPattern& pattern) {
  const RootedPattern rooted = pattern.rooted();
  const PairClass cls = classify_pair(h, rooted);
  const bool has_h = contains_subgraph(pattern.gamma(), h.graph());
  TrackabilityProfile out;
  out.s_a_gamma = pair_scaling_exponent(h, rooted);
  out.s_a_j = pair_scaling_exponent(h, pattern.j(), pattern.anchor_mask(),
                                    pattern.j().all_mask());
  out.condition_a = cls.strictly_dense && !has_h;
  out.condition_b_base = out.s_a_gamma.sign() == 0 && cls.strictly_balanced &&
                         pattern.e_j() < pattern.e_gamma();
  return out;
}

Trackability check_trackable(const ForbiddenGraph& h,
                             const ExtensionPattern& pattern,
                             const TrackabilityProfile& profile,
                             const Anchor& anchor, const ProcessState& state) {
  check_anchor(pattern, anchor, state.n());
  Trackability out;
  if (profile.condition_a) {
    out.trackable = true;
    out.condition = 'a';
    return out;
  }
  if (profile.condition_b_base) {
    GraphSpec closed = pattern.gamma();
    const auto anchors = pattern.anchor();
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      for (std::size_t l = k + 1; l < anchors.size(); ++l) {
        if (state.has_edge(anchor.images[k], anchor.images[l])) {
          closed = closed.with_edge(make_edge(anchors[k], anchors[l]));
        }
      }
    }
    if (!contains_subgraph(closed, h.graph())) {
      out.trackable = true;
      out.condition = 'b';
      return out;
    }
    out.reason =
        "(a) fails and (b) fails: H is a subgraph of Gamma plus the anchor "
        "pairs mapped onto edges";
    return out;
  }
  out.reason = "(a) fails: ";
  out.reason += contains_subgraph(pattern.gamma(), h.graph())
                    ? "Gamma contains H"
                    : "(A, Gamma) is not strictly dense";
  out.reason += "; (b) fails: ";
  if (profile.s_a_gamma.sign() != 0) {
    out.reason += "S_{A,Gamma} = n^" + profile.s_a_gamma.to_string() + " != 1";
  } else if (pattern.e_j() == pattern.e_gamma()) {
    out.reason += "E_J = E_Gamma";
  } else {
    out.reason += "(A, Gamma) is not strictly balanced";
  }
  return out;
}

bool is_trackable(const ForbiddenGraph& h, const ExtensionPattern& pattern,
                  const Anchor& anchor, const ProcessState& state) {
  return check_trackable(h, pattern, trackability_profile(h, pattern), anchor,
                         state)
      .trackable;
}

namespace {

EmbeddingPlan plan_for(const ExtensionPattern& pattern) {
  return EmbeddingPlan::build(pattern.gamma().vertex_count(),
                              pattern.j().edges(), pattern.open_edges(),
                              pattern.anchor());
}

std::vector<Vertex> seeded_image(const EmbeddingPlan& plan,
                                 const Anchor& anchor) {
  std::vector<Vertex> image(plan.order.size());
  std::copy(anchor.images.begin(), anchor.images.end(), image.begin());
  return image;
}

bool is_open_pairs_pattern(const ExtensionPattern& pattern) {
  return pattern.gamma().vertex_count() == 2 && pattern.e_gamma() == 1 &&
         pattern.e_j() == 0 && pattern.anchor().empty();
}

}  // namespace

std::uint64_t count_extensions(const ProcessState& state,
                               const ExtensionPattern& pattern,
                               const Anchor& anchor) {
  check_anchor(pattern, anchor, state.n());
  if (is_open_pairs_pattern(pattern)) return 2 * state.open_count();
  const EmbeddingPlan plan = plan_for(pattern);
  std::vector<Vertex> image = seeded_image(plan, anchor);
  std::uint64_t count = 0;
  for_each_embedding(state, plan, image,
                     [&](const std::vector<Vertex>&) { ++count; });
  return count;
}

std::uint64_t count_embeddings(const ProcessState& state, const GraphSpec& j,
                               std::span<const Vertex> anchorset,
                               const Anchor& anchor) {
  if (anchorset.size() != anchor.images.size()) {
    throw AnchorError("anchor set and anchor images differ in size");
  }
  for (Vertex a : anchorset) {
    if (a >= j.vertex_count()) throw AnchorError("anchor vertex out of range");
  }
  std::vector<Vertex> sorted(anchorset.begin(), anchorset.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw AnchorError("anchor set lists a vertex twice");
  }
  if (j.vertex_count() <= GraphSpec::kMaskLimit &&
      !j.is_independent(mask_of(sorted))) {
    throw AnchorError("anchor set is not independent in J");
  }
  for (std::size_t k = 0; k < anchor.images.size(); ++k) {
    if (anchor.images[k] >= state.n()) {
      throw AnchorError("anchor image out of range");
    }
  }
  const EmbeddingPlan plan =
      EmbeddingPlan::build(j.vertex_count(), j.edges(), {}, anchorset);
  std::vector<Vertex> image = seeded_image(plan, anchor);
  std::uint64_t count = 0;
  for_each_embedding(state, plan, image,
                     [&](const std::vector<Vertex>&) { ++count; });
  return count;
}

std::vector<ClosureQuadruple> closure_quadruples(const ForbiddenGraph& h) {
  std::vector<ClosureQuadruple> out;
  const auto edges = h.graph().edges();
  for (const Edge& ab : edges) {
    for (int f1 = 0; f1 < 2; ++f1) {
      for (const Edge& cd : edges) {
        if (cd == ab) continue;
        for (int f2 = 0; f2 < 2; ++f2) {
          ClosureQuadruple quad;
          quad.a = f1 ? ab.v : ab.u;
          quad.b = f1 ? ab.u : ab.v;
          quad.c = f2 ? cd.v : cd.u;
          quad.d = f2 ? cd.u : cd.v;
          const Edge one[] = {ab};
          const Edge two[] = {ab, cd};
          quad.gamma = h.graph().without_edges(one);
          quad.j = h.graph().without_edges(two);
          out.push_back(std::move(quad));
        }
      }
    }
  }
  return out;
}

ClosureCheck closure_identity_check(const ProcessState& state, Edge uv) {
  uv = make_edge(uv.u, uv.v);
  if (uv.u == uv.v || uv.v >= state.n()) {
    throw std::invalid_argument("closure_identity_check: not a vertex pair");
  }
  if (state.has_edge(uv.u, uv.v)) {
    throw std::invalid_argument("closure_identity_check: pair is an edge");
  }
  ClosureCheck out;
  for (const Edge& xy : closing_set(state, uv)) {
    if (state.is_open(xy.u, xy.v)) out.direct += 2;
  }
  const ForbiddenGraph& h = state.forbidden();
  std::uint64_t total = 0;
  for (const ClosureQuadruple& quad : closure_quadruples(h)) {
    const Vertex anchors[] = {quad.a, quad.b};
    const Edge open[] = {make_edge(quad.c, quad.d)};
    const EmbeddingPlan plan =
        EmbeddingPlan::build(h.v(), quad.j.edges(), open, anchors);
    std::vector<Vertex> image(h.v());
    image[0] = uv.u;
    image[1] = uv.v;
    for_each_embedding(state, plan, image,
                       [&](const std::vector<Vertex>&) { ++total; });
  }
  out.formula = Rational(static_cast<std::int64_t>(total),
                         static_cast<std::int64_t>(h.aut_count()));
  return out;
}

namespace {

std::vector<std::vector<Vertex>> materialise(const ProcessState& state,
                                             const EmbeddingPlan& plan,
                                             const Anchor& anchor) {
  std::vector<std::vector<Vertex>> out;
  std::vector<Vertex> image = seeded_image(plan, anchor);
  for_each_embedding(state, plan, image,
                     [&](const std::vector<Vertex>& img) { out.push_back(img); });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

DeltaDecomposition delta_decomposition(const ProcessState& before,
                                       const ProcessState& after,
                                       const ExtensionPattern& pattern,
                                       const Anchor& anchor) {
  const bool adjacent =
      before.n() == after.n() &&
      before.forbidden().graph() == after.forbidden().graph() &&
      after.steps() == before.steps() + 1 &&
      std::equal(before.edges().begin(), before.edges().end(),
                 after.edges().begin());
  if (!adjacent) {
    throw std::invalid_argument(
        "delta_decomposition: states are not one step apart");
  }
  check_anchor(pattern, anchor, before.n());
  const EmbeddingPlan plan = plan_for(pattern);
  const auto old_set = materialise(before, plan, anchor);
  const auto new_set = materialise(after, plan, anchor);
  DeltaDecomposition out;
  std::vector<std::vector<Vertex>> diff;
  std::set_difference(new_set.begin(), new_set.end(), old_set.begin(),
                      old_set.end(), std::back_inserter(diff));
  out.y_plus = diff.size();
  diff.clear();
  std::set_difference(old_set.begin(), old_set.end(), new_set.begin(),
                      new_set.end(), std::back_inserter(diff));
  out.y_minus = diff.size();
  return out;
}

std::uint64_t closed_overlap(const ProcessState& state, Edge uv, Edge other) {
  uv = make_edge(uv.u, uv.v);
  other = make_edge(other.u, other.v);
  if (uv == other) {
    throw std::invalid_argument("closed_overlap: pairs must be distinct");
  }
  const auto first = closing_set(state, uv);
  const auto second = closing_set(state, other);
  std::vector<Edge> both;
  std::set_intersection(first.begin(), first.end(), second.begin(),
                        second.end(), std::back_inserter(both));
  return both.size();
}

namespace patterns {

ExtensionPattern open_pairs() {
  return ExtensionPattern("Q", GraphSpec(2, {{0, 1}}), {}, {});
}

ExtensionPattern degree() {
  return ExtensionPattern("degree", GraphSpec(2, {{0, 1}}), {0}, {0});
}

ExtensionPattern common_neighbours(Vertex d) {
  // Centre 0, anchored leaves 1..d.
  std::vector<Edge> edges;
  std::vector<std::size_t> all;
  std::vector<Vertex> leaves;
  for (Vertex x = 1; x <= d; ++x) {
    edges.push_back({0, x});
    all.push_back(x - 1);
    leaves.push_back(x);
  }
  return ExtensionPattern("common" + std::to_string(d), GraphSpec(d + 1, edges),
                          all, leaves);
}

ExtensionPattern closure(const ClosureQuadruple& quad, std::string name) {
  std::vector<std::size_t> j_edges;
  for (const Edge& e : quad.j.edges()) {
    j_edges.push_back(*quad.gamma.edge_index(e));
  }
  return ExtensionPattern(std::move(name), quad.gamma, std::move(j_edges),
                          {quad.a, quad.b});
}

}  // namespace patterns

std::vector<ExtensionPattern> default_catalogue(const ForbiddenGraph& h) {
  std::vector<ExtensionPattern> out;
  out.push_back(patterns::open_pairs());
  out.push_back(patterns::degree());
  for (Vertex d = 2;; ++d) {
    // p^d n > 1  <=>  1 - d rho > 0
    if ((Rational(1) - Rational(d) * h.rho()).sign() <= 0) break;
    out.push_back(patterns::common_neighbours(d));
  }
  // The pattern only sees {a, b} as a set, so orbits are taken over
  // (unordered ab, unordered cd).
  using Key = std::tuple<Vertex, Vertex, Vertex, Vertex>;
  std::map<Key, const ClosureQuadruple*> reps;
  const auto quads = closure_quadruples(h);
  for (const ClosureQuadruple& quad : quads) {
    Key best{~Vertex{0}, 0, 0, 0};
    for (const Permutation& sigma : h.automorphisms()) {
      const Edge ab = make_edge(sigma[quad.a], sigma[quad.b]);
      const Edge cd = make_edge(sigma[quad.c], sigma[quad.d]);
      best = std::min(best, Key{ab.u, ab.v, cd.u, cd.v});
    }
    reps.emplace(best, &quad);
  }
  for (const auto& [key, quad] : reps) {
    const auto [a, b, c, d] = key;
    ClosureQuadruple rep = *quad;
    rep.a = a;
    rep.b = b;
    rep.c = c;
    rep.d = d;
    const Edge one[] = {make_edge(a, b)};
    const Edge two[] = {make_edge(a, b), make_edge(c, d)};
    rep.gamma = h.graph().without_edges(one);
    rep.j = h.graph().without_edges(two);
    out.push_back(patterns::closure(
        rep,
        "closure_" + std::to_string(a) + std::to_string(b) + "_" +
            std::to_string(c) + std::to_string(d)));
  }
  return out;
}

double default_v(const std::vector<ExtensionPattern>& catalogue) {
  std::size_t biggest = 0;
  for (const auto& pattern : catalogue) {
    biggest = std::max<std::size_t>(
        {biggest, pattern.gamma().vertex_count(), pattern.e_gamma()});
  }
  return static_cast<double>(biggest + 1);
}

std::vector<std::vector<Anchor>> draw_anchor_panel(
    const std::vector<ExtensionPattern>& catalogue, Vertex n, Rng& rng,
    std::size_t count) {
  std::vector<std::vector<Anchor>> panel;
  for (const auto& pattern : catalogue) {
    const std::size_t k = pattern.anchor().size();
    if (k > n) throw AnchorError("pattern anchors more vertices than n");
    std::vector<Anchor> anchors;
    const std::size_t draws = k == 0 ? 1 : count;
    for (std::size_t r = 0; r < draws; ++r) {
      Anchor anchor;
      while (anchor.images.size() < k) {
        const auto x = static_cast<Vertex>(rng.below(n));
        if (std::find(anchor.images.begin(), anchor.images.end(), x) ==
            anchor.images.end()) {
          anchor.images.push_back(x);
        }
      }
      anchors.push_back(std::move(anchor));
    }
    panel.push_back(std::move(anchors));
  }
  return panel;
}

std::vector<TrackSample> sample_checkpoint(
    const ProcessState& state, const TrajectoryParams& params,
    const std::vector<ExtensionPattern>& catalogue,
    const std::vector<TrackabilityProfile>& profiles,
    const std::vector<std::vector<Anchor>>& panel) {
  std::vector<TrackSample> out;
  const double t = state.t();
  for (std::size_t p = 0; p < catalogue.size(); ++p) {
    const ExtensionPattern& pattern = catalogue[p];
    const double x = x_of_t(params, pattern.e_gamma(), pattern.e_j(), t);
    const Envelope env = envelope(params, t, profiles[p].s_a_j, x);
    const double predicted = x * params.scale(profiles[p].s_a_j);
    for (std::size_t k = 0; k < panel[p].size(); ++k) {
      TrackSample sample;
      sample.i = state.steps();
      sample.t = t;
      sample.pattern = p;
      sample.anchor = k;
      sample.observed = count_extensions(state, pattern, panel[p][k]);
      sample.predicted = predicted;
      sample.env_lo = env.lo;
      sample.env_hi = env.hi;
      sample.trackable = check_trackable(state.forbidden(), pattern,
                                         profiles[p], panel[p][k], state)
                             .trackable;
      out.push_back(sample);
    }
  }
  return out;
}

}  // namespace hfree
