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

#include "hfree/structure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace hfree {

namespace {

void require_cap(const GraphSpec& g, Vertex cap, const char* what) {
  if (g.vertex_count() > cap) {
    throw SizeLimitError(std::string(what) + ": " +
                         std::to_string(g.vertex_count()) +
                         " vertices exceeds the brute-force cap of " +
                         std::to_string(cap));
  }
}

// Visits every subset S with base <= S <= base | free (as masks).
template <class Fn>
void for_each_superset(std::uint64_t base, std::uint64_t free, Fn&& fn) {
  std::uint64_t sub = free;
  while (true) {
    fn(base | sub);
    if (sub == 0) break;
    sub = (sub - 1) & free;
  }
}

}  // namespace

std::vector<Permutation> automorphisms(const GraphSpec& g) {
  require_cap(g, kAutomorphismCap, "automorphism_count");
  const Vertex n = g.vertex_count();
  std::vector<Permutation> out;
  Permutation image(n);
  std::vector<char> used(n, 0);
  auto extend = [&](auto&& self, Vertex x) -> void {
    if (x == n) {
      out.push_back(image);
      return;
    }
    for (Vertex y = 0; y < n; ++y) {
      if (used[y] || g.degree(y) != g.degree(x)) continue;
      bool ok = true;
      for (Vertex w = 0; w < x && ok; ++w) {
        ok = g.has_edge(x, w) == g.has_edge(y, image[w]);
      }
      if (!ok) continue;
      used[y] = 1;
      image[x] = y;
      self(self, x + 1);
      used[y] = 0;
    }
  };
  extend(extend, 0);
  return out;
}

std::uint64_t automorphism_count(const GraphSpec& g) {
  return automorphisms(g).size();
}

ScalingExponent p_exponent(const GraphSpec& h) {
  if (h.vertex_count() < 3) {
    throw GraphError("p_exponent: H needs at least 3 vertices");
  }
  if (h.edge_count() <= 1) {
    throw GraphError("p_exponent: H needs at least 2 edges");
  }
  return ScalingExponent(static_cast<std::int64_t>(h.vertex_count()) - 2,
                         static_cast<std::int64_t>(h.edge_count()) - 1);
}

bool is_strictly_two_balanced(const GraphSpec& g) {
  require_cap(g, kSubsetScanCap, "is_strictly_two_balanced");
  const auto v = static_cast<std::int64_t>(g.vertex_count());
  const auto e = static_cast<std::int64_t>(g.edge_count());
  if (v < 3 || e < 3) return false;
  const Rational density(e - 1, v - 2);
  const std::uint64_t all = g.all_mask();
  for (std::uint64_t b = 0; b < all; ++b) {
    const int size = std::popcount(b);
    if (size < 3) continue;
    const auto eb = static_cast<std::int64_t>(g.induced_edge_count(b));
    if (Rational(eb - 1, size - 2) >= density) return false;
  }
  return true;
}

ForbiddenGraph ForbiddenGraph::create(GraphSpec graph) {
  if (graph.vertex_count() > kAutomorphismCap) {
    throw SizeLimitError("H has " + std::to_string(graph.vertex_count()) +
                         " vertices; at most " +
                         std::to_string(kAutomorphismCap) + " are supported");
  }
  if (!is_strictly_two_balanced(graph)) {
    throw GraphError("H is not strictly 2-balanced");
  }
  // Consequences of strict 2-balancedness; a failure here is a bug.
  if (graph.min_degree() < 2 || !graph.is_two_connected()) {
    throw std::logic_error(
        "strictly 2-balanced H must have minimum degree >= 2 and be "
        "2-connected");
  }
  ForbiddenGraph h;
  h.rho_ = p_exponent(graph);
  h.automorphisms_ =
      std::make_shared<const std::vector<Permutation>>(hfree::automorphisms(graph));
  h.graph_ = std::make_shared<const GraphSpec>(std::move(graph));
  return h;
}

double ForbiddenGraph::p(double n) const {
  return std::pow(n, -rho_.to_double());
}

ScalingExponent scaling_exponent(const ForbiddenGraph& h, const GraphSpec& g) {
  return Rational(static_cast<std::int64_t>(g.vertex_count())) -
         Rational(static_cast<std::int64_t>(g.edge_count())) * h.rho();
}

RootedPattern::RootedPattern(GraphSpec gamma, std::vector<Vertex> anchor)
    : gamma_(std::move(gamma)), anchor_(std::move(anchor)) {
  if (gamma_.vertex_count() > GraphSpec::kMaskLimit) {
    throw SizeLimitError("rooted pattern larger than 64 vertices");
  }
  std::sort(anchor_.begin(), anchor_.end());
  if (std::adjacent_find(anchor_.begin(), anchor_.end()) != anchor_.end()) {
    throw GraphError("anchor lists a vertex twice");
  }
  for (Vertex a : anchor_) {
    if (a >= gamma_.vertex_count()) {
      throw GraphError("anchor vertex " + std::to_string(a) +
                       " is not a vertex of the pattern");
    }
  }
  anchor_mask_ = mask_of(anchor_);
}

bool RootedPattern::anchor_independent() const {
  return gamma_.is_independent(anchor_mask_);
}

ScalingExponent pair_scaling_exponent(const ForbiddenGraph& h,
                                      const GraphSpec& gamma,
                                      std::uint64_t a_mask,
                                      std::uint64_t b_mask) {
  const auto added = static_cast<std::int64_t>(std::popcount(b_mask)) -
                     std::popcount(a_mask);
  const auto edges = static_cast<std::int64_t>(gamma.induced_edge_count(b_mask)) -
                     static_cast<std::int64_t>(gamma.induced_edge_count(a_mask));
  return Rational(added) - Rational(edges) * h.rho();
}

ScalingExponent pair_scaling_exponent(const ForbiddenGraph& h,
                                      const RootedPattern& pattern) {
  return pair_scaling_exponent(h, pattern.gamma(), pattern.anchor_mask(),
                               pattern.gamma().all_mask());
}

namespace {

bool strictly_balanced_from(const ForbiddenGraph& h, const GraphSpec& gamma,
                            std::uint64_t a_mask) {
  const std::uint64_t all = gamma.all_mask();
  bool ok = true;
  for_each_superset(a_mask, all & ~a_mask, [&](std::uint64_t b) {
    if (!ok || b == a_mask || b == all) return;
    // S_{B,Gamma} < 1
    if (pair_scaling_exponent(h, gamma, b, all).sign() >= 0) ok = false;
  });
  return ok;
}

bool strictly_dense_from(const ForbiddenGraph& h, const GraphSpec& gamma,
                         std::uint64_t a_mask) {
  const std::uint64_t all = gamma.all_mask();
  bool ok = true;
  for_each_superset(a_mask, all & ~a_mask, [&](std::uint64_t b) {
    if (!ok || b == a_mask) return;
    if (pair_scaling_exponent(h, gamma, a_mask, b).sign() <= 0) ok = false;
  });
  return ok;
}

bool lex_less(std::uint64_t a, std::uint64_t b) {
  return vertices_of(a) < vertices_of(b);
}

}  // namespace

ScalingExponent ExtensionSeries::total() const {
  ScalingExponent sum;
  for (const auto& s : step_exponents) sum += s;
  return sum;
}

ExtensionSeries extension_series(const ForbiddenGraph& h,
                                 const RootedPattern& pattern) {
  const GraphSpec& gamma = pattern.gamma();
  require_cap(gamma, kSubsetScanCap, "extension_series");
  const std::uint64_t all = gamma.all_mask();
  ExtensionSeries series;
  std::uint64_t current = pattern.anchor_mask();
  series.sets.push_back(vertices_of(current));
  while (current != all) {
    std::uint64_t next = all;
    if (!strictly_balanced_from(h, gamma, current)) {
      std::optional<ScalingExponent> best;
      std::vector<std::uint64_t> minimisers;
      for_each_superset(current, all & ~current, [&](std::uint64_t c) {
        if (c == current || c == all) return;
        const auto s = pair_scaling_exponent(h, gamma, current, c);
        if (!best || s < *best) {
          best = s;
          minimisers.assign(1, c);
        } else if (s == *best) {
          minimisers.push_back(c);
        }
      });
      std::optional<std::uint64_t> chosen;
      for (std::uint64_t c : minimisers) {
        const bool minimal = std::none_of(
            minimisers.begin(), minimisers.end(), [&](std::uint64_t d) {
              return d != c && (d & c) == d;
            });
        if (minimal && (!chosen || lex_less(c, *chosen))) chosen = c;
      }
      next = *chosen;
    }
    series.step_exponents.push_back(
        pair_scaling_exponent(h, gamma, current, next));
    series.sets.push_back(vertices_of(next));
    current = next;
  }
  return series;
}

PairClass classify_pair(const ForbiddenGraph& h, const RootedPattern& pattern) {
  const GraphSpec& gamma = pattern.gamma();
  require_cap(gamma, kSubsetScanCap, "classify_pair");
  PairClass out;
  out.strictly_balanced = strictly_balanced_from(h, gamma, pattern.anchor_mask());
  out.strictly_dense = strictly_dense_from(h, gamma, pattern.anchor_mask());
  const ExtensionSeries series = extension_series(h, pattern);
  out.dense = series.length() == 0 || series.step_exponents.front().sign() >= 0;
  return out;
}

SubgraphMatcher::SubgraphMatcher(const GraphSpec& host)
    : n_(host.vertex_count()),
      words_((host.vertex_count() + 63) / 64),
      rows_(static_cast<std::size_t>(host.vertex_count()) * words_, 0),
      adj_(host.vertex_count()) {
  for (const Edge& e : host.edges()) {
    rows_[e.u * words_ + e.v / 64] |= std::uint64_t{1} << (e.v % 64);
    rows_[e.v * words_ + e.u / 64] |= std::uint64_t{1} << (e.u % 64);
    adj_[e.u].push_back(e.v);
    adj_[e.v].push_back(e.u);
  }
}

struct SubgraphMatcher::Search {
  const SubgraphMatcher& m;
  const GraphSpec& h;
  std::optional<Edge> extra;
  std::vector<Vertex> order;            // pattern vertex at each position
  std::vector<std::vector<int>> back;   // earlier adjacent positions
  std::vector<Vertex> image;

  bool adjacent(Vertex a, Vertex b) const {
    if (extra && make_edge(a, b) == *extra) return true;
    return (m.rows_[a * m.words_ + b / 64] >> (b % 64)) & 1U;
  }
  std::size_t degree(Vertex x) const {
    return m.adj_[x].size() + (extra && (extra->u == x || extra->v == x));
  }

  void plan(std::vector<Vertex> prefix) {
    const Vertex k = h.vertex_count();
    order = std::move(prefix);
    std::vector<char> placed(k, 0);
    for (Vertex x : order) placed[x] = 1;
    while (order.size() < k) {
      int best = -1;
      std::size_t best_links = 0;
      for (Vertex x = 0; x < k; ++x) {
        if (placed[x]) continue;
        std::size_t links = 0;
        for (Vertex y : order) links += h.has_edge(x, y);
        if (best < 0 || links > best_links ||
            (links == best_links && h.degree(x) > h.degree(best))) {
          best = static_cast<int>(x);
          best_links = links;
        }
      }
      order.push_back(static_cast<Vertex>(best));
      placed[best] = 1;
    }
    back.assign(k, {});
    for (std::size_t pos = 0; pos < k; ++pos) {
      for (std::size_t prev = 0; prev < pos; ++prev) {
        if (h.has_edge(order[pos], order[prev])) {
          back[pos].push_back(static_cast<int>(prev));
        }
      }
    }
    image.assign(k, 0);
  }

  bool fits(std::size_t pos, Vertex y) const {
    if (degree(y) < h.degree(order[pos])) return false;
    for (std::size_t prev = 0; prev < pos; ++prev) {
      if (image[prev] == y) return false;
    }
    for (int prev : back[pos]) {
      if (!adjacent(image[prev], y)) return false;
    }
    return true;
  }

  bool extend(std::size_t pos) {
    if (pos == order.size()) return true;
    if (back[pos].empty()) {
      for (Vertex y = 0; y < m.n_; ++y) {
        if (!fits(pos, y)) continue;
        image[pos] = y;
        if (extend(pos + 1)) return true;
      }
      return false;
    }
    // Walk the neighbourhood of the lowest-degree placed neighbour.
    Vertex pivot = image[back[pos].front()];
    for (int prev : back[pos]) {
      if (degree(image[prev]) < degree(pivot)) pivot = image[prev];
    }
    for (Vertex y : m.adj_[pivot]) {
      if (!fits(pos, y)) continue;
      image[pos] = y;
      if (extend(pos + 1)) return true;
    }
    if (extra && (extra->u == pivot || extra->v == pivot)) {
      const Vertex y = extra->u == pivot ? extra->v : extra->u;
      if (fits(pos, y)) {
        image[pos] = y;
        if (extend(pos + 1)) return true;
      }
    }
    return false;
  }
};

bool SubgraphMatcher::contains(const GraphSpec& h) const {
  if (h.vertex_count() > n_) return false;
  Search s{*this, h, std::nullopt, {}, {}, {}};
  s.plan({});
  return s.extend(0);
}

bool SubgraphMatcher::contains_through(const GraphSpec& h, Vertex x,
                                       Vertex y) const {
  if (h.vertex_count() > n_ || x == y) return false;
  Search s{*this, h, make_edge(x, y), {}, {}, {}};
  for (const Edge& e : h.edges()) {
    for (int flip = 0; flip < 2; ++flip) {
      const Vertex a = flip ? e.v : e.u;
      const Vertex b = flip ? e.u : e.v;
      s.plan({a, b});
      s.image[0] = x;
      s.image[1] = y;
      if (s.degree(x) < h.degree(a) || s.degree(y) < h.degree(b)) continue;
      if (s.extend(2)) return true;
    }
  }
  return false;
}

bool contains_subgraph(const GraphSpec& g, const GraphSpec& h) {
  return SubgraphMatcher(g).contains(h);
}

}  // namespace hfree
