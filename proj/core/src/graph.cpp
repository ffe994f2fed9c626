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

#include "hfree/graph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace hfree {

GraphSpec::GraphSpec(Vertex vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count_ == 0) throw GraphError("graph must have at least one vertex");
  for (Edge& e : edges_) {
    if (e.u == e.v) {
      throw GraphError("loop at vertex " + std::to_string(e.u));
    }
    if (e.u >= vertex_count_ || e.v >= vertex_count_) {
      throw GraphError("edge endpoint out of range: " + std::to_string(e.u) +
                       " " + std::to_string(e.v));
    }
    e = make_edge(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end());
      dup != edges_.end()) {
    throw GraphError("duplicate edge " + std::to_string(dup->u) + " " +
                     std::to_string(dup->v));
  }
  degrees_.assign(vertex_count_, 0);
  for (const Edge& e : edges_) {
    ++degrees_[e.u];
    ++degrees_[e.v];
  }
  if (vertex_count_ <= kMaskLimit) {
    masks_.assign(vertex_count_, 0);
    for (const Edge& e : edges_) {
      masks_[e.u] |= std::uint64_t{1} << e.v;
      masks_[e.v] |= std::uint64_t{1} << e.u;
    }
  }
}

bool GraphSpec::has_edge(Vertex a, Vertex b) const {
  if (a == b || a >= vertex_count_ || b >= vertex_count_) return false;
  if (!masks_.empty()) return (masks_[a] >> b) & 1U;
  return std::binary_search(edges_.begin(), edges_.end(), make_edge(a, b));
}

std::size_t GraphSpec::min_degree() const {
  return *std::min_element(degrees_.begin(), degrees_.end());
}

std::vector<Vertex> GraphSpec::neighbors(Vertex x) const {
  std::vector<Vertex> out;
  for (const Edge& e : edges_) {
    if (e.u == x) out.push_back(e.v);
    if (e.v == x) out.push_back(e.u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t GraphSpec::all_mask() const {
  return vertex_count_ >= 64 ? ~std::uint64_t{0}
                             : (std::uint64_t{1} << vertex_count_) - 1;
}

std::size_t GraphSpec::induced_edge_count(std::uint64_t vertex_mask) const {
  std::size_t twice = 0;
  for (std::uint64_t m = vertex_mask; m != 0; m &= m - 1) {
    const int x = std::countr_zero(m);
    twice += std::popcount(masks_[x] & vertex_mask);
  }
  return twice / 2;
}

std::optional<std::size_t> GraphSpec::edge_index(Edge e) const {
  e = make_edge(e.u, e.v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

GraphSpec GraphSpec::with_edge(Edge e) const {
  std::vector<Edge> edges = edges_;
  edges.push_back(e);
  return GraphSpec(vertex_count_, std::move(edges));
}

GraphSpec GraphSpec::without_edges(std::span<const Edge> removed) const {
  std::vector<Edge> edges;
  for (const Edge& e : edges_) {
    const bool drop = std::any_of(removed.begin(), removed.end(),
                                  [&](const Edge& r) {
                                    return make_edge(r.u, r.v) == e;
                                  });
    if (!drop) edges.push_back(e);
  }
  return GraphSpec(vertex_count_, std::move(edges));
}

namespace {

// Connectivity of the graph with `skip` removed (skip == vertex_count means
// nothing removed).
bool connected_without(const GraphSpec& g, Vertex skip) {
  const Vertex n = g.vertex_count();
  std::vector<std::vector<Vertex>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  Vertex start = 0;
  while (start < n && start == skip) ++start;
  if (start == n) return true;
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{start};
  seen[start] = 1;
  Vertex reached = 1;
  while (!stack.empty()) {
    const Vertex x = stack.back();
    stack.pop_back();
    for (Vertex y : adj[x]) {
      if (y == skip || seen[y]) continue;
      seen[y] = 1;
      ++reached;
      stack.push_back(y);
    }
  }
  const Vertex expected = skip < n ? n - 1 : n;
  return reached == expected;
}

}  // namespace

bool GraphSpec::is_connected() const {
  return connected_without(*this, vertex_count_);
}

bool GraphSpec::is_two_connected() const {
  if (vertex_count_ < 3 || !is_connected()) return false;
  for (Vertex x = 0; x < vertex_count_; ++x) {
    if (!connected_without(*this, x)) return false;
  }
  return true;
}

std::string GraphSpec::to_text() const {
  std::ostringstream os;
  os << "v " << vertex_count_ << '\n';
  for (const Edge& e : edges_) os << "e " << e.u << ' ' << e.v << '\n';
  return os.str();
}

std::uint64_t mask_of(std::span<const Vertex> vertices) {
  std::uint64_t m = 0;
  for (Vertex x : vertices) m |= std::uint64_t{1} << x;
  return m;
}

std::vector<Vertex> vertices_of(std::uint64_t mask) {
  std::vector<Vertex> out;
  for (; mask != 0; mask &= mask - 1) {
    out.push_back(static_cast<Vertex>(std::countr_zero(mask)));
  }
  return out;
}

namespace presets {

GraphSpec complete(Vertex s) {
  std::vector<Edge> edges;
  for (Vertex a = 0; a < s; ++a)
    for (Vertex b = a + 1; b < s; ++b) edges.push_back({a, b});
  return GraphSpec(s, std::move(edges));
}

GraphSpec cycle(Vertex length) {
  if (length < 3) throw GraphError("cycle needs at least 3 vertices");
  std::vector<Edge> edges;
  for (Vertex a = 0; a < length; ++a) edges.push_back(make_edge(a, (a + 1) % length));
  return GraphSpec(length, std::move(edges));
}

GraphSpec complete_bipartite(Vertex r, Vertex s) {
  std::vector<Edge> edges;
  for (Vertex a = 0; a < r; ++a)
    for (Vertex b = 0; b < s; ++b) edges.push_back({a, r + b});
  return GraphSpec(r + s, std::move(edges));
}

GraphSpec path(Vertex vertex_count) {
  std::vector<Edge> edges;
  for (Vertex a = 0; a + 1 < vertex_count; ++a) edges.push_back({a, a + 1});
  return GraphSpec(vertex_count, std::move(edges));
}

GraphSpec star(Vertex leaves) {
  std::vector<Edge> edges;
  for (Vertex a = 1; a <= leaves; ++a) edges.push_back({0, a});
  return GraphSpec(leaves + 1, std::move(edges));
}

GraphSpec empty(Vertex vertex_count) { return GraphSpec(vertex_count, {}); }

}  // namespace presets

namespace {

std::optional<Vertex> parse_count(std::string_view text) {
  Vertex value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::optional<GraphSpec> parse_preset(std::string_view name) {
  if (name.size() < 2) return std::nullopt;
  const char kind = name.front();
  std::string_view rest = name.substr(1);
  if (kind == 'K') {
    if (auto comma = rest.find(','); comma != std::string_view::npos) {
      auto r = parse_count(rest.substr(0, comma));
      auto s = parse_count(rest.substr(comma + 1));
      if (!r || !s || *r == 0 || *s == 0) return std::nullopt;
      return presets::complete_bipartite(*r, *s);
    }
    auto s = parse_count(rest);
    if (!s || *s == 0) return std::nullopt;
    return presets::complete(*s);
  }
  if (kind == 'C') {
    auto l = parse_count(rest);
    if (!l || *l < 3) return std::nullopt;
    return presets::cycle(*l);
  }
  if (kind == 'P') {
    auto k = parse_count(rest);
    if (!k || *k == 0) return std::nullopt;
    return presets::path(*k);
  }
  return std::nullopt;
}

GraphSpec parse_graph_text(
    std::istream& in,
    const std::function<bool(std::string_view, std::size_t)>* extra) {
  std::optional<Vertex> count;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> GraphError {
    return GraphError("line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string head;
    if (!(tokens >> head) || head.front() == '#') continue;
    if (head == "v") {
      if (count) throw fail("duplicate vertex-count line");
      std::string value, junk;
      if (!(tokens >> value) || (tokens >> junk)) throw fail("expected `v <count>`");
      count = parse_count(value);
      if (!count || *count == 0) throw fail("bad vertex count `" + value + "`");
    } else if (head == "e") {
      if (!count) throw fail("edge before `v <count>` line");
      std::string a, b, junk;
      if (!(tokens >> a >> b) || (tokens >> junk)) throw fail("expected `e <u> <v>`");
      auto x = parse_count(a);
      auto y = parse_count(b);
      if (!x || !y) throw fail("bad vertex index");
      if (*x >= *count || *y >= *count) throw fail("vertex index out of range");
      if (*x == *y) throw fail("loop edge");
      edges.push_back(make_edge(*x, *y));
    } else if (extra != nullptr && (*extra)(line, line_no)) {
      continue;
    } else {
      throw fail("unknown directive `" + head + "`");
    }
  }
  if (!count) throw GraphError("line " + std::to_string(line_no) + ": missing `v <count>` line");
  try {
    return GraphSpec(*count, std::move(edges));
  } catch (const GraphError& e) {
    throw GraphError(std::string("graph file: ") + e.what());
  }
}

GraphSpec load_graph(const std::string& preset_or_path) {
  if (auto preset = parse_preset(preset_or_path)) return *preset;
  std::ifstream in(preset_or_path);
  if (!in) {
    throw GraphError("`" + preset_or_path +
                     "` is neither a graph preset nor a readable file");
  }
  return parse_graph_text(in);
}

}  // namespace hfree
