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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hfree {

using Vertex = std::uint32_t;

// Unordered vertex pair, always stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(Vertex a, Vertex b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an exhaustive routine is asked to work on a graph above its cap.
class SizeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite simple graph on vertices 0..vertex_count-1 with a canonical sorted
// edge list. Graphs with at most 64 vertices also carry neighbour masks so
// that subset scans are cheap.
class GraphSpec {
 public:
  static constexpr Vertex kMaskLimit = 64;

  GraphSpec() = default;
  GraphSpec(Vertex vertex_count, std::vector<Edge> edges);

  Vertex vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  bool has_edge(Vertex a, Vertex b) const;
  std::size_t degree(Vertex x) const { return degrees_[x]; }
  std::size_t min_degree() const;
  std::vector<Vertex> neighbors(Vertex x) const;

  // Only valid when vertex_count() <= kMaskLimit.
  std::uint64_t neighbor_mask(Vertex x) const { return masks_[x]; }
  std::uint64_t all_mask() const;
  std::size_t induced_edge_count(std::uint64_t vertex_mask) const;
  bool is_independent(std::uint64_t vertex_mask) const {
    return induced_edge_count(vertex_mask) == 0;
  }

  // Index of the edge in edges(), or nullopt.
  std::optional<std::size_t> edge_index(Edge e) const;

  GraphSpec with_edge(Edge e) const;
  GraphSpec without_edges(std::span<const Edge> removed) const;
  bool is_connected() const;
  bool is_two_connected() const;

  std::string to_text() const;

  friend bool operator==(const GraphSpec& a, const GraphSpec& b) {
    return a.vertex_count_ == b.vertex_count_ && a.edges_ == b.edges_;
  }

 private:
  Vertex vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> degrees_;
  std::vector<std::uint64_t> masks_;
};

std::uint64_t mask_of(std::span<const Vertex> vertices);
std::vector<Vertex> vertices_of(std::uint64_t mask);

namespace presets {
GraphSpec complete(Vertex s);
GraphSpec cycle(Vertex length);
GraphSpec complete_bipartite(Vertex r, Vertex s);
GraphSpec path(Vertex vertex_count);
GraphSpec star(Vertex leaves);
GraphSpec empty(Vertex vertex_count);
}  // namespace presets

// Parses `K<s>`, `C<l>`, `K<r>,<s>` and `P<k>` (path on k vertices).
std::optional<GraphSpec> parse_preset(std::string_view name);

// Text format: `v <count>` followed by `e <u> <v>` lines, 0-indexed.
// Blank lines and lines starting with '#' are ignored. Lines whose first
// token is not `v` or `e` are handed to `extra` when given, otherwise they
// are a parse error. Errors carry the 1-based line number.
GraphSpec parse_graph_text(
    std::istream& in,
    const std::function<bool(std::string_view line, std::size_t line_no)>*
        extra = nullptr);

// Preset name, or else a path to a graph text file.
GraphSpec load_graph(const std::string& preset_or_path);

}  // namespace hfree
