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

#include "hfree/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace hfree {

DegreeStats degree_stats(const ProcessState& state) {
  const Vertex n = state.n();
  DegreeStats out;
  std::vector<std::size_t> degrees(n);
  for (Vertex x = 0; x < n; ++x) degrees[x] = state.degree(x);
  out.min = *std::min_element(degrees.begin(), degrees.end());
  out.max = *std::max_element(degrees.begin(), degrees.end());
  out.mean = 2.0 * static_cast<double>(state.steps()) / n;
  out.predicted_mean = out.mean;
  out.histogram.assign(out.max + 1, 0);
  for (std::size_t d : degrees) ++out.histogram[d];
  std::sort(degrees.begin(), degrees.end());
  out.median = n % 2 == 1 ? static_cast<double>(degrees[n / 2])
                          : 0.5 * static_cast<double>(degrees[n / 2 - 1] +
                                                      degrees[n / 2]);
  return out;
}

bool common_neighbour_regime(const ForbiddenGraph& h, std::size_t d) {
  return (Rational(1) -
          Rational(static_cast<std::int64_t>(d)) * h.rho()).sign() > 0;
}

double predicted_common_neighbours(const ProcessState& state, std::size_t d) {
  const double n = state.n();
  const double density = 2.0 * static_cast<double>(state.steps()) / (n * n);
  return std::pow(density, static_cast<double>(d)) * n;
}

std::uint64_t common_neighbors(const ProcessState& state,
                               std::span<const Vertex> vertices) {
  if (vertices.empty()) {
    throw std::invalid_argument("common_neighbors: need at least one vertex");
  }
  for (Vertex x : vertices) {
    if (x >= state.n()) {
      throw std::invalid_argument("common_neighbors: vertex out of range");
    }
  }
  const auto first = state.neighbor_row(vertices.front());
  std::uint64_t count = 0;
  for (std::size_t w = 0; w < first.size(); ++w) {
    std::uint64_t word = first[w];
    for (std::size_t k = 1; k < vertices.size() && word != 0; ++k) {
      word &= state.neighbor_row(vertices[k])[w];
    }
    count += std::popcount(word);
  }
  return count;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::Supercritical: return "Supercritical";
    case Regime::Critical: return "Critical";
    case Regime::ContainsH: return "ContainsH";
  }
  return "?";
}

Regime classify_regime(const ForbiddenGraph& h, const GraphSpec& gamma) {
  if (gamma.vertex_count() > kSubsetScanCap) {
    throw SizeLimitError("classify_regime: Gamma has more than " +
                         std::to_string(kSubsetScanCap) + " vertices");
  }
  if (contains_subgraph(gamma, h.graph())) return Regime::ContainsH;
  bool all_positive = true;
  for (std::uint64_t b = 1; b <= gamma.all_mask(); ++b) {
    const ScalingExponent s =
        Rational(std::popcount(b)) -
        Rational(static_cast<std::int64_t>(gamma.induced_edge_count(b))) *
            h.rho();
    if (s.sign() < 0) return Regime::Subcritical;
    if (s.sign() == 0) all_positive = false;
  }
  return all_positive ? Regime::Supercritical : Regime::Critical;
}

Vertex census_vertex_cap(Vertex n) {
  if (n <= 100) return kSubsetScanCap;
  if (n >= 10000) return 5;
  return 7;
}

namespace {

std::uint64_t falling(std::uint64_t top, std::size_t count) {
  std::uint64_t out = 1;
  for (std::size_t k = 0; k < count; ++k) {
    if (top < k) return 0;
    out *= top - k;
  }
  return out;
}

// Centre degree if gamma is a star K_{1,k} with k >= 1.
std::optional<std::size_t> star_size(const GraphSpec& gamma) {
  const std::size_t k = gamma.edge_count();
  if (k == 0 || gamma.vertex_count() != k + 1) return std::nullopt;
  if (k == 1) return 1;
  std::size_t centres = 0;
  for (Vertex x = 0; x < gamma.vertex_count(); ++x) {
    if (gamma.degree(x) == k) {
      ++centres;
    } else if (gamma.degree(x) != 1) {
      return std::nullopt;
    }
  }
  return centres == 1 ? std::optional<std::size_t>(k) : std::nullopt;
}

}  // namespace

std::uint64_t count_labelled_copies(const ProcessState& state,
                                    const GraphSpec& gamma) {
  // Split off isolated vertices: each multiplies by the remaining choices.
  std::vector<Vertex> relabel(gamma.vertex_count(), 0);
  Vertex core_size = 0;
  for (Vertex x = 0; x < gamma.vertex_count(); ++x) {
    if (gamma.degree(x) > 0) relabel[x] = core_size++;
  }
  const std::size_t isolated = gamma.vertex_count() - core_size;
  if (core_size == 0) return falling(state.n(), isolated);
  std::vector<Edge> core_edges;
  for (const Edge& e : gamma.edges()) {
    core_edges.push_back(make_edge(relabel[e.u], relabel[e.v]));
  }
  const GraphSpec core(core_size, std::move(core_edges));
  const std::uint64_t spare = falling(state.n() - core_size, isolated);

  if (const auto k = star_size(core)) {
    std::uint64_t total = 0;
    for (Vertex x = 0; x < state.n(); ++x) total += falling(state.degree(x), *k);
    return total * spare;
  }
  const EmbeddingPlan plan =
      EmbeddingPlan::build(core.vertex_count(), core.edges(), {}, {});
  std::vector<Vertex> image(core.vertex_count());
  std::uint64_t count = 0;
  for_each_embedding(state, plan, image,
                     [&](const std::vector<Vertex>&) { ++count; });
  return count * spare;
}

CensusReport subgraph_census(const ProcessState& state,
                             const GraphSpec& gamma) {
  const bool closed_form =
      gamma.edge_count() == 0 || star_size(gamma).has_value();
  if (!closed_form && gamma.vertex_count() > census_vertex_cap(state.n())) {
    throw CostLimitError(
        "census of a " + std::to_string(gamma.vertex_count()) +
        "-vertex pattern at n = " + std::to_string(state.n()) +
        " exceeds the cost cap of " +
        std::to_string(census_vertex_cap(state.n())) +
        " vertices; use a smaller pattern or smaller n");
  }
  CensusReport out;
  out.gamma = gamma;
  out.observed = count_labelled_copies(state, gamma);
  const double n = state.n();
  const double density = 2.0 * static_cast<double>(state.steps()) / (n * n);
  out.predicted = std::pow(density, static_cast<double>(gamma.edge_count())) *
                  std::pow(n, static_cast<double>(gamma.vertex_count()));
  out.regime = classify_regime(state.forbidden(), gamma);
  out.aut_gamma = gamma.vertex_count() <= kAutomorphismCap
                      ? automorphism_count(gamma)
                      : 1;
  return out;
}

namespace {

using Bits = std::vector<std::uint64_t>;

struct CliqueSearch {
  std::size_t n;
  std::size_t words;
  std::vector<Bits> adj;  // complement graph
  std::size_t best = 0;

  static bool empty(const Bits& b) {
    return std::all_of(b.begin(), b.end(), [](std::uint64_t w) { return w == 0; });
  }

  void colour_sort(const Bits& p, std::vector<std::size_t>& order,
                   std::vector<std::size_t>& colour) const {
    Bits uncoloured = p;
    std::size_t k = 0;
    while (!empty(uncoloured)) {
      ++k;
      Bits q = uncoloured;
      while (!empty(q)) {
        std::size_t w = 0;
        while (q[w] == 0) ++w;
        const std::size_t v = w * 64 + std::countr_zero(q[w]);
        q[w] &= q[w] - 1;
        uncoloured[v / 64] &= ~(std::uint64_t{1} << (v % 64));
        for (std::size_t x = 0; x < words; ++x) q[x] &= ~adj[v][x];
        order.push_back(v);
        colour.push_back(k);
      }
    }
  }

  void expand(std::size_t size, Bits p) {
    std::vector<std::size_t> order, colour;
    colour_sort(p, order, colour);
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (size + colour[idx] <= best) return;
      const std::size_t v = order[idx];
      Bits next(words);
      for (std::size_t x = 0; x < words; ++x) next[x] = p[x] & adj[v][x];
      if (empty(next)) {
        best = std::max(best, size + 1);
      } else {
        expand(size + 1, std::move(next));
      }
      p[v / 64] &= ~(std::uint64_t{1} << (v % 64));
    }
  }
};

}  // namespace

IndependenceResult independence_number(const GraphSpec& g, bool exact,
                                       Vertex cap) {
  const Vertex n = g.vertex_count();
  IndependenceResult out;
  if (n == 0) {
    out.exact = true;
    return out;
  }
  if (exact) {
    if (n > cap) {
      throw CostLimitError("exact independence number limited to n <= " +
                           std::to_string(cap) + " (n = " + std::to_string(n) +
                           ")");
    }
    CliqueSearch search;
    search.n = n;
    search.words = (n + 63) / 64;
    search.adj.assign(n, Bits(search.words, 0));
    for (Vertex x = 0; x < n; ++x) {
      for (Vertex y = 0; y < n; ++y) {
        if (x != y && !g.has_edge(x, y)) {
          search.adj[x][y / 64] |= std::uint64_t{1} << (y % 64);
        }
      }
    }
    Bits all(search.words, 0);
    for (Vertex x = 0; x < n; ++x) all[x / 64] |= std::uint64_t{1} << (x % 64);
    search.expand(0, all);
    out.value = search.best;
    out.exact = true;
    return out;
  }
  // Minimum-degree-first greedy.
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
    return g.degree(a) < g.degree(b);
  });
  std::vector<std::vector<Vertex>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> blocked(n, 0);
  for (Vertex x : order) {
    if (blocked[x]) continue;
    ++out.value;
    blocked[x] = 1;
    for (Vertex y : adj[x]) blocked[y] = 1;
  }
  return out;
}

IndependenceResult independence_number(const ProcessState& state, bool exact,
                                       Vertex cap) {
  if (exact && state.n() > cap) {
    throw CostLimitError("exact independence number limited to n <= " +
                         std::to_string(cap) + " (n = " +
                         std::to_string(state.n()) + ")");
  }
  return independence_number(state.graph(), exact, cap);
}

namespace {

std::vector<std::uint64_t> member_mask(Vertex n, std::span<const Vertex> set) {
  std::vector<std::uint64_t> mask((n + 63) / 64, 0);
  for (Vertex x : set) {
    if (x >= n) throw std::invalid_argument("vertex set: vertex out of range");
    mask[x / 64] |= std::uint64_t{1} << (x % 64);
  }
  return mask;
}

std::vector<Vertex> distinct(std::span<const Vertex> set) {
  std::vector<Vertex> out(set.begin(), set.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::uint64_t open_pairs_within(const ProcessState& state,
                                std::span<const Vertex> I) {
  const auto members = distinct(I);
  const auto mask = member_mask(state.n(), members);
  std::uint64_t ordered = 0;
  for (Vertex x : members) {
    const auto row = state.open_row(x);
    for (std::size_t w = 0; w < row.size(); ++w) {
      ordered += std::popcount(row[w] & mask[w]);
    }
  }
  return ordered;
}

double default_smooth_threshold(const TrajectoryParams& params) {
  return std::pow(static_cast<double>(params.n), -5.0 * params.epsilon) /
         params.p;
}

SmoothProbe smooth_independence_probe(const ProcessState& state,
                                      std::span<const Vertex> I,
                                      double threshold) {
  const ClosureLog* log = state.closure_log();
  if (log == nullptr) {
    throw std::invalid_argument(
        "smooth_independence_probe: run has no per-step closure log "
        "(enable closure logging)");
  }
  SmoothProbe out;
  const auto members = distinct(I);
  if (members.size() < 2) return out;
  const auto mask = member_mask(state.n(), members);
  auto inside = [&](Vertex x) { return (mask[x / 64] >> (x % 64)) & 1U; };
  for (std::uint64_t i = 1; i <= log->steps(); ++i) {
    std::uint64_t ordered = 0;
    for (const Edge& e : log->closed_at(i)) {
      if (inside(e.u) && inside(e.v)) ordered += 2;
    }
    out.max_closed_in_i = std::max(out.max_closed_in_i, ordered);
    if (static_cast<double>(ordered) > threshold) ++out.bad_edge_count;
  }
  return out;
}

std::uint64_t edges_between(const ProcessState& state,
                            std::span<const Vertex> A,
                            std::span<const Vertex> B) {
  const auto in_a = member_mask(state.n(), A);
  const auto in_b = member_mask(state.n(), B);
  auto has = [](const std::vector<std::uint64_t>& m, Vertex x) {
    return ((m[x / 64] >> (x % 64)) & 1U) != 0;
  };
  std::uint64_t count = 0;
  for (const Edge& e : state.edges()) {
    if ((has(in_a, e.u) && has(in_b, e.v)) ||
        (has(in_a, e.v) && has(in_b, e.u))) {
      ++count;
    }
  }
  return count;
}

double edges_between_threshold(const TrajectoryParams& params, std::size_t a,
                               std::size_t b) {
  const double da = static_cast<double>(a);
  const double db = static_cast<double>(b);
  return std::max(4.0 / params.epsilon * (da + db),
                  params.p * da * db *
                      std::pow(static_cast<double>(params.n),
                               2.0 * params.epsilon));
}

FitResult exponent_fit(std::span<const std::pair<double, double>> points,
                       double log_correction) {
  if (points.size() < 3) {
    throw std::invalid_argument("exponent_fit: need at least 3 points");
  }
  FitResult out;
  for (const auto& [n, value] : points) {
    if (!(n > 1.0) || !(value > 0.0)) {
      throw std::invalid_argument(
          "exponent_fit: need n > 1 and positive values");
    }
    const double log_n = std::log(n);
    out.points.emplace_back(
        log_n, std::log(value) - log_correction * std::log(log_n));
  }
  std::vector<double> xs;
  for (const auto& pt : out.points) xs.push_back(pt.first);
  std::sort(xs.begin(), xs.end());
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw std::invalid_argument("exponent_fit: n values must be distinct");
  }
  const double k = static_cast<double>(out.points.size());
  double mx = 0, my = 0;
  for (const auto& [x, y] : out.points) {
    mx += x;
    my += y;
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : out.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss_res = 0;
  for (const auto& [x, y] : out.points) {
    const double r = y - (out.intercept + out.slope * x);
    ss_res += r * r;
  }
  out.r_squared = syy > 0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return out;
}

}  // namespace hfree
