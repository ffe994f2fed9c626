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

#include "hfree/process.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace hfree {

namespace {

constexpr Vertex kExplicitListMaxN = 10000;
constexpr std::uint64_t kAcceptanceWindow = 1 << 14;

}  // namespace

PairTable::PairTable(Vertex n) : n_(n) {
  words_.assign((pair_count() + 31) / 32, 0);
}

std::uint64_t PairTable::pair_count() const {
  return static_cast<std::uint64_t>(n_) * (n_ > 0 ? n_ - 1 : 0) / 2;
}

EmbeddingPlan EmbeddingPlan::build(Vertex vertex_count,
                                   std::span<const Edge> edge_constraints,
                                   std::span<const Edge> open_constraints,
                                   std::span<const Vertex> anchors) {
  auto joined = [](std::span<const Edge> list, Vertex x, Vertex y) {
    const Edge e = make_edge(x, y);
    return std::find(list.begin(), list.end(), e) != list.end();
  };
  std::vector<Edge> edges, opens;
  for (Edge e : edge_constraints) edges.push_back(make_edge(e.u, e.v));
  for (Edge e : open_constraints) opens.push_back(make_edge(e.u, e.v));

  EmbeddingPlan plan;
  plan.anchored = anchors.size();
  plan.order.assign(anchors.begin(), anchors.end());
  std::vector<char> placed(vertex_count, 0);
  for (Vertex a : anchors) placed[a] = 1;
  while (plan.order.size() < vertex_count) {
    int best = -1;
    std::pair<std::size_t, std::size_t> best_score{0, 0};
    for (Vertex x = 0; x < vertex_count; ++x) {
      if (placed[x]) continue;
      std::pair<std::size_t, std::size_t> score{0, 0};
      for (Vertex y : plan.order) {
        score.first += joined(edges, x, y);
        score.second += joined(opens, x, y);
      }
      if (best < 0 || score > best_score) {
        best = static_cast<int>(x);
        best_score = score;
      }
    }
    plan.order.push_back(static_cast<Vertex>(best));
    placed[best] = 1;
  }
  plan.position_of.assign(vertex_count, 0);
  plan.edge_back.assign(vertex_count, {});
  plan.open_back.assign(vertex_count, {});
  for (std::size_t pos = 0; pos < vertex_count; ++pos) {
    plan.position_of[plan.order[pos]] = pos;
    for (std::size_t prev = 0; prev < pos; ++prev) {
      if (joined(edges, plan.order[pos], plan.order[prev])) {
        plan.edge_back[pos].push_back(prev);
      }
      if (joined(opens, plan.order[pos], plan.order[prev])) {
        plan.open_back[pos].push_back(prev);
      }
    }
  }
  return plan;
}

namespace {

// One route per orbit of (ordered edge ab, unordered edge cd) under Aut(H).
std::vector<ClosureRoute> build_closure_routes(const ForbiddenGraph& h) {
  using Key = std::tuple<Vertex, Vertex, Vertex, Vertex>;
  const auto edges = h.graph().edges();
  std::map<Key, bool> reps;
  for (const Edge& ab : edges) {
    for (int flip = 0; flip < 2; ++flip) {
      const Vertex a = flip ? ab.v : ab.u;
      const Vertex b = flip ? ab.u : ab.v;
      for (const Edge& cd : edges) {
        if (cd == ab) continue;
        Key best{a, b, cd.u, cd.v};
        for (const Permutation& sigma : h.automorphisms()) {
          const Edge img = make_edge(sigma[cd.u], sigma[cd.v]);
          best = std::min(best, Key{sigma[a], sigma[b], img.u, img.v});
        }
        reps[best] = true;
      }
    }
  }
  std::vector<ClosureRoute> routes;
  for (const auto& [key, unused] : reps) {
    ClosureRoute route;
    std::tie(route.a, route.b, route.c, route.d) = key;
    const Edge removed[] = {make_edge(route.a, route.b),
                            make_edge(route.c, route.d)};
    const GraphSpec j = h.graph().without_edges(removed);
    const Vertex anchors[] = {route.a, route.b};
    route.plan = EmbeddingPlan::build(h.v(), j.edges(), {}, anchors);
    routes.push_back(std::move(route));
  }
  return routes;
}

// Calls `closing(x, y)` for every pair completed by a route from (u, v),
// possibly more than once per pair.
template <class Fn>
void for_each_closing_pair(const ProcessState& state, Vertex u, Vertex v,
                           Fn&& closing) {
  std::vector<Vertex> image(state.forbidden().v());
  for (const ClosureRoute& route : state.closure_routes()) {
    std::size_t pc = route.plan.position_of[route.c];
    std::size_t pd = route.plan.position_of[route.d];
    // Report an anchored endpoint first; its status row is already cached.
    if (pd < pc) std::swap(pc, pd);
    image[0] = u;
    image[1] = v;
    for_each_embedding(state, route.plan, image,
                       [&](const std::vector<Vertex>& img) {
                         closing(img[pc], img[pd]);
                       });
  }
}

}  // namespace

ProcessState ProcessState::init(const ForbiddenGraph& h, Vertex n,
                                std::uint64_t seed, ProcessOptions options) {
  if (n < h.v()) {
    throw std::invalid_argument("process needs n >= v_H (n = " +
                                std::to_string(n) + ", v_H = " +
                                std::to_string(h.v()) + ")");
  }
  if (n > 92681) {
    throw std::invalid_argument("n too large for 32-bit pair indexing");
  }
  ProcessState state(h);
  state.n_ = n;
  state.s_ = h.p(n) * static_cast<double>(n) * static_cast<double>(n);
  state.words_ = (n + 63) / 64;
  state.rows_.assign(static_cast<std::size_t>(n) * state.words_, 0);
  state.adj_.assign(n, {});
  state.open_rows_.assign(state.rows_.size(), 0);
  for (Vertex x = 0; x < n; ++x) {
    for (Vertex y = 0; y < n; ++y) {
      if (x != y) {
        state.open_rows_[x * state.words_ + y / 64] |= std::uint64_t{1}
                                                       << (y % 64);
      }
    }
  }
  state.open_count_ = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  state.rng_ = Rng(seed);
  state.options_ = options;
  state.routes_ =
      std::make_shared<const std::vector<ClosureRoute>>(build_closure_routes(h));

  const bool use_list =
      options.sampler == SamplerKind::ExplicitList ||
      (options.sampler == SamplerKind::Auto && n <= kExplicitListMaxN);
  state.list_mode_ = use_list;
  if (use_list) {
    state.open_list_.reserve(state.open_count_);
    for (Vertex b = 1; b < n; ++b)
      for (Vertex a = 0; a < b; ++a) state.open_list_.push_back({a, b});
  }
  return state;
}

std::uint64_t ProcessState::closed_count() const {
  return static_cast<std::uint64_t>(n_) * (n_ - 1) / 2 - open_count_ -
         edges_.size();
}

PairTable ProcessState::status_table() const {
  PairTable table(n_);
  for (Vertex b = 1; b < n_; ++b)
    for (Vertex a = 0; a < b; ++a) {
      const PairStatus st = status(a, b);
      if (st != PairStatus::Open) table.set(a, b, st);
    }
  return table;
}

SamplerKind ProcessState::active_sampler() const {
  return list_mode_ ? SamplerKind::ExplicitList : SamplerKind::Rejection;
}

GraphSpec ProcessState::graph() const {
  return GraphSpec(n_, std::vector<Edge>(edges_.begin(), edges_.end()));
}

void ProcessState::switch_to_list() {
  list_mode_ = true;
  open_list_.clear();
  open_list_.reserve(open_count_);
  for (Vertex b = 1; b < n_; ++b)
    for (Vertex a = 0; a < b; ++a)
      if (is_open(a, b)) open_list_.push_back({a, b});
}

Edge ProcessState::sample_open_pair() {
  while (!list_mode_) {
    const auto u = static_cast<Vertex>(rng_.below(n_));
    auto v = static_cast<Vertex>(rng_.below(n_ - 1));
    if (v >= u) ++v;
    ++window_trials_;
    const bool hit = is_open(u, v);
    window_hits_ += hit;
    if (window_trials_ == kAcceptanceWindow) {
      if (window_hits_ * 100 < window_trials_) switch_to_list();
      window_trials_ = window_hits_ = 0;
    }
    if (hit) return make_edge(u, v);
  }
  while (true) {
    const std::uint64_t pos = rng_.below(open_list_.size());
    const Edge e = open_list_[pos];
    open_list_[pos] = open_list_.back();
    open_list_.pop_back();
    if (is_open(e.u, e.v)) return e;
  }
}

StepRecord ProcessState::insert(Edge pair) {
  pair = make_edge(pair.u, pair.v);
  if (pair.u == pair.v || pair.v >= n_ ||
      !is_open(pair.u, pair.v)) {
    throw std::invalid_argument("insert: pair " + std::to_string(pair.u) +
                                " " + std::to_string(pair.v) +
                                " is not open");
  }
  close_pair(pair.u, pair.v);
  rows_[pair.u * words_ + pair.v / 64] |= std::uint64_t{1} << (pair.v % 64);
  rows_[pair.v * words_ + pair.u / 64] |= std::uint64_t{1} << (pair.u % 64);
  adj_[pair.u].push_back(pair.v);
  adj_[pair.v].push_back(pair.u);
  edges_.push_back(pair);
  --open_count_;

  std::uint64_t newly_closed = 0;
  for_each_closing_pair(*this, pair.u, pair.v, [&](Vertex x, Vertex y) {
    if (!is_open(x, y)) return;
    close_pair(x, y);
    --open_count_;
    ++newly_closed;
    if (options_.log_closures) log_.pairs_.push_back(make_edge(x, y));
  });
  if (options_.log_closures) log_.offsets_.push_back(log_.pairs_.size());

  StepRecord record;
  record.i = edges_.size();
  record.chosen = pair;
  record.newly_closed = newly_closed;
  record.open_after = open_count_;
  record.t = static_cast<double>(record.i) / s_;
  return record;
}

std::optional<StepRecord> ProcessState::step() {
  if (open_count_ == 0) return std::nullopt;
  return insert(sample_open_pair());
}

std::vector<Edge> closing_set(const ProcessState& state, Edge uv) {
  uv = make_edge(uv.u, uv.v);
  if (uv.u == uv.v || uv.v >= state.n()) {
    throw std::invalid_argument("closing_set: not a vertex pair");
  }
  if (state.has_edge(uv.u, uv.v)) {
    throw std::invalid_argument("closing_set: pair is already an edge");
  }
  std::vector<Edge> out;
  for_each_closing_pair(state, uv.u, uv.v, [&](Vertex x, Vertex y) {
    // A present f(c)f(d) would mean H lies in G(i) + uv alone.
    if (!state.has_edge(x, y)) out.push_back(make_edge(x, y));
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Trace run(ProcessState& state, StopRule stop, const RunOptions& options) {
  std::vector<std::uint64_t> checkpoints = options.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  auto next_cp = std::lower_bound(checkpoints.begin(), checkpoints.end(),
                                  state.steps());
  auto observe = [&] {
    while (next_cp != checkpoints.end() && *next_cp < state.steps()) ++next_cp;
    if (next_cp == checkpoints.end() || *next_cp != state.steps()) return;
    ++next_cp;
    for (const Observer& observer : options.observers) {
      try {
        observer(state);
      } catch (const std::exception& e) {
        throw ObserverError(state.steps(), e.what());
      }
    }
  };

  Trace trace;
  observe();
  std::uint64_t taken = 0;
  while (stop.kind == StopRule::Kind::UntilTermination ||
         taken < stop.max_steps) {
    auto record = state.step();
    if (!record) {
      trace.terminated = true;
      break;
    }
    ++taken;
    if (options.keep_rows) trace.rows.push_back(*record);
    if (options.on_step) options.on_step(*record);
    observe();
  }
  if (state.open_count() == 0) trace.terminated = true;
  return trace;
}

std::uint64_t default_step_budget(const ForbiddenGraph& h, Vertex n,
                                  double mu) {
  const double dn = n;
  const double value = mu *
                       std::pow(std::log(dn), 1.0 / static_cast<double>(h.e() - 1)) *
                       h.p(dn) * dn * dn;
  return static_cast<std::uint64_t>(std::llround(value));
}

PairTable recompute_status_oracle(const ForbiddenGraph& h, Vertex n,
                                  std::span<const Edge> edges) {
  const GraphSpec g(n, std::vector<Edge>(edges.begin(), edges.end()));
  const SubgraphMatcher matcher(g);
  if (matcher.contains(h.graph())) {
    throw OracleViolation("edge set already contains H");
  }
  PairTable table(n);
  for (const Edge& e : g.edges()) table.set(e.u, e.v, PairStatus::Edge);
  for (Vertex b = 1; b < n; ++b) {
    for (Vertex a = 0; a < b; ++a) {
      if (g.has_edge(a, b)) continue;
      if (matcher.contains_through(h.graph(), a, b)) {
        table.set(a, b, PairStatus::Closed);
      }
    }
  }
  return table;
}

PairTable recompute_status_oracle(const ProcessState& state) {
  return recompute_status_oracle(state.forbidden(), state.n(), state.edges());
}

void write_trace_header(std::ostream& os) {
  os << "i,t,open_pairs,newly_closed,edge_u,edge_v\n";
}

void write_trace_row(std::ostream& os, const StepRecord& row) {
  os << fmt::format("{},{:.9g},{},{},{},{}\n", row.i, row.t, row.open_after,
                    row.newly_closed, row.chosen.u, row.chosen.v);
}

}  // namespace hfree
