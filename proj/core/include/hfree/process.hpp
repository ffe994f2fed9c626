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

#include <bit>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hfree/graph.hpp"
#include "hfree/rng.hpp"
#include "hfree/structure.hpp"

namespace hfree {

enum class PairStatus : std::uint8_t { Open = 0, Closed = 1, Edge = 2 };

// Status of every unordered pair, packed as 2-bit codes in a flat
// triangular array.
class PairTable {
 public:
  PairTable() = default;
  explicit PairTable(Vertex n);

  Vertex vertex_count() const { return n_; }
  std::uint64_t pair_count() const;

  PairStatus get(Vertex a, Vertex b) const {
    const std::uint64_t k = index(a, b);
    return static_cast<PairStatus>((words_[k >> 5] >> ((k & 31) * 2)) & 3U);
  }
  void set(Vertex a, Vertex b, PairStatus status) {
    const std::uint64_t k = index(a, b);
    std::uint64_t& word = words_[k >> 5];
    const unsigned shift = (k & 31) * 2;
    word = (word & ~(std::uint64_t{3} << shift)) |
           (static_cast<std::uint64_t>(status) << shift);
  }

  static std::uint64_t index(Vertex a, Vertex b) {
    if (a > b) std::swap(a, b);
    return static_cast<std::uint64_t>(b) * (b - 1) / 2 + a;
  }

  friend bool operator==(const PairTable&, const PairTable&) = default;

 private:
  Vertex n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Pattern embedding plan: the order in which pattern vertices are placed and,
// for each position, which earlier positions it must be joined to by an edge
// of G(i) or by an open pair. Positions [0, anchored) are fixed by the caller.
struct EmbeddingPlan {
  std::size_t anchored = 0;
  std::vector<Vertex> order;
  std::vector<std::size_t> position_of;
  std::vector<std::vector<std::size_t>> edge_back;
  std::vector<std::vector<std::size_t>> open_back;

  // Anchors are placed first in the given order; the rest greedily by number
  // of placed edge-neighbours, then open-neighbours.
  static EmbeddingPlan build(Vertex vertex_count,
                             std::span<const Edge> edge_constraints,
                             std::span<const Edge> open_constraints,
                             std::span<const Vertex> anchors);
};

enum class SamplerKind { Auto, ExplicitList, Rejection };

struct ProcessOptions {
  SamplerKind sampler = SamplerKind::Auto;
  // Keep the list of pairs closed by each step (for replay probes).
  bool log_closures = false;
};

struct StepRecord {
  std::uint64_t i = 0;
  Edge chosen;
  std::uint64_t newly_closed = 0;
  std::uint64_t open_after = 0;
  double t = 0.0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

// Per-step record of the unordered pairs moved Open -> Closed.
class ClosureLog {
 public:
  std::size_t steps() const { return offsets_.size() - 1; }
  // Pairs closed by step i (1-based, as in StepRecord::i).
  std::span<const Edge> closed_at(std::uint64_t i) const {
    return {pairs_.data() + offsets_[i - 1], pairs_.data() + offsets_[i]};
  }

 private:
  friend class ProcessState;
  std::vector<std::size_t> offsets_{0};
  std::vector<Edge> pairs_;
};

// Plan for one representative quadruple T = (a, b, {c, d}): embed
// J_T = H \ {ab, cd} with a -> u, b -> v, then f(c)f(d) is a closing pair.
struct ClosureRoute {
  Vertex a = 0, b = 0, c = 0, d = 0;
  EmbeddingPlan plan;
};

// The H-free process state G(i) together with the Edge/Open/Closed partition.
class ProcessState {
 public:
  static ProcessState init(const ForbiddenGraph& h, Vertex n,
                           std::uint64_t seed, ProcessOptions options = {});

  const ForbiddenGraph& forbidden() const { return h_; }
  Vertex n() const { return n_; }
  std::uint64_t steps() const { return edges_.size(); }
  std::uint64_t open_count() const { return open_count_; }
  std::uint64_t closed_count() const;
  double time_scale() const { return s_; }  // s = p n^2
  double t() const { return static_cast<double>(steps()) / s_; }
  const Rng& rng() const { return rng_; }
  SamplerKind active_sampler() const;

  PairStatus status(Vertex a, Vertex b) const {
    if (has_edge(a, b)) return PairStatus::Edge;
    return is_open(a, b) ? PairStatus::Open : PairStatus::Closed;
  }
  bool is_open(Vertex a, Vertex b) const {
    return (open_rows_[a * words_ + b / 64] >> (b % 64)) & 1U;
  }
  bool has_edge(Vertex a, Vertex b) const {
    return (rows_[a * words_ + b / 64] >> (b % 64)) & 1U;
  }
  std::span<const std::uint64_t> neighbor_row(Vertex x) const {
    return {rows_.data() + x * words_, words_};
  }
  std::span<const std::uint64_t> open_row(Vertex x) const {
    return {open_rows_.data() + x * words_, words_};
  }
  std::span<const Vertex> neighbors(Vertex x) const { return adj_[x]; }
  std::size_t degree(Vertex x) const { return adj_[x].size(); }
  // Snapshot of the Edge/Open/Closed partition.
  PairTable status_table() const;
  // Edges in insertion order.
  std::span<const Edge> edges() const { return edges_; }
  GraphSpec graph() const;

  const std::vector<ClosureRoute>& closure_routes() const { return *routes_; }
  const ClosureLog* closure_log() const {
    return options_.log_closures ? &log_ : nullptr;
  }

  // Adds an Open pair as the next edge and closes every pair it closes.
  // Throws std::invalid_argument if the pair is not Open.
  StepRecord insert(Edge pair);

  // One step of the process; nullopt once no open pair remains.
  std::optional<StepRecord> step();

 private:
  explicit ProcessState(const ForbiddenGraph& h) : h_(h) {}
  Edge sample_open_pair();
  void switch_to_list();
  void close_pair(Vertex a, Vertex b) {
    open_rows_[a * words_ + b / 64] &= ~(std::uint64_t{1} << (b % 64));
    open_rows_[b * words_ + a / 64] &= ~(std::uint64_t{1} << (a % 64));
  }

  ForbiddenGraph h_;
  Vertex n_ = 0;
  double s_ = 1.0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<std::vector<Vertex>> adj_;
  std::vector<Edge> edges_;
  // Open pairs as symmetric per-vertex bitsets, so the closure scan around
  // one endpoint touches a single row.
  std::vector<std::uint64_t> open_rows_;
  std::uint64_t open_count_ = 0;
  Rng rng_{0};
  ProcessOptions options_;
  std::shared_ptr<const std::vector<ClosureRoute>> routes_;

  bool list_mode_ = true;
  std::vector<Edge> open_list_;  // superset of the open pairs (lazy removal)
  std::uint64_t window_trials_ = 0;
  std::uint64_t window_hits_ = 0;

  ClosureLog log_;
};

// Visits every embedding consistent with the plan. `image` is indexed by plan
// position and must hold the anchor images in [0, plan.anchored).
template <class Visit>
void for_each_embedding(const ProcessState& state, const EmbeddingPlan& plan,
                        std::vector<Vertex>& image, Visit&& visit) {
  const std::size_t k = plan.order.size();
  for (std::size_t pos = 0; pos < plan.anchored; ++pos) {
    for (std::size_t prev = 0; prev < pos; ++prev) {
      if (image[prev] == image[pos]) return;
    }
    for (std::size_t prev : plan.edge_back[pos]) {
      if (!state.has_edge(image[prev], image[pos])) return;
    }
    for (std::size_t prev : plan.open_back[pos]) {
      if (!state.is_open(image[prev], image[pos])) return;
    }
  }
  auto fits = [&](std::size_t pos, Vertex y) {
    for (std::size_t prev = 0; prev < pos; ++prev) {
      if (image[prev] == y) return false;
    }
    for (std::size_t prev : plan.edge_back[pos]) {
      if (!state.has_edge(image[prev], y)) return false;
    }
    for (std::size_t prev : plan.open_back[pos]) {
      if (!state.is_open(image[prev], y)) return false;
    }
    return true;
  };
  auto extend = [&](auto&& self, std::size_t pos) -> void {
    if (pos == k) {
      visit(static_cast<const std::vector<Vertex>&>(image));
      return;
    }
    const auto& edge_back = plan.edge_back[pos];
    if (edge_back.empty() && !plan.open_back[pos].empty()) {
      // Only open-pair constraints: walk the open row of one placed vertex.
      const auto row = state.open_row(image[plan.open_back[pos].front()]);
      for (std::size_t w = 0; w < row.size(); ++w) {
        for (std::uint64_t bits = row[w]; bits != 0; bits &= bits - 1) {
          const auto y = static_cast<Vertex>(w * 64 + std::countr_zero(bits));
          if (!fits(pos, y)) continue;
          image[pos] = y;
          self(self, pos + 1);
        }
      }
      return;
    }
    if (edge_back.empty()) {
      for (Vertex y = 0; y < state.n(); ++y) {
        if (!fits(pos, y)) continue;
        image[pos] = y;
        self(self, pos + 1);
      }
      return;
    }
    Vertex pivot = image[edge_back.front()];
    for (std::size_t prev : edge_back) {
      if (state.degree(image[prev]) < state.degree(pivot)) pivot = image[prev];
    }
    for (Vertex y : state.neighbors(pivot)) {
      if (!fits(pos, y)) continue;
      image[pos] = y;
      self(self, pos + 1);
    }
  };
  extend(extend, plan.anchored);
}

// Every non-edge pair xy != uv such that some embedding of H maps two
// distinct edges onto uv and xy and all other edges into E(i). Sorted,
// without duplicates. Throws std::invalid_argument if uv is an edge.
std::vector<Edge> closing_set(const ProcessState& state, Edge uv);

struct StopRule {
  enum class Kind { MaxSteps, UntilTermination };
  Kind kind = Kind::UntilTermination;
  std::uint64_t max_steps = 0;

  static StopRule steps(std::uint64_t count) { return {Kind::MaxSteps, count}; }
  static StopRule termination() { return {Kind::UntilTermination, 0}; }
};

using Observer = std::function<void(const ProcessState&)>;

class ObserverError : public std::runtime_error {
 public:
  ObserverError(std::uint64_t step, const std::string& what)
      : std::runtime_error("observer failed at step " + std::to_string(step) +
                           ": " + what),
        step_(step) {}
  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t step_;
};

struct RunOptions {
  // Absolute step indices i at which the observers run (sorted or not).
  std::vector<std::uint64_t> checkpoints;
  std::vector<Observer> observers;
  bool keep_rows = true;
  std::function<void(const StepRecord&)> on_step;
};

struct Trace {
  std::vector<StepRecord> rows;
  bool terminated = false;
};

// Steps the process until the stop rule fires (max_steps counts the steps
// taken by this call) or the process terminates.
Trace run(ProcessState& state, StopRule stop, const RunOptions& options = {});

// m = round(mu (log n)^{1/(e_H - 1)} p n^2).
std::uint64_t default_step_budget(const ForbiddenGraph& h, Vertex n, double mu);

class OracleViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Recomputes the status table from scratch: a non-edge is Closed iff adding
// it creates a copy of H. Throws OracleViolation if the edge set already
// contains H. Intended for n <= 60.
PairTable recompute_status_oracle(const ForbiddenGraph& h, Vertex n,
                                  std::span<const Edge> edges);
PairTable recompute_status_oracle(const ProcessState& state);

// CSV with header `i,t,open_pairs,newly_closed,edge_u,edge_v`; open_pairs and
// newly_closed count unordered pairs.
void write_trace_header(std::ostream& os);
void write_trace_row(std::ostream& os, const StepRecord& row);

}  // namespace hfree
