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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "config.hpp"
#include "hfree/analysis.hpp"
#include "hfree/extension.hpp"
#include "hfree/graph.hpp"
#include "hfree/process.hpp"
#include "hfree/report.hpp"
#include "hfree/structure.hpp"
#include "hfree/trajectory.hpp"
#include "json.hpp"

namespace hfree::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "hfree 0.1.0";

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string h = "K3";
  Vertex n = 1000;
  std::vector<std::uint64_t> seed_list;
  std::string seeds_text;
  double mu = 0.1;
  double epsilon = 0.01;
  double W = 10.0;
  double V = 0.0;
  std::optional<std::uint64_t> steps;
  bool to_termination = false;
  std::string checkpoints;
  std::string out = ".";
  bool log_closures = false;
  bool no_timing = false;
  std::string sampler = "auto";
  unsigned threads = 0;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--h", o.h, "forbidden graph: preset (K<s>, C<l>, K<r>,<s>) or graph file");
  app->add_option("--n", o.n, "number of vertices");
  app->add_option("--seed", o.seed_list, "seed (repeatable)");
  app->add_option("--seeds", o.seeds_text, "seed list, e.g. 1,2,5-8");
  app->add_option("--mu", o.mu, "constant mu");
  app->add_option("--epsilon", o.epsilon, "constant epsilon");
  app->add_option("--W", o.W, "constant W");
  app->add_option("--V", o.V, "constant V (default: 1 + largest pattern size)");
  app->add_option("--steps", o.steps, "stop after this many steps (default m)");
  app->add_flag("--to-termination", o.to_termination, "run until no open pair remains");
  app->add_option("--checkpoints", o.checkpoints,
                  "checkpoint times: list `0.1,0.5` or range `start:stop:step`");
  app->add_option("--out", o.out, "output directory");
  app->add_flag("--log-closures", o.log_closures, "record the pairs closed at each step");
  app->add_flag("--no-timing", o.no_timing, "omit wall-clock times from summaries");
  app->add_option("--sampler", o.sampler, "open-pair sampler: auto, list, rejection");
  app->add_option("--threads", o.threads, "worker threads for replicates (0 = hardware)");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("bad " + what + " `" + text + "`");
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used == text.size() && text.front() != '-') return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("bad " + what + " `" + text + "`");
}

std::vector<std::uint64_t> resolve_seeds(const CommonOptions& o) {
  std::vector<std::uint64_t> seeds = o.seed_list;
  for (const std::string& item : split(o.seeds_text, ',')) {
    if (const auto dash = item.find('-'); dash != std::string::npos && dash > 0) {
      const auto lo = parse_u64(item.substr(0, dash), "seed range");
      const auto hi = parse_u64(item.substr(dash + 1), "seed range");
      if (hi < lo || hi - lo > 100000) throw ValidationError("bad seed range `" + item + "`");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_u64(item, "seed"));
    }
  }
  if (seeds.empty()) seeds.push_back(1);
  return seeds;
}

// "K4iso" is K4 plus one isolated vertex.
GraphSpec load_graph_arg(const std::string& text) {
  const std::string suffix = "iso";
  if (text.size() > suffix.size() &&
      text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
    if (auto base = parse_preset(text.substr(0, text.size() - suffix.size()))) {
      std::vector<Edge> edges(base->edges().begin(), base->edges().end());
      return GraphSpec(base->vertex_count() + 1, std::move(edges));
    }
  }
  return load_graph(text);
}

ForbiddenGraph load_forbidden(const std::string& text) {
  GraphSpec g = load_graph_arg(text);
  if (!is_strictly_two_balanced(g)) {
    throw ValidationError("H = " + text + " is rejected: not strictly 2-balanced");
  }
  return ForbiddenGraph::create(std::move(g));
}

SamplerKind parse_sampler(const std::string& name) {
  if (name == "auto") return SamplerKind::Auto;
  if (name == "list") return SamplerKind::ExplicitList;
  if (name == "rejection") return SamplerKind::Rejection;
  throw ValidationError("unknown sampler `" + name + "` (auto, list, rejection)");
}

std::string format_t(double t) { return fmt::format("{:.6g}", t); }

struct Setup {
  ForbiddenGraph h;
  TrajectoryParams params;
  StopRule stop;
  std::vector<double> checkpoint_times;
  std::vector<std::uint64_t> checkpoint_steps;
  std::vector<std::uint64_t> seeds;
  ProcessOptions process;
  HeaderFields config_fields;  // everything except the seed
  std::string hash;
};

Setup make_setup(const std::string& command, const CommonOptions& o,
                 double V_override) {
  if (o.mu <= 0 || o.epsilon <= 0 || o.W <= 0) {
    throw ValidationError("mu, epsilon and W must be positive");
  }
  if (o.steps && o.to_termination) {
    throw ValidationError("--steps and --to-termination are exclusive");
  }
  ForbiddenGraph h = load_forbidden(o.h);
  if (o.n < h.v()) {
    throw ValidationError("n = " + std::to_string(o.n) + " is smaller than v_H = " +
                          std::to_string(h.v()));
  }
  if (o.n > 92681) throw ValidationError("n must be at most 92681");
  if (o.n < 3) throw ValidationError("n must be at least 3");
  Constants constants{o.mu, o.epsilon, o.W, V_override > 0 ? V_override : o.V};
  Setup setup{h, TrajectoryParams::make(h, o.n, constants), StopRule::termination(),
              {}, {}, resolve_seeds(o), {}, {}, {}};
  if (o.to_termination) {
    setup.stop = StopRule::termination();
  } else {
    setup.stop = StopRule::steps(o.steps ? *o.steps : setup.params.m);
  }
  if (o.checkpoints.empty()) {
    for (int k = 0; k * 0.1 <= setup.params.t_max + 1e-12; ++k) {
      setup.checkpoint_times.push_back(k * 0.1);
    }
  } else if (o.checkpoints.find(':') != std::string::npos) {
    const auto parts = split(o.checkpoints, ':');
    if (parts.size() != 3) throw ValidationError("checkpoint range must be start:stop:step");
    const double a = parse_real(parts[0], "checkpoint");
    const double b = parse_real(parts[1], "checkpoint");
    const double step = parse_real(parts[2], "checkpoint");
    if (!(step > 0) || a < 0 || b < a) throw ValidationError("bad checkpoint range");
    for (int k = 0; a + k * step <= b + 1e-12; ++k) {
      setup.checkpoint_times.push_back(a + k * step);
    }
  } else {
    for (const auto& item : split(o.checkpoints, ',')) {
      const double t = parse_real(item, "checkpoint");
      if (t < 0) throw ValidationError("checkpoint times must be >= 0");
      setup.checkpoint_times.push_back(t);
    }
  }
  std::sort(setup.checkpoint_times.begin(), setup.checkpoint_times.end());
  for (double t : setup.checkpoint_times) {
    setup.checkpoint_steps.push_back(
        static_cast<std::uint64_t>(std::llround(t * setup.params.s)));
  }
  // Without --steps the run reaches m or the last checkpoint, whichever is later.
  std::uint64_t default_stop = setup.params.m;
  if (!setup.checkpoint_steps.empty()) {
    default_stop = std::max(default_stop, setup.checkpoint_steps.back());
  }
  if (!o.to_termination && !o.steps) setup.stop = StopRule::steps(default_stop);
  setup.process.sampler = parse_sampler(o.sampler);
  setup.process.log_closures = o.log_closures;

  const TrajectoryParams& p = setup.params;
  std::string stop_text =
      o.to_termination ? "until_termination"
                       : (o.steps ? "max_steps " + std::to_string(*o.steps)
                                  : "default " + std::to_string(default_stop) +
                                        " (m = " + std::to_string(p.m) + ")");
  std::string grid;
  for (double t : setup.checkpoint_times) grid += (grid.empty() ? "" : ",") + format_t(t);
  setup.config_fields = {
      {"tool", kToolVersion},
      {"command", command},
      {"h", o.h},
      {"h_graph", "v=" + std::to_string(h.v()) + " e=" + std::to_string(h.e())},
      {"aut_h", std::to_string(h.aut_count())},
      {"p_exponent", "-" + h.rho().to_string()},
      {"n", std::to_string(o.n)},
      {"mu", format_real(p.mu)},
      {"epsilon", format_real(p.epsilon)},
      {"W", format_real(p.W)},
      {"V", format_real(p.V)},
      {"a_h", p.a_h.to_string()},
      {"s", format_real(p.s)},
      {"s_e", format_real(p.s_e)},
      {"t_max", format_real(p.t_max)},
      {"m", std::to_string(p.m)},
      {"stop", stop_text},
      {"checkpoints", grid},
      {"sampler", o.sampler},
  };
  setup.hash = config_hash(setup.config_fields);
  return setup;
}

HeaderFields seed_header(const Setup& setup, std::uint64_t seed) {
  HeaderFields fields = setup.config_fields;
  fields.insert(fields.begin(), {"config_hash", setup.hash});
  fields.insert(fields.begin() + 1, {"seed", std::to_string(seed)});
  return fields;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory `" + dir + "`: " + ec.message());
  return fs::path(dir);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write `" + path.string() + "`");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for `" + path.string() + "`");
}

// Runs job(k) for every k in [0, count) on up to `threads` workers. Results
// are stored by index, so the output order never depends on scheduling.
template <class Result, class Job>
std::vector<Result> run_replicates(std::size_t count, unsigned threads, Job job) {
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        results[k] = job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json constants_json(const Setup& setup) {
  const TrajectoryParams& p = setup.params;
  json c;
  c["mu"] = p.mu;
  c["epsilon"] = p.epsilon;
  c["W"] = p.W;
  c["V"] = p.V;
  c["a_h"] = p.a_h.to_string();
  c["p_exponent"] = "-" + setup.h.rho().to_string();
  c["s"] = p.s;
  c["s_e"] = p.s_e;
  c["t_max"] = p.t_max;
  c["m"] = p.m;
  const ConstantBudget budget = constant_budget(p);
  c["budget"] = {{"e_at_tmax", budget.e_at_tmax},
                 {"q_inv_V_at_tmax", budget.q_inv_v_at_tmax},
                 {"n_epsilon", budget.n_eps},
                 {"holds", budget.holds()}};
  return c;
}

json summary_base(const Setup& setup, const CommonOptions& o) {
  json s;
  s["tool"] = kToolVersion;
  s["config_hash"] = setup.hash;
  s["h"] = o.h;
  s["n"] = o.n;
  s["seeds"] = setup.seeds;
  s["constants"] = constants_json(setup);
  for (const auto& [key, value] : setup.config_fields) {
    if (key == "stop") s["stop"] = value;
  }
  s["checkpoints"] = setup.checkpoint_times;
  return s;
}

void write_json(const fs::path& path, const json& value) {
  std::ofstream out = open_out(path);
  out << value.dump(2) << '\n';
  finish(out, path);
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string graph;
  std::string pair;
  std::string gamma;
  std::string anchor;
};

std::vector<Vertex> parse_vertex_list(const std::string& text) {
  std::vector<Vertex> out;
  for (const auto& item : split(text, ',')) {
    out.push_back(static_cast<Vertex>(parse_u64(item, "vertex")));
  }
  return out;
}

std::string set_text(const std::vector<Vertex>& set) {
  std::string out = "{";
  for (std::size_t k = 0; k < set.size(); ++k) {
    out += (k ? "," : "") + std::to_string(set[k]);
  }
  return out + "}";
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  const GraphSpec g = load_graph_arg(o.graph);
  out << "graph: " << o.graph << " (v=" << g.vertex_count() << ", e=" << g.edge_count()
      << ")\n";
  if (g.vertex_count() <= kAutomorphismCap) {
    out << "aut: " << automorphism_count(g) << '\n';
  } else {
    out << "aut: n/a (more than " << kAutomorphismCap << " vertices)\n";
  }
  const bool balanced = g.vertex_count() <= kSubsetScanCap && is_strictly_two_balanced(g);
  out << "strictly 2-balanced: " << (balanced ? "yes" : "no") << '\n';
  if (g.vertex_count() >= 3 && g.edge_count() >= 2) {
    const ScalingExponent rho = p_exponent(g);
    out << "p-exponent: " << rho << " (p = n^-" << rho << ")\n";
  } else {
    out << "p-exponent: n/a\n";
  }
  out << "min degree: " << g.min_degree()
      << ", 2-connected: " << (g.is_two_connected() ? "yes" : "no") << '\n';

  std::string gamma_text = o.gamma;
  std::string anchor_text = o.anchor;
  if (!o.pair.empty()) {
    // gamma=<graph>,A=<v,v,...>
    const auto a_pos = o.pair.find("A=");
    const auto g_pos = o.pair.find("gamma=");
    if (g_pos == std::string::npos) throw ValidationError("--pair needs gamma=<graph>");
    const auto g_end = a_pos == std::string::npos ? o.pair.size() : a_pos;
    gamma_text = o.pair.substr(g_pos + 6, g_end - g_pos - 6);
    while (!gamma_text.empty() && gamma_text.back() == ',') gamma_text.pop_back();
    if (a_pos != std::string::npos) anchor_text = o.pair.substr(a_pos + 2);
  }
  if (gamma_text.empty()) return kExitOk;
  if (!balanced) {
    throw ValidationError("pair analysis needs a strictly 2-balanced H");
  }
  const ForbiddenGraph h = ForbiddenGraph::create(g);
  const GraphSpec gamma = load_graph_arg(gamma_text);
  const RootedPattern pattern(gamma, parse_vertex_list(anchor_text));
  const PairClass cls = classify_pair(h, pattern);
  const ExtensionSeries series = extension_series(h, pattern);
  out << "pair: Gamma=" << gamma_text << " (v=" << gamma.vertex_count()
      << ", e=" << gamma.edge_count() << "), A="
      << set_text(std::vector<Vertex>(pattern.anchor().begin(), pattern.anchor().end()))
      << (pattern.anchor_independent() ? "" : " (not independent)") << '\n';
  out << "S_Gamma: n^" << scaling_exponent(h, gamma) << '\n';
  out << "S_{A,Gamma}: n^" << pair_scaling_exponent(h, pattern) << '\n';
  out << "strictly balanced: " << (cls.strictly_balanced ? "yes" : "no") << '\n';
  out << "dense: " << (cls.dense ? "yes" : "no") << '\n';
  out << "strictly dense: " << (cls.strictly_dense ? "yes" : "no") << '\n';
  out << "extension series (length " << series.length() << "):\n";
  for (std::size_t k = 0; k < series.length(); ++k) {
    out << "  " << set_text(series.sets[k]) << " -> " << set_text(series.sets[k + 1])
        << ": n^" << series.step_exponents[k] << '\n';
  }
  out << "  total: n^" << series.total() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- run

struct SeedSummary {
  json value;
};

json degree_json(const DegreeStats& d) {
  return {{"min", d.min}, {"max", d.max}, {"mean", d.mean}, {"median", d.median},
          {"predicted_mean", d.predicted_mean}};
}

int cmd_run(const CommonOptions& o, std::ostream& out) {
  const Setup setup = make_setup("run", o, 0.0);
  const fs::path dir = prepare_out(o.out);
  const auto start_all = std::chrono::steady_clock::now();
  auto results = run_replicates<SeedSummary>(
      setup.seeds.size(), o.threads, [&](std::size_t k) {
        const std::uint64_t seed = setup.seeds[k];
        const auto start = std::chrono::steady_clock::now();
        ProcessState state = ProcessState::init(setup.h, o.n, seed, setup.process);
        const fs::path path = dir / fmt::format("trace_seed{}.csv", seed);
        std::ofstream trace = open_out(path);
        write_header_block(trace, seed_header(setup, seed));
        write_trace_header(trace);
        json q_rows = json::array();
        double q_worst = 0.0;
        RunOptions run_options;
        run_options.keep_rows = false;
        run_options.checkpoints = setup.checkpoint_steps;
        run_options.on_step = [&](const StepRecord& row) { write_trace_row(trace, row); };
        run_options.observers.push_back([&](const ProcessState& s) {
          const double t = s.t();
          const double predicted = q_of_t(setup.params, t) * o.n * static_cast<double>(o.n);
          const double observed = 2.0 * static_cast<double>(s.open_count());
          const double rel = observed / predicted - 1.0;
          q_worst = std::max(q_worst, std::abs(rel));
          q_rows.push_back({{"i", s.steps()}, {"t", t}, {"Q", observed},
                            {"predicted", predicted}, {"rel_error", rel}});
        });
        const Trace result = run(state, setup.stop, run_options);
        finish(trace, path);
        SeedSummary summary;
        json& v = summary.value;
        v["seed"] = seed;
        v["trace"] = path.filename().string();
        v["final_i"] = state.steps();
        v["final_t"] = state.t();
        v["terminated"] = result.terminated;
        v["open_pairs"] = state.open_count();
        v["closed_pairs"] = state.closed_count();
        v["sampler_at_end"] =
            state.active_sampler() == SamplerKind::ExplicitList ? "list" : "rejection";
        v["q_trajectory"] = q_rows;
        v["q_max_abs_rel_error"] = q_worst;
        v["degree"] = degree_json(degree_stats(state));
        v["independence_greedy"] = independence_number(state, false).value;
        if (!o.no_timing) v["wall_seconds"] = seconds_since(start);
        return summary;
      });
  json summary = summary_base(setup, o);
  summary["runs"] = json::array();
  for (auto& r : results) summary["runs"].push_back(r.value);
  if (!o.no_timing) summary["wall_seconds"] = seconds_since(start_all);
  write_json(dir / "summary.json", summary);
  for (const auto& r : results) {
    out << fmt::format("seed {}: i={} t={:.4f} terminated={} max|Q/(q n^2)-1|={:.4f}\n",
                       r.value["seed"].get<std::uint64_t>(),
                       r.value["final_i"].get<std::uint64_t>(),
                       r.value["final_t"].get<double>(),
                       r.value["terminated"].get<bool>() ? "yes" : "no",
                       r.value["q_max_abs_rel_error"].get<double>());
  }
  out << "wrote " << (dir / "summary.json").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- track

struct TrackOptions {
  std::vector<std::string> pattern_files;
  std::size_t anchors = 32;
};

int cmd_track(const CommonOptions& o, const TrackOptions& t, std::ostream& out) {
  // The catalogue fixes the default V, so build it before the setup.
  const ForbiddenGraph h0 = load_forbidden(o.h);
  std::vector<ExtensionPattern> catalogue = default_catalogue(h0);
  for (const std::string& file : t.pattern_files) catalogue.push_back(load_pattern(file));
  const Setup setup = make_setup("track", o, o.V > 0 ? o.V : default_v(catalogue));
  const ForbiddenGraph& h = setup.h;
  std::vector<TrackabilityProfile> profiles;
  for (const auto& pattern : catalogue) {
    pattern.check_size(setup.params.V);
    profiles.push_back(trackability_profile(h, pattern));
  }
  {
    // User patterns must be trackable at i = 0.
    const ProcessState fresh = ProcessState::init(h, o.n, 0);
    const std::size_t first_user = catalogue.size() - t.pattern_files.size();
    for (std::size_t p = first_user; p < catalogue.size(); ++p) {
      Anchor anchor;
      for (std::size_t k = 0; k < catalogue[p].anchor().size(); ++k) {
        anchor.images.push_back(static_cast<Vertex>(k));
      }
      const Trackability verdict = check_trackable(h, catalogue[p], profiles[p], anchor, fresh);
      if (!verdict.trackable) {
        throw ValidationError("pattern " + catalogue[p].name() +
                              " is not trackable: " + verdict.reason);
      }
    }
  }
  const fs::path dir = prepare_out(o.out);
  const auto start_all = std::chrono::steady_clock::now();
  auto results = run_replicates<SeedSummary>(
      setup.seeds.size(), o.threads, [&](std::size_t k) {
        const std::uint64_t seed = setup.seeds[k];
        const auto start = std::chrono::steady_clock::now();
        ProcessState state = ProcessState::init(h, o.n, seed, setup.process);
        Rng panel_rng = Rng(seed).split();
        const auto panel = draw_anchor_panel(catalogue, o.n, panel_rng, t.anchors);
        const fs::path path = dir / fmt::format("checkpoints_seed{}.csv", seed);
        std::ofstream csv = open_out(path);
        write_header_block(csv, seed_header(setup, seed));
        write_checkpoint_header(csv);
        // Per pattern: worst |mean over anchors / predicted - 1| for t > 0,
        // and the share of trackable samples inside the envelope.
        std::vector<double> worst(catalogue.size(), 0.0);
        std::vector<std::uint64_t> inside(catalogue.size(), 0), total(catalogue.size(), 0);
        RunOptions run_options;
        run_options.keep_rows = false;
        run_options.checkpoints = setup.checkpoint_steps;
        run_options.observers.push_back([&](const ProcessState& s) {
          const auto samples = sample_checkpoint(s, setup.params, catalogue, profiles, panel);
          std::vector<double> sum(catalogue.size(), 0.0);
          std::vector<std::size_t> cnt(catalogue.size(), 0);
          for (const TrackSample& sample : samples) {
            write_checkpoint_row(csv, sample, catalogue[sample.pattern].name());
            if (!sample.trackable) continue;
            sum[sample.pattern] += static_cast<double>(sample.observed);
            ++cnt[sample.pattern];
            ++total[sample.pattern];
            const double obs = static_cast<double>(sample.observed);
            if (obs >= sample.env_lo && obs <= sample.env_hi) ++inside[sample.pattern];
          }
          for (std::size_t p = 0; p < catalogue.size(); ++p) {
            if (cnt[p] == 0 || s.steps() == 0) continue;
            const double predicted = samples.empty() ? 0.0 : [&] {
              for (const auto& sample : samples) {
                if (sample.pattern == p) return sample.predicted;
              }
              return 0.0;
            }();
            if (predicted > 0) {
              worst[p] = std::max(worst[p], std::abs(sum[p] / cnt[p] / predicted - 1.0));
            }
          }
        });
        const Trace result = run(state, setup.stop, run_options);
        finish(csv, path);
        SeedSummary summary;
        json& v = summary.value;
        v["seed"] = seed;
        v["checkpoints_csv"] = path.filename().string();
        v["final_i"] = state.steps();
        v["final_t"] = state.t();
        v["terminated"] = result.terminated;
        json per = json::object();
        for (std::size_t p = 0; p < catalogue.size(); ++p) {
          per[catalogue[p].name()] = {
              {"max_rel_error_of_anchor_mean", worst[p]},
              {"inside_envelope_share",
               total[p] ? static_cast<double>(inside[p]) / total[p] : 0.0}};
        }
        v["patterns"] = per;
        if (!o.no_timing) v["wall_seconds"] = seconds_since(start);
        return summary;
      });
  json summary = summary_base(setup, o);
  json pats = json::array();
  for (std::size_t p = 0; p < catalogue.size(); ++p) {
    pats.push_back({{"name", catalogue[p].name()},
                    {"gamma", catalogue[p].gamma().to_text()},
                    {"e_gamma", catalogue[p].e_gamma()},
                    {"e_j", catalogue[p].e_j()},
                    {"anchor", std::vector<Vertex>(catalogue[p].anchor().begin(),
                                                   catalogue[p].anchor().end())},
                    {"S_AJ_exponent", profiles[p].s_a_j.to_string()},
                    {"condition_a", profiles[p].condition_a},
                    {"condition_b_static", profiles[p].condition_b_base}});
  }
  summary["catalogue"] = pats;
  summary["runs"] = json::array();
  for (auto& r : results) summary["runs"].push_back(r.value);
  if (!o.no_timing) summary["wall_seconds"] = seconds_since(start_all);
  write_json(dir / "summary.json", summary);
  for (const auto& r : results) {
    out << "seed " << r.value["seed"].get<std::uint64_t>() << ": "
        << r.value["checkpoints_csv"].get<std::string>() << '\n';
  }
  out << "wrote " << (dir / "summary.json").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- census

int cmd_census(const CommonOptions& o, const std::string& gamma_list, std::ostream& out) {
  const Setup setup = make_setup("census", o, 0.0);
  std::vector<std::pair<std::string, GraphSpec>> gammas;
  for (const auto& name : split(gamma_list, ';')) {
    gammas.emplace_back(name, load_graph_arg(name));
  }
  if (gammas.empty()) throw ValidationError("--gamma needs at least one graph");
  for (const auto& [name, g] : gammas) {
    if (g.vertex_count() > kSubsetScanCap) {
      throw ValidationError("census graph " + name + " is too large");
    }
  }
  const fs::path dir = prepare_out(o.out);
  auto results = run_replicates<SeedSummary>(
      setup.seeds.size(), o.threads, [&](std::size_t k) {
        const std::uint64_t seed = setup.seeds[k];
        ProcessState state = ProcessState::init(setup.h, o.n, seed, setup.process);
        const fs::path path = dir / fmt::format("census_seed{}.csv", seed);
        std::ofstream csv = open_out(path);
        write_header_block(csv, seed_header(setup, seed));
        write_census_header(csv);
        RunOptions run_options;
        run_options.keep_rows = false;
        run_options.checkpoints = setup.checkpoint_steps;
        run_options.observers.push_back([&](const ProcessState& s) {
          for (const auto& [name, g] : gammas) {
            write_census_row(csv, s.steps(), s.t(), name, subgraph_census(s, g));
          }
        });
        run(state, setup.stop, run_options);
        finish(csv, path);
        SeedSummary summary;
        summary.value = {{"seed", seed}, {"census_csv", path.filename().string()},
                         {"final_i", state.steps()}};
        return summary;
      });
  json summary = summary_base(setup, o);
  json regimes = json::object();
  for (const auto& [name, g] : gammas) {
    regimes[name] = std::string(to_string(classify_regime(setup.h, g)));
  }
  summary["regimes"] = regimes;
  summary["runs"] = json::array();
  for (auto& r : results) summary["runs"].push_back(r.value);
  write_json(dir / "summary.json", summary);
  for (const auto& [name, g] : gammas) {
    out << name << ": " << to_string(classify_regime(setup.h, g)) << '\n';
  }
  out << "wrote " << (dir / "summary.json").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string input;
  std::string ns;
  std::string quantity = "edges";
  std::optional<double> correction;
};

int cmd_fit(const CommonOptions& o, const FitOptions& f, bool out_given, std::ostream& out) {
  std::vector<std::pair<double, double>> points;
  json meta;
  double correction = f.correction.value_or(0.0);
  if (!f.input.empty()) {
    std::ifstream in(f.input);
    if (!in) throw IoError("cannot read fit input `" + f.input + "`");
    points = parse_fit_csv(in);
    meta["input"] = f.input;
  } else {
    // Sweep: run the process for every n and seed, record the quantity at
    // the stop rule, average over seeds.
    if (f.ns.empty()) throw ValidationError("fit needs --input or --ns");
    if (f.quantity != "edges" && f.quantity != "min_degree") {
      throw ValidationError("--quantity must be edges or min_degree");
    }
    const ForbiddenGraph h = load_forbidden(o.h);
    if (!f.correction && f.quantity == "edges") correction = 1.0 / static_cast<double>(h.e() - 1);
    const auto seeds = resolve_seeds(o);
    std::vector<Vertex> sizes;
    for (const auto& item : split(f.ns, ',')) {
      sizes.push_back(static_cast<Vertex>(parse_u64(item, "n")));
    }
    struct Job { Vertex n; std::uint64_t seed; };
    std::vector<Job> jobs;
    for (Vertex n : sizes) {
      if (n < h.v() || n < 3) throw ValidationError("n too small for H");
      for (auto seed : seeds) jobs.push_back({n, seed});
    }
    const SamplerKind sampler = parse_sampler(o.sampler);
    auto values = run_replicates<double>(jobs.size(), o.threads, [&](std::size_t k) {
      const auto params = TrajectoryParams::make(h, jobs[k].n, {o.mu, o.epsilon, o.W, o.V});
      ProcessState state = ProcessState::init(h, jobs[k].n, jobs[k].seed, {sampler, false});
      RunOptions ro;
      ro.keep_rows = false;
      const StopRule stop = o.to_termination ? StopRule::termination()
                                             : StopRule::steps(o.steps ? *o.steps : params.m);
      run(state, stop, ro);
      return f.quantity == "edges" ? static_cast<double>(state.steps())
                                   : static_cast<double>(degree_stats(state).min);
    });
    std::map<Vertex, std::pair<double, int>> agg;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      agg[jobs[k].n].first += values[k];
      agg[jobs[k].n].second += 1;
    }
    for (const auto& [n, acc] : agg) points.emplace_back(n, acc.first / acc.second);
    meta["h"] = o.h;
    meta["quantity"] = f.quantity;
    meta["seeds"] = seeds;
  }
  const FitResult fit = exponent_fit(points, correction);
  out << fmt::format("points: {}\nlog-correction exponent: {}\nslope: {:.6f}\nintercept: {:.6f}\nr^2: {:.6f}\n",
                     points.size(), format_real(correction), fit.slope, fit.intercept,
                     fit.r_squared);
  if (out_given) {
    const fs::path dir = prepare_out(o.out);
    {
      const fs::path path = dir / "fit_points.csv";
      std::ofstream csv = open_out(path);
      csv << "n,value\n";
      for (const auto& [n, v] : points) csv << format_real(n) << ',' << format_real(v) << '\n';
      finish(csv, path);
    }
    json j = meta;
    j["correction_exponent"] = correction;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["points"] = points;
    write_json(dir / "fit.json", j);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- traj

struct TrajOptions {
  double t_end = 0;
  std::size_t points = 101;
  std::string patterns = "Q";
};

int cmd_traj(const CommonOptions& o, const TrajOptions& t, bool out_given, std::ostream& out) {
  const ForbiddenGraph h = load_forbidden(o.h);
  const auto catalogue = default_catalogue(h);
  std::vector<const ExtensionPattern*> chosen;
  for (const auto& name : split(t.patterns, ',')) {
    auto it = std::find_if(catalogue.begin(), catalogue.end(),
                           [&](const ExtensionPattern& p) { return p.name() == name; });
    if (it == catalogue.end()) {
      std::string names;
      for (const auto& p : catalogue) names += " " + p.name();
      throw ValidationError("unknown pattern `" + name + "`; available:" + names);
    }
    chosen.push_back(&*it);
  }
  if (chosen.empty()) throw ValidationError("--pattern needs at least one name");
  if (t.points < 2) throw ValidationError("--points must be at least 2");
  const double V = o.V > 0 ? o.V : default_v(catalogue);
  const auto params = TrajectoryParams::make(h, std::max<Vertex>(o.n, 3), {o.mu, o.epsilon, o.W, V});
  const double t_end = t.t_end > 0 ? t.t_end : params.t_max;

  std::ostringstream csv;
  HeaderFields fields = {{"tool", kToolVersion}, {"command", "traj"}, {"h", o.h},
                         {"n", std::to_string(o.n)}, {"mu", format_real(params.mu)},
                         {"epsilon", format_real(params.epsilon)}, {"W", format_real(params.W)},
                         {"V", format_real(params.V)}, {"t_max", format_real(params.t_max)},
                         {"envelope_pattern", chosen.front()->name()},
                         {"envelope_units", "multiples of S_{A,J}"}};
  fields.insert(fields.begin(), {"config_hash", config_hash(fields)});
  write_header_block(csv, fields);
  csv << "t,q,c";
  for (const auto* p : chosen) csv << ",x_" << p->name();
  csv << ",env_lo,env_hi\n";
  for (std::size_t k = 0; k < t.points; ++k) {
    const double tt = t_end * static_cast<double>(k) / static_cast<double>(t.points - 1);
    csv << format_real(tt) << ',' << format_real(q_of_t(params, tt)) << ','
        << format_real(c_of_t(params, tt));
    for (const auto* p : chosen) {
      csv << ',' << format_real(x_of_t(params, p->e_gamma(), p->e_j(), tt));
    }
    const double x0 = x_of_t(params, chosen.front()->e_gamma(), chosen.front()->e_j(), tt);
    const Envelope env = envelope(params, tt, ScalingExponent(0), x0);
    csv << ',' << format_real(env.lo) << ',' << format_real(env.hi) << '\n';
  }
  if (out_given) {
    const fs::path dir = prepare_out(o.out);
    const fs::path path = dir / "traj.csv";
    std::ofstream file = open_out(path);
    file << csv.str();
    finish(file, path);
    out << "wrote " << path.string() << '\n';
  } else {
    out << csv.str();
  }
  return kExitOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator and verification toolkit for the H-free random graph process",
               "hfree"};
  app.require_subcommand(1);
  // `-h` is taken by the forbidden-graph option.
  app.set_help_flag("--help", "print help");
  std::string config_path;
  CommonOptions common;
  AnalyzeOptions analyze;
  TrackOptions track;
  FitOptions fit;
  TrajOptions traj;
  std::string census_gammas = "K2;P3;K3;C4";

  auto* a = app.add_subcommand("analyze", "structural report for a graph and optional rooted pair");
  a->add_option("graph", analyze.graph, "preset or graph file")->required();
  a->add_option("--pair", analyze.pair, "gamma=<graph>,A=<v,v,...>");
  a->add_option("--gamma", analyze.gamma, "pattern graph for pair analysis");
  a->add_option("--anchor", analyze.anchor, "anchor vertices, comma separated");

  auto* r = app.add_subcommand("run", "run the process and write traces");
  add_common(r, common);
  auto* t = app.add_subcommand("track", "sample extension variables at checkpoints");
  add_common(t, common);
  t->add_option("--pattern", track.pattern_files, "extra pattern file (repeatable)");
  t->add_option("--anchors", track.anchors, "anchors per pattern");
  auto* c = app.add_subcommand("census", "labelled subgraph counts at checkpoints");
  add_common(c, common);
  c->add_option("--gamma", census_gammas, "graphs separated by ';' (default K2;P3;K3;C4)");
  auto* f = app.add_subcommand("fit", "log-log exponent fit");
  add_common(f, common);
  f->add_option("--input", fit.input, "CSV with columns n,value");
  f->add_option("--ns", fit.ns, "sweep sizes, comma separated");
  f->add_option("--quantity", fit.quantity, "sweep quantity: edges or min_degree");
  f->add_option("--correction", fit.correction,
                "divide values by (log n)^k before fitting");
  auto* j = app.add_subcommand("traj", "closed-form trajectories on a time grid");
  add_common(j, common);
  j->add_option("--t-end", traj.t_end, "last grid time (default t_max)");
  j->add_option("--points", traj.points, "grid points");
  j->add_option("--pattern", traj.patterns, "catalogue pattern names, comma separated");

  for (auto* sub : {a, r, t, c, f, j}) sub->set_help_flag("--help", "print help");
  for (auto* sub : {r, t, c, f, j}) {
    sub->add_option("--config", config_path, "key=value config file");
  }

  try {
    // Config entries fill in options missing from the command line.
    for (std::size_t k = 0; k + 1 < args.size(); ++k) {
      if (args[k] == "--config") config_path = args[k + 1];
      if (args[k].rfind("--config=", 0) == 0) config_path = args[k].substr(9);
    }
    if (!args.empty() && args.back().rfind("--config=", 0) == 0) {
      config_path = args.back().substr(9);
    }
    if (!config_path.empty()) args = merge_config(args, load_config(config_path));
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    const bool out_given = [&] {
      for (auto* sub : {f, j}) {
        if (sub->parsed() && sub->count("--out") > 0) return true;
      }
      return false;
    }();
    if (a->parsed()) return cmd_analyze(analyze, out);
    if (r->parsed()) return cmd_run(common, out);
    if (t->parsed()) return cmd_track(common, track, out);
    if (c->parsed()) return cmd_census(common, census_gammas, out);
    if (f->parsed()) return cmd_fit(common, fit, out_given, out);
    if (j->parsed()) return cmd_traj(common, traj, out_given, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const GraphError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SizeLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), out, err);
}

}  // namespace hfree::cli
