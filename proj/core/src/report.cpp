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

#include "hfree/report.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace hfree {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string config_hash(const HeaderFields& fields) {
  std::string text;
  for (const auto& [key, value] : fields) text += key + "=" + value + "\n";
  return fmt::format("{:016x}", fnv1a(text));
}

void write_header_block(std::ostream& os, const HeaderFields& fields) {
  for (const auto& [key, value] : fields) os << "# " << key << ": " << value << '\n';
}

std::string format_real(double value) { return fmt::format("{:.9g}", value); }

void write_checkpoint_header(std::ostream& os) {
  os << "i,t,pattern,anchor,observed,predicted,env_lo,env_hi,trackable\n";
}

void write_checkpoint_row(std::ostream& os, const TrackSample& sample,
                          std::string_view pattern_name) {
  os << fmt::format("{},{:.9g},{},{},{},{:.9g},{:.9g},{:.9g},{}\n", sample.i,
                    sample.t, pattern_name, sample.anchor, sample.observed,
                    sample.predicted, sample.env_lo, sample.env_hi,
                    sample.trackable ? 1 : 0);
}

void write_census_header(std::ostream& os) {
  os << "i,t,gamma,observed,predicted,regime\n";
}

void write_census_row(std::ostream& os, std::uint64_t i, double t,
                      std::string_view gamma_name, const CensusReport& report) {
  os << fmt::format("{},{:.9g},{},{},{:.9g},{}\n", i, t, gamma_name,
                    report.observed, report.predicted, to_string(report.regime));
}

namespace {

std::vector<std::size_t> parse_index_list(std::string_view line,
                                          std::size_t line_no) {
  std::istringstream tokens{std::string(line)};
  std::string head;
  tokens >> head;
  std::vector<std::size_t> out;
  std::string item;
  while (tokens >> item) {
    std::size_t value = 0;
    std::size_t used = 0;
    try {
      value = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.front() == '-') {
      throw GraphError("line " + std::to_string(line_no) + ": bad index `" +
                       item + "`");
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace

ExtensionPattern parse_pattern_text(std::istream& in, std::string name) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::optional<std::vector<std::size_t>> j_lines;
  std::vector<Vertex> anchor;
  bool seen_anchor = false;
  const std::function<bool(std::string_view, std::size_t)> extra =
      [&](std::string_view line, std::size_t line_no) {
        std::istringstream tokens{std::string(line)};
        std::string head;
        tokens >> head;
        if (head == "J") {
          if (j_lines) throw GraphError("line " + std::to_string(line_no) + ": duplicate J line");
          j_lines = parse_index_list(line, line_no);
          return true;
        }
        if (head == "A") {
          if (seen_anchor) throw GraphError("line " + std::to_string(line_no) + ": duplicate A line");
          seen_anchor = true;
          for (std::size_t v : parse_index_list(line, line_no)) {
            anchor.push_back(static_cast<Vertex>(v));
          }
          return true;
        }
        return false;
      };
  std::istringstream first(text);
  GraphSpec gamma = parse_graph_text(first, &extra);

  // `e` lines in file order, to translate J indices.
  std::vector<Edge> file_order;
  std::istringstream second(text);
  std::string line;
  while (std::getline(second, line)) {
    std::istringstream tokens(line);
    std::string head;
    Vertex a = 0, b = 0;
    if ((tokens >> head) && head == "e" && (tokens >> a >> b)) {
      file_order.push_back(make_edge(a, b));
    }
  }
  std::vector<std::size_t> j_edges;
  if (j_lines) {
    for (std::size_t k : *j_lines) {
      if (k >= file_order.size()) {
        throw GraphError("J edge index " + std::to_string(k) + " out of range");
      }
      j_edges.push_back(*gamma.edge_index(file_order[k]));
    }
  } else {
    for (std::size_t k = 0; k < gamma.edge_count(); ++k) j_edges.push_back(k);
  }
  return ExtensionPattern(std::move(name), std::move(gamma), std::move(j_edges),
                          std::move(anchor));
}

ExtensionPattern load_pattern(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot read pattern file `" + path + "`");
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  if (const auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) {
    name = name.substr(0, dot);
  }
  return parse_pattern_text(in, name);
}

std::vector<std::pair<double, double>> parse_fit_csv(std::istream& in) {
  std::vector<std::pair<double, double>> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const bool may_be_header = header_allowed;
    header_allowed = false;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("fit input line " + std::to_string(line_no) +
                                  ": expected `n,value`");
    }
    try {
      out.emplace_back(std::stod(line.substr(0, comma)),
                       std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      if (may_be_header) continue;  // header row
      throw std::invalid_argument("fit input line " + std::to_string(line_no) +
                                  ": expected numbers `n,value`");
    }
  }
  return out;
}

}  // namespace hfree
