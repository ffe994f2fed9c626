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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hfree/analysis.hpp"
#include "hfree/extension.hpp"

namespace hfree {

using HeaderFields = std::vector<std::pair<std::string, std::string>>;

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

// Hash of the fields rendered as `key=value\n` lines, as 16 hex digits.
std::string config_hash(const HeaderFields& fields);

// `# key: value` lines, one per field.
void write_header_block(std::ostream& os, const HeaderFields& fields);

// Shortest round-trip-safe rendering used in every CSV.
std::string format_real(double value);

// `i,t,pattern,anchor,observed,predicted,env_lo,env_hi,trackable`
void write_checkpoint_header(std::ostream& os);
void write_checkpoint_row(std::ostream& os, const TrackSample& sample,
                          std::string_view pattern_name);

// `i,t,gamma,observed,predicted,regime`
void write_census_header(std::ostream& os);
void write_census_row(std::ostream& os, std::uint64_t i, double t,
                      std::string_view gamma_name, const CensusReport& report);

// Graph text format plus `J <edge indices>` (0-based, in `e` line order)
// and `A <vertex list>`. Missing J means J = Gamma; missing A means A empty.
ExtensionPattern parse_pattern_text(std::istream& in, std::string name);
ExtensionPattern load_pattern(const std::string& path);

// `n,value` rows; a header line and `#` comments are skipped.
std::vector<std::pair<double, double>> parse_fit_csv(std::istream& in);

}  // namespace hfree
