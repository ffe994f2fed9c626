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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hfree::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// Flat `key = value` lines; `#` starts a comment. Keys are long option
// names without the leading dashes.
ConfigEntries parse_config(const std::string& text);
ConfigEntries load_config(const std::string& path);

// Appends `--key value` (or `--key` for value true) for every entry whose
// option does not already appear in args. args[0] is the subcommand.
std::vector<std::string> merge_config(std::vector<std::string> args,
                                      const ConfigEntries& entries);

}  // namespace hfree::cli
