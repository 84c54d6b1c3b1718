// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: `search`, `pattern` and `ber` subcommands.
//
// Exit status: 0 success, 2 usage error (bad or missing flags, malformed
// inline values), 1 runtime error. Diagnostics go to `err`; data goes to
// files under --out, except the one-line variance summary of search/pattern.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cbf::cli
{

inline constexpr const char* tool_name = "cbf_sim";
inline constexpr const char* tool_version = "1.0.0";

// Seed used when neither --seed nor the config file gives one.
inline constexpr const char* seed_env_var = "CBF_SIM_SEED";

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "start:step:stop" (stop inclusive).
std::vector<double> parse_range(const std::string& text);

// Parses "a,b,c".
std::vector<double> parse_list(const std::string& text);

std::string sha256_hex(const std::string& data);

} // namespace cbf::cli
