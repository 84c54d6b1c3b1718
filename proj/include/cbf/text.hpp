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

// Stable text formats shared by the library and the command-line tool.

#pragma once

#include "cbf/array_model.hpp"

#include <ostream>
#include <string>

namespace cbf
{

// 9 significant digits, "%.9g".
std::string format_number(double v);

// Header: theta_deg,g1_power,...,gM_power,composite_power
void write_pattern_csv(const composite_pattern& pattern, std::ostream& out);

} // namespace cbf
