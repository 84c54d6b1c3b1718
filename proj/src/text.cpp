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

#include "cbf/text.hpp"

#include <cstdio>

namespace cbf
{

std::string format_number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v); // no "-0"
  return buf;
}

void write_pattern_csv(const composite_pattern& pattern, std::ostream& out)
{
  out << "theta_deg";
  for (std::size_t m = 0; m < pattern.members.size(); ++m)
    out << ",g" << (m + 1) << "_power";
  out << ",composite_power\n";

  const auto& grid = pattern.grid();
  const auto power = pattern.power();
  for (std::size_t i = 0; i < grid.size(); ++i)
  {
    out << format_number(rad_to_deg(grid[i]));
    for (const auto& member : pattern.members)
      out << ',' << format_number(std::norm(member.gains[i]));
    out << ',' << format_number(power[i]) << '\n';
  }
}

} // namespace cbf
