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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cbf
{

// Argument outside the mathematical domain of an operation (bad index, angle, size).
class domain_error : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Operands of incompatible length or sampled on different grids.
class dimension_error : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Exhaustive search would exceed the configured candidate ceiling.
class capacity_error : public std::runtime_error
{
public:
  capacity_error(const std::string& what, std::uint64_t ceiling)
      : std::runtime_error(what), ceiling_(ceiling)
  {
  }
  std::uint64_t ceiling() const noexcept { return ceiling_; }

private:
  std::uint64_t ceiling_;
};

// No constructive solution exists for the requested length.
class unsupported_length_error : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class singularity_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input (weights, ranges, JSON documents).
class parse_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace cbf
