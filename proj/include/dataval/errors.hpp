// Copyright 2026 The dataval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DATAVAL_ERRORS_HPP
#define DATAVAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dataval {

/// Bad run configuration: unknown names, misaligned windows, missing columns.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data could not be read or is unusable.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Index outside the player set of a game or panel.
class OutOfRangeError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// The requested computation is refused as too large, or a goal is
/// unreachable.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training series carries no signal; coalition games map this to v = 0.
class UntrainableCoalition : public std::runtime_error {
 public:
  UntrainableCoalition() : std::runtime_error("untrainable coalition") {}
};

}  // namespace dataval

#endif  // DATAVAL_ERRORS_HPP
