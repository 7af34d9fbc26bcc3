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

#ifndef DATAVAL_TIMEUTIL_HPP
#define DATAVAL_TIMEUTIL_HPP

#include <optional>
#include <string>
#include <string_view>

#include "dataval/core.hpp"

namespace dataval {

/// ISO 8601 date or date-time: `YYYY-MM-DD`, `YYYY-MM-DDThh:mm[:ss[.fff]]`
/// with `T` or a space between date and time, and an optional `Z` or
/// `+hh:mm` / `-hh:mm` offset (converted to UTC). Fractional seconds are
/// truncated.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// `MM/DD/YYYY hh:mm:ss AM|PM`, as used by the Chicago taxi extract.
std::optional<Timestamp> parse_us_timestamp(std::string_view text);

/// `YYYY-MM-DDThh:mm:ssZ`.
std::string format_iso8601(Timestamp t);

/// Like parse_iso8601, throwing ConfigError naming `what` on failure.
Timestamp require_timestamp(std::string_view text, std::string_view what);

}  // namespace dataval

#endif  // DATAVAL_TIMEUTIL_HPP
