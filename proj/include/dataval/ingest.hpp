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

#ifndef DATAVAL_INGEST_HPP
#define DATAVAL_INGEST_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dataval/core.hpp"

namespace dataval {

enum class Schema { generic, chicago, nyc };

/// Throws ConfigError for names other than generic, chicago, nyc.
Schema parse_schema(std::string_view name);
std::string_view schema_name(Schema schema);

struct TripRecord {
  Timestamp start_time;
  SourceId source_id;
  ZoneId zone_id;

  bool operator==(const TripRecord&) const = default;
};

/// Drop reasons used in LoadReport::dropped.
namespace drop_reason {
inline constexpr std::string_view kBadTimestamp = "bad_timestamp";
inline constexpr std::string_view kMissingSource = "missing_source";
inline constexpr std::string_view kMissingZone = "missing_zone";
inline constexpr std::string_view kMalformedRow = "malformed_row";
}  // namespace drop_reason

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t accepted = 0;
  /// Valid rows whose start time falls outside the requested window.
  std::size_t outside_window = 0;
  std::map<std::string, std::size_t, std::less<>> dropped;

  std::size_t total_dropped() const;
  nlohmann::ordered_json to_json() const;
};

struct LoadOptions {
  Schema schema = Schema::generic;
  /// Overrides the source column; chicago accepts "Company" (wholesale) or
  /// "Taxi ID" (retail).
  std::optional<std::string> source_column;
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
};

struct LoadResult {
  std::vector<TripRecord> trips;
  LoadReport report;
};

/// Reads a header-first CSV. Throws DataError if the file cannot be read and
/// ConfigError if a required column is absent.
LoadResult load_trips(const std::filesystem::path& path, const LoadOptions& options);
LoadResult parse_trips(std::istream& in, const LoadOptions& options);

/// Hourly (per grid) ride counts keyed by source. Trips outside the grid or
/// outside `zone_filter` are skipped; sources without surviving trips are
/// omitted.
std::map<SourceId, DemandSeries> bin_demand(std::span<const TripRecord> trips, const TimeGrid& grid,
                                            const std::optional<ZoneId>& zone_filter = std::nullopt);

inline const SourceId kTailSource = "TAIL";

/// Keeps the k largest sources by total rides (ties by source id) and sums
/// the rest into a synthetic TAIL source. k == 0 keeps every source.
DemandPanel top_k_with_tail(const std::map<SourceId, DemandSeries>& series_by_source, std::size_t k,
                            const TimeGrid& grid, const ZoneId& zone = kCityWide);

/// Splits the grid at `control_start`, which must be a bin boundary strictly
/// inside the grid. Throws ConfigError otherwise.
TimeGrid split_windows(TimeGrid grid, Timestamp control_start);

/// Distinct zone ids in lexicographic order.
/// [midnight of the first trip's day, midnight after the last trip's day).
/// Throws DataError for an empty list.
std::pair<Timestamp, Timestamp> day_window(std::span<const TripRecord> trips);

std::vector<ZoneId> distinct_zones(std::span<const TripRecord> trips);

/// Writes trips in the generic schema.
void write_generic_csv(std::ostream& out, std::span<const TripRecord> trips);

/// Quotes a CSV field when it holds a comma, quote, or newline.
std::string csv_field(std::string_view value);

/// Splits one CSV line. Quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace dataval

#endif  // DATAVAL_INGEST_HPP
