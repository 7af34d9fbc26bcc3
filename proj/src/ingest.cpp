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

#include "dataval/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "dataval/errors.hpp"
#include "dataval/timeutil.hpp"

namespace dataval {
namespace {

struct ColumnMap {
  std::size_t time = 0;
  std::size_t source = 0;
  std::size_t zone = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       std::initializer_list<std::string_view> names) {
  for (std::string_view name : names) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
  }
  return std::nullopt;
}

std::size_t require_column(const std::vector<std::string>& header,
                           std::initializer_list<std::string_view> names, std::string_view role,
                           Schema schema) {
  if (auto idx = find_column(header, names)) return *idx;
  std::string wanted;
  for (std::string_view n : names) {
    if (!wanted.empty()) wanted += " | ";
    wanted += n;
  }
  throw ConfigError(std::string(schema_name(schema)) + " schema: missing " + std::string(role) +
                    " column (" + wanted + ")");
}

ColumnMap map_columns(const std::vector<std::string>& header, const LoadOptions& options) {
  ColumnMap map;
  const Schema schema = options.schema;
  auto source_override = [&](std::initializer_list<std::string_view> fallback) {
    if (options.source_column) {
      return require_column(header, {std::string_view(*options.source_column)}, "source", schema);
    }
    return require_column(header, fallback, "source", schema);
  };
  switch (schema) {
    case Schema::generic:
      map.time = require_column(header, {"start_time"}, "start time", schema);
      map.source = source_override({"source_id"});
      map.zone = require_column(header, {"zone_id"}, "zone", schema);
      break;
    case Schema::chicago:
      map.time = require_column(header, {"Trip Start Timestamp"}, "start time", schema);
      map.source = source_override({"Company"});
      map.zone = require_column(header, {"Pickup Community Area"}, "zone", schema);
      break;
    case Schema::nyc:
      map.time = require_column(header,
                                {"pickup_datetime", "tpep_pickup_datetime", "lpep_pickup_datetime",
                                 "Pickup_DateTime", "Pickup_datetime"},
                                "pickup datetime", schema);
      map.source = source_override({"hvfhs_license_num", "dispatching_base_num", "Dispatching_base_num",
                                    "VendorID"});
      map.zone = require_column(header, {"PULocationID", "PUlocationID"}, "pickup location", schema);
      break;
  }
  return map;
}

/// Reads one CSV record, joining physical lines while a quote is open.
bool read_record(std::istream& in, std::string& record) {
  record.clear();
  std::string line;
  bool any = false;
  while (std::getline(in, line)) {
    if (any) record += '\n';
    record += line;
    any = true;
    if (std::count(record.begin(), record.end(), '"') % 2 == 0) break;
  }
  if (!record.empty() && record.back() == '\r') record.pop_back();
  return any;
}

}  // namespace

Schema parse_schema(std::string_view name) {
  if (name == "generic") return Schema::generic;
  if (name == "chicago") return Schema::chicago;
  if (name == "nyc") return Schema::nyc;
  throw ConfigError("unknown schema '" + std::string(name) + "' (expected generic, chicago, nyc)");
}

std::string_view schema_name(Schema schema) {
  switch (schema) {
    case Schema::generic: return "generic";
    case Schema::chicago: return "chicago";
    case Schema::nyc: return "nyc";
  }
  return "generic";
}

std::size_t LoadReport::total_dropped() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : dropped) n += count;
  return n;
}

nlohmann::ordered_json LoadReport::to_json() const {
  nlohmann::ordered_json j;
  j["rows_read"] = rows_read;
  j["accepted"] = accepted;
  j["outside_window"] = outside_window;
  j["dropped_total"] = total_dropped();
  auto& d = j["dropped"] = nlohmann::ordered_json::object();
  for (const auto& [reason, count] : dropped) d[reason] = count;
  return j;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

LoadResult parse_trips(std::istream& in, const LoadOptions& options) {
  LoadResult result;
  auto& report = result.report;
  for (std::string_view r : {drop_reason::kBadTimestamp, drop_reason::kMissingSource,
                             drop_reason::kMissingZone, drop_reason::kMalformedRow}) {
    report.dropped.emplace(std::string(r), 0);
  }

  std::string record;
  if (!read_record(in, record)) throw DataError("input has no header row");
  if (record.size() >= 3 && record.compare(0, 3, "\xEF\xBB\xBF") == 0) record.erase(0, 3);
  const auto header = split_csv_line(record);
  const ColumnMap cols = map_columns(header, options);
  const std::size_t needed = std::max({cols.time, cols.source, cols.zone}) + 1;

  auto drop = [&](std::string_view reason) { ++report.dropped.find(reason)->second; };

  while (read_record(in, record)) {
    if (trim(record).empty()) continue;
    ++report.rows_read;
    const auto fields = split_csv_line(record);
    if (fields.size() < needed) {
      drop(drop_reason::kMalformedRow);
      continue;
    }
    const std::string_view time_text = trim(fields[cols.time]);
    const auto t = options.schema == Schema::chicago ? parse_us_timestamp(time_text)
                                                      : parse_iso8601(time_text);
    if (!t) {
      drop(drop_reason::kBadTimestamp);
      continue;
    }
    const std::string_view source = trim(fields[cols.source]);
    if (source.empty()) {
      drop(drop_reason::kMissingSource);
      continue;
    }
    const std::string_view zone = trim(fields[cols.zone]);
    if (zone.empty()) {
      drop(drop_reason::kMissingZone);
      continue;
    }
    if ((options.from && *t < *options.from) || (options.to && *t >= *options.to)) {
      ++report.outside_window;
      continue;
    }
    result.trips.push_back(TripRecord{*t, std::string(source), std::string(zone)});
  }
  report.accepted = result.trips.size();
  return result;
}

LoadResult load_trips(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file '" + path.string() + "'");
  return parse_trips(in, options);
}

std::map<SourceId, DemandSeries> bin_demand(std::span<const TripRecord> trips, const TimeGrid& grid,
                                            const std::optional<ZoneId>& zone_filter) {
  std::map<SourceId, DemandSeries> out;
  const ZoneId zone = zone_filter.value_or(kCityWide);
  for (const auto& trip : trips) {
    if (zone_filter && trip.zone_id != *zone_filter) continue;
    const auto bin = grid.bin_of(trip.start_time);
    if (!bin) continue;
    auto it = out.find(trip.source_id);
    if (it == out.end()) {
      DemandSeries s{trip.source_id, zone, std::vector<double>(grid.n_bins, 0.0)};
      it = out.emplace(trip.source_id, std::move(s)).first;
    }
    it->second.counts[*bin] += 1.0;
  }
  return out;
}

DemandPanel top_k_with_tail(const std::map<SourceId, DemandSeries>& series_by_source, std::size_t k,
                            const TimeGrid& grid, const ZoneId& zone) {
  std::vector<const DemandSeries*> ranked;
  ranked.reserve(series_by_source.size());
  for (const auto& [id, s] : series_by_source) ranked.push_back(&s);
  // Sort by total descending, then id ascending; std::map already orders ids.
  std::stable_sort(ranked.begin(), ranked.end(), [](const DemandSeries* a, const DemandSeries* b) {
    return a->total() > b->total();
  });

  std::vector<DemandSeries> kept;
  const std::size_t keep = (k == 0 || ranked.size() <= k) ? ranked.size() : k;
  for (std::size_t i = 0; i < keep; ++i) kept.push_back(*ranked[i]);
  if (keep < ranked.size()) {
    DemandSeries tail{kTailSource, zone, std::vector<double>(grid.n_bins, 0.0)};
    for (std::size_t i = keep; i < ranked.size(); ++i) {
      const auto& counts = ranked[i]->counts;
      for (std::size_t t = 0; t < grid.n_bins; ++t) tail.counts[t] += counts[t];
    }
    kept.push_back(std::move(tail));
  }
  return DemandPanel::from_series(grid, zone, std::move(kept));
}

TimeGrid split_windows(TimeGrid grid, Timestamp control_start) {
  if (control_start <= grid.start || control_start >= grid.end()) {
    throw ConfigError("control start " + format_iso8601(control_start) +
                      " must lie strictly inside the grid [" + format_iso8601(grid.start) + ", " +
                      format_iso8601(grid.end()) + ")");
  }
  const auto offset = (control_start - grid.start).count();
  if (offset % grid.bin_width.count() != 0) {
    throw ConfigError("control start " + format_iso8601(control_start) +
                      " is not aligned to a bin boundary");
  }
  const auto idx = static_cast<std::size_t>(offset / grid.bin_width.count());
  grid.observation = BinRange{0, idx};
  grid.control = BinRange{idx, grid.n_bins};
  return grid;
}

std::pair<Timestamp, Timestamp> day_window(std::span<const TripRecord> trips) {
  if (trips.empty()) throw DataError("no trips to derive a window from");
  const auto [lo, hi] = std::minmax_element(
      trips.begin(), trips.end(), [](const TripRecord& a, const TripRecord& b) { return a.start_time < b.start_time; });
  using std::chrono::days;
  return {std::chrono::floor<days>(lo->start_time), std::chrono::floor<days>(hi->start_time) + days(1)};
}

std::vector<ZoneId> distinct_zones(std::span<const TripRecord> trips) {
  std::set<ZoneId> zones;
  for (const auto& t : trips) zones.insert(t.zone_id);
  return {zones.begin(), zones.end()};
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_generic_csv(std::ostream& out, std::span<const TripRecord> trips) {
  out << "start_time,source_id,zone_id\n";
  for (const auto& t : trips) {
    out << format_iso8601(t.start_time) << ',' << csv_field(t.source_id) << ','
        << csv_field(t.zone_id) << '\n';
  }
}

}  // namespace dataval
