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

// Writes the small synthetic trip files bundled under data/.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "dataval/ingest.hpp"
#include "dataval/synthetic.hpp"

namespace {

void write(const std::filesystem::path& path, const std::vector<dataval::TripRecord>& trips) {
  std::ofstream out(path, std::ios::binary);
  dataval::write_generic_csv(out, trips);
  std::cout << path.string() << ": " << trips.size() << " trips\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);

  dataval::PanelSpec spec;
  spec.observation_weeks = 3;
  spec.control_weeks = 2;
  spec.noise_sigma = 0.15;
  spec.integer_counts = true;
  spec.seed = 11;

  const auto shape = dataval::weekly_demand_shape(168, 3);
  write(dir / "three_sources.csv",
        dataval::panel_to_trips(dataval::scaled_copies_panel(shape, {3.0, 2.0, 1.0}, spec)));

  std::vector<dataval::TripRecord> zones;
  for (int z = 0; z < 5; ++z) {
    spec.seed = 100 + static_cast<std::uint64_t>(z);
    const auto zone_shape = dataval::weekly_demand_shape(168, spec.seed);
    const double scale = 0.5 + 0.25 * z;
    auto panel = dataval::scaled_copies_panel(zone_shape, {2.0 * scale, 1.0 * scale, 0.5 * scale}, spec,
                                              std::to_string(z + 1));
    if (z == 4) panel = dataval::complementary_pair_panel(spec, 1.5);
    panel.zone = std::to_string(z + 1);
    auto trips = dataval::panel_to_trips(panel);
    zones.insert(zones.end(), trips.begin(), trips.end());
  }
  std::stable_sort(zones.begin(), zones.end(),
                   [](const auto& a, const auto& b) { return a.start_time < b.start_time; });
  write(dir / "five_zones.csv", zones);
  return 0;
}
