// Copyright 2026 The Furrow Authors
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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "furrow/sim/scenario.hpp"
#include "furrow/track/counter.hpp"
#include "furrow/track/synth.hpp"

namespace furrow::harness {

inline constexpr int kSchemaVersion = 1;

/// Flat key-value configuration with dotted section keys:
///   schema_version = 1
///   scenario.duration = 300
///   dropout.intervals = 63.6:66.4, 120:120.2
/// '#' starts a comment. Values are scalars, comma lists, or start:end pairs.
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<std::pair<double, double>> get_pairs(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  void parse(const std::string& text, const std::string& origin);
  std::map<std::string, std::string> entries_;
};

/// Scenario assembled from the "scenario.", "path.", "sensors.", "dropout.",
/// "traction.", "nmhe." and "nmpc." sections.
sim::ScenarioConfig scenario_from_config(const ConfigMap& cfg);

/// Counting parameters from the "count." section.
track::CountingParams counting_from_config(const ConfigMap& cfg);
track::KalmanParams kalman_from_config(const ConfigMap& cfg);

/// Synthetic stream generator parameters from the "synth." section.
track::SynthConfig synth_from_config(const ConfigMap& cfg);

}  // namespace furrow::harness
