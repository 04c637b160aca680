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

#include "furrow/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "furrow/errors.hpp"

namespace furrow::harness {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + value + "'");
  }
}

}  // namespace

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  ConfigMap cfg;
  cfg.parse(ss.str(), path);
  return cfg;
}

ConfigMap ConfigMap::from_string(const std::string& text) {
  ConfigMap cfg;
  cfg.parse(text, "<string>");
  return cfg;
}

void ConfigMap::parse(const std::string& text, const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: missing '=' at " + origin + ":" + std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: empty key at " + origin + ":" + std::to_string(lineno));
    }
    entries_[key] = value;
  }
  const int version = get_int("schema_version", -1);
  if (version != kSchemaVersion) {
    throw ConfigError("config: schema_version = " + std::to_string(kSchemaVersion) +
                      " is required in " + origin);
  }
}

bool ConfigMap::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_double(key, it->second);
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  const double v = parse_double(key, it->second);
  return static_cast<int>(v);
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config: bad unsigned value for " + key);
  }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean value for " + key + ": '" + it->second + "'");
}

std::vector<double> ConfigMap::get_list(const std::string& key) const {
  std::vector<double> out;
  const auto it = entries_.find(key);
  if (it == entries_.end() || trim(it->second).empty()) {
    return out;
  }
  std::stringstream ss(it->second);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(parse_double(key, trim(cell)));
  }
  return out;
}

std::vector<std::pair<double, double>> ConfigMap::get_pairs(const std::string& key) const {
  std::vector<std::pair<double, double>> out;
  const auto it = entries_.find(key);
  if (it == entries_.end() || trim(it->second).empty()) {
    return out;
  }
  std::stringstream ss(it->second);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    const auto colon = cell.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("config: expected start:end pairs for " + key);
    }
    out.emplace_back(parse_double(key, trim(cell.substr(0, colon))),
                     parse_double(key, trim(cell.substr(colon + 1))));
  }
  return out;
}

sim::ScenarioConfig scenario_from_config(const ConfigMap& cfg) {
  sim::ScenarioConfig sc;
  sc.duration = cfg.get_double("scenario.duration", sc.duration);
  sc.dt = cfg.get_double("scenario.dt", sc.dt);
  sc.seed = cfg.get_u64("scenario.seed", sc.seed);
  sc.v_cmd = cfg.get_double("scenario.v_cmd", sc.v_cmd);
  sc.actuator_tau = cfg.get_double("scenario.actuator_tau", sc.actuator_tau);
  sc.start_offset = cfg.get_double("scenario.start_offset", sc.start_offset);
  sc.start_heading_offset =
      cfg.get_double("scenario.start_heading_offset", sc.start_heading_offset);
  sc.direction = cfg.get_int("scenario.direction", sc.direction);
  sc.fixed_traction = cfg.get_bool("scenario.fixed_traction", sc.fixed_traction);
  sc.telemetry = cfg.get_bool("scenario.telemetry", sc.telemetry);

  const std::string kind = cfg.get_string("path.kind", "rounded_rectangle");
  if (kind == "straight") {
    sc.path.kind = sim::PathSpec::Kind::straight;
  } else if (kind == "circle") {
    sc.path.kind = sim::PathSpec::Kind::circle;
  } else if (kind == "rounded_rectangle") {
    sc.path.kind = sim::PathSpec::Kind::rounded_rectangle;
  } else if (kind == "rows") {
    sc.path.kind = sim::PathSpec::Kind::rows;
  } else if (kind == "waypoints") {
    sc.path.kind = sim::PathSpec::Kind::waypoints;
  } else {
    throw ConfigError("config: unknown path.kind '" + kind + "'");
  }
  sc.path.speed = cfg.get_double("path.speed", sc.path.speed);
  sc.path.heading = cfg.get_double("path.heading", sc.path.heading);
  sc.path.radius = cfg.get_double("path.radius", sc.path.radius);
  sc.path.ccw = cfg.get_bool("path.ccw", sc.path.ccw);
  sc.path.rect_width = cfg.get_double("path.rect_width", sc.path.rect_width);
  sc.path.rect_height = cfg.get_double("path.rect_height", sc.path.rect_height);
  sc.path.corner_radius = cfg.get_double("path.corner_radius", sc.path.corner_radius);
  sc.path.row_length = cfg.get_double("path.row_length", sc.path.row_length);
  sc.path.row_spacing = cfg.get_double("path.row_spacing", sc.path.row_spacing);
  sc.path.row_count = cfg.get_int("path.row_count", sc.path.row_count);
  sc.path.waypoint_file = cfg.get_string("path.waypoint_file", sc.path.waypoint_file);

  sc.sensors.sigma_x = cfg.get_double("sensors.sigma_x", sc.sensors.sigma_x);
  sc.sensors.sigma_y = cfg.get_double("sensors.sigma_y", sc.sensors.sigma_y);
  sc.sensors.sigma_v = cfg.get_double("sensors.sigma_v", sc.sensors.sigma_v);
  sc.sensors.sigma_omega = cfg.get_double("sensors.sigma_omega", sc.sensors.sigma_omega);
  sc.sensors.rate_hz = cfg.get_double("sensors.rate_hz", sc.sensors.rate_hz);

  sc.dropouts.intervals = cfg.get_pairs("dropout.intervals");
  if (cfg.has("traction.mu")) {
    sc.traction.mu_steps = cfg.get_pairs("traction.mu");
  }
  if (cfg.has("traction.kappa")) {
    sc.traction.kappa_steps = cfg.get_pairs("traction.kappa");
  }

  sc.mhe.horizon = cfg.get_int("nmhe.horizon", sc.mhe.horizon);
  sc.mhe.dt = sc.dt;
  sc.mhe.initial_traction = cfg.get_double("nmhe.initial_traction", sc.mhe.initial_traction);
  if (cfg.has("nmhe.output_sigma")) {
    const auto v = cfg.get_list("nmhe.output_sigma");
    if (v.size() != 4) {
      throw ConfigError("config: nmhe.output_sigma needs 4 entries");
    }
    sc.mhe.weights.output_sigma = Eigen::Vector4d(v[0], v[1], v[2], v[3]);
  }
  if (cfg.has("nmhe.arrival_sigma")) {
    const auto v = cfg.get_list("nmhe.arrival_sigma");
    if (v.size() != 6) {
      throw ConfigError("config: nmhe.arrival_sigma needs 6 entries");
    }
    sc.mhe.weights.arrival_sigma << v[0], v[1], v[2], v[3], v[4], v[5];
  }

  sc.mpc.horizon = cfg.get_int("nmpc.horizon", sc.mpc.horizon);
  sc.mpc.dt = sc.dt;
  sc.mpc.omega_bound = cfg.get_double("nmpc.omega_bound", sc.mpc.omega_bound);
  const std::string input_ref = cfg.get_string("nmpc.input_reference", "last_measured");
  if (input_ref == "zero") {
    sc.mpc.input_reference = nmpc::InputReference::zero;
  } else if (input_ref == "last_measured") {
    sc.mpc.input_reference = nmpc::InputReference::last_measured;
  } else {
    throw ConfigError("config: unknown nmpc.input_reference '" + input_ref + "'");
  }
  if (cfg.has("nmpc.q")) {
    const auto v = cfg.get_list("nmpc.q");
    if (v.size() != 3) {
      throw ConfigError("config: nmpc.q needs 3 entries");
    }
    sc.mpc_weights.stage = Eigen::Vector3d(v[0], v[1], v[2]);
  }
  sc.mpc_weights.input = cfg.get_double("nmpc.r", sc.mpc_weights.input);
  if (cfg.has("nmpc.q_terminal")) {
    const auto v = cfg.get_list("nmpc.q_terminal");
    if (v.size() != 3) {
      throw ConfigError("config: nmpc.q_terminal needs 3 entries");
    }
    sc.mpc_weights.terminal = Eigen::Vector3d(v[0], v[1], v[2]);
  } else {
    sc.mpc_weights.terminal = 10.0 * sc.mpc_weights.stage;
  }
  return sc;
}

track::CountingParams counting_from_config(const ConfigMap& cfg) {
  track::CountingParams p;
  p.min_jaccard = cfg.get_double("count.s_min", p.min_jaccard);
  p.success_threshold = cfg.get_int("count.p", p.success_threshold);
  p.removal_threshold = cfg.get_int("count.q", p.removal_threshold);
  return p;
}

track::KalmanParams kalman_from_config(const ConfigMap& cfg) {
  track::KalmanParams k;
  const auto read4 = [&](const char* key, Eigen::Vector4d& dst) {
    if (!cfg.has(key)) return;
    const auto v = cfg.get_list(key);
    if (v.size() != 4) {
      throw ConfigError(std::string("config: ") + key + " needs 4 entries");
    }
    dst = Eigen::Vector4d(v[0], v[1], v[2], v[3]);
  };
  read4("count.kalman_q", k.process);
  read4("count.kalman_r", k.measurement);
  k.initial_position_var = cfg.get_double("count.kalman_p0_pos", k.initial_position_var);
  k.initial_velocity_var = cfg.get_double("count.kalman_p0_vel", k.initial_velocity_var);
  return k;
}

track::SynthConfig synth_from_config(const ConfigMap& cfg) {
  track::SynthConfig s;
  s.frame_width = cfg.get_int("synth.frame_width", s.frame_width);
  s.frame_height = cfg.get_int("synth.frame_height", s.frame_height);
  s.fps = cfg.get_double("synth.fps", s.fps);
  s.camera_speed = cfg.get_double("synth.camera_speed", s.camera_speed);
  s.objects = cfg.get_int("synth.objects", s.objects);
  s.spacing_mean = cfg.get_double("synth.spacing_mean", s.spacing_mean);
  s.spacing_jitter = cfg.get_double("synth.spacing_jitter", s.spacing_jitter);
  s.box_w = cfg.get_double("synth.box_w", s.box_w);
  s.box_h = cfg.get_double("synth.box_h", s.box_h);
  s.size_jitter = cfg.get_double("synth.size_jitter", s.size_jitter);
  s.y_center = cfg.get_double("synth.y_center", s.y_center);
  s.y_jitter = cfg.get_double("synth.y_jitter", s.y_jitter);
  s.center_noise = cfg.get_double("synth.center_noise", s.center_noise);
  s.size_noise = cfg.get_double("synth.size_noise", s.size_noise);
  s.dropout_max_run = cfg.get_int("synth.dropout_max_run", s.dropout_max_run);
  s.dropout_prob = cfg.get_double("synth.dropout_prob", s.dropout_prob);
  s.spurious = cfg.get_int("synth.spurious", s.spurious);
  s.spurious_life = cfg.get_int("synth.spurious_life", s.spurious_life);
  s.seed = cfg.get_u64("synth.seed", s.seed);
  return s;
}

}  // namespace furrow::harness
